#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fieldsim/geometry.hpp"

namespace fieldsim {

// Eccentric-arm segments in structure-of-arrays layout plus the pairs to test.
struct SegmentBatch {
    std::vector<double> elbow_x;
    std::vector<double> elbow_y;
    std::vector<double> tip_x;
    std::vector<double> tip_y;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;

    std::size_t size() const { return elbow_x.size(); }
    void push_back(const Segment& s);
    Segment segment(std::size_t i) const { return {{elbow_x[i], elbow_y[i]}, {tip_x[i], tip_y[i]}}; }

    // Throws IndexOutOfRange for ragged arrays, out-of-range, self or duplicate pairs.
    void validate() const;
};

struct DistanceReport {
    std::vector<double> distance;
    std::vector<std::uint8_t> collides;
    double elapsed_seconds = 0.0;
    DistanceKernel kernel;
    std::size_t pairs_evaluated = 0;

    std::size_t collision_count() const;
};

// Number of worker threads actually used for `requested` (0 = all hardware threads).
int resolve_workers(int requested);

// Applies the scalar kernel to every pair in parallel. Output is independent of
// the worker count: each pair's slot is written by exactly one worker.
DistanceReport batch_pair_distances(const SegmentBatch& batch, DistanceKernel kernel, double threshold,
                                    int workers = 0);

struct EarlyExitResult {
    // Exact kernel distance, or a certified lower bound when pruned.
    double distance;
    bool collides;
    bool pruned;
};

// Bounding-circle broad phase ahead of the narrow-phase kernel. Verdicts are
// identical to running the kernel alone.
EarlyExitResult early_exit_pair_distance(const Segment& s1, const Segment& s2, double threshold,
                                         DistanceKernel kernel = DistanceKernel::exact());

// Baseline for benchmarking: tests every unordered segment pair with no broad
// phase, materialized sample points and a square root per sample pair, on one
// thread. Stops after `max_pairs` pairs (0 = all) so long runs can be
// extrapolated; pairs_evaluated records how far it got.
DistanceReport naive_all_pairs(const std::vector<Segment>& segments, int samples, double threshold,
                               std::size_t max_pairs = 0);

}  // namespace fieldsim
