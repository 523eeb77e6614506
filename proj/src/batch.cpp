#include "fieldsim/batch.hpp"

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <limits>
#include <string>
#include <thread>

#include <omp.h>

#include "fieldsim/errors.hpp"

namespace fieldsim {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

void SegmentBatch::push_back(const Segment& s)
{
    elbow_x.push_back(s.a.x);
    elbow_y.push_back(s.a.y);
    tip_x.push_back(s.b.x);
    tip_y.push_back(s.b.y);
}

void SegmentBatch::validate() const
{
    const std::size_t n = elbow_x.size();
    if (elbow_y.size() != n || tip_x.size() != n || tip_y.size() != n) {
        throw IndexOutOfRange("segment arrays differ in length");
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> sorted;
    sorted.reserve(pairs.size());
    for (const auto& [i, j] : pairs) {
        if (i >= n || j >= n) {
            throw IndexOutOfRange("pair (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range for "
                                  + std::to_string(n) + " segments");
        }
        if (i == j) {
            throw IndexOutOfRange("pair (" + std::to_string(i) + ", " + std::to_string(j) + ") is a self pair");
        }
        sorted.emplace_back(std::min(i, j), std::max(i, j));
    }
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw IndexOutOfRange("pair list contains duplicates");
    }
}

std::size_t DistanceReport::collision_count() const
{
    return static_cast<std::size_t>(std::count(collides.begin(), collides.end(), std::uint8_t{1}));
}

int resolve_workers(int requested)
{
    if (requested > 0) {
        return requested;
    }
    return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

DistanceReport batch_pair_distances(const SegmentBatch& batch, DistanceKernel kernel, double threshold, int workers)
{
    batch.validate();
    if (kernel.kind == DistanceKernel::Kind::Discrete && kernel.samples < 2) {
        throw InvalidSampleCount("sample count must be at least 2");
    }
    DistanceReport report;
    report.kernel = kernel;
    const auto count = static_cast<std::ptrdiff_t>(batch.pairs.size());
    report.distance.assign(batch.pairs.size(), 0.0);
    report.collides.assign(batch.pairs.size(), 0);

    const auto start = Clock::now();
    const int threads = resolve_workers(workers);
#pragma omp parallel for num_threads(threads) schedule(static)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
        const auto [i, j] = batch.pairs[static_cast<std::size_t>(k)];
        const double dist = kernel(batch.segment(i), batch.segment(j));
        report.distance[static_cast<std::size_t>(k)] = dist;
        report.collides[static_cast<std::size_t>(k)] = dist < threshold ? 1 : 0;
    }
    report.elapsed_seconds = seconds_since(start);
    report.pairs_evaluated = batch.pairs.size();
    return report;
}

EarlyExitResult early_exit_pair_distance(const Segment& s1, const Segment& s2, double threshold, DistanceKernel kernel)
{
    const Vec2 m1 = 0.5 * (s1.a + s1.b);
    const Vec2 m2 = 0.5 * (s2.a + s2.b);
    const double centers = distance(m1, m2);
    const double separation = centers - 0.5 * s1.length() - 0.5 * s2.length();
    // Slack absorbs rounding so the bound stays below the true distance.
    const double slack = 1e-9 * (1.0 + centers);
    if (separation - slack > threshold) {
        return {separation - slack, false, true};
    }
    const double dist = kernel(s1, s2);
    return {dist, dist < threshold, false};
}

DistanceReport naive_all_pairs(const std::vector<Segment>& segments, int samples, double threshold,
                               std::size_t max_pairs)
{
    if (samples < 2) {
        throw InvalidSampleCount("sample count must be at least 2");
    }
    DistanceReport report;
    report.kernel = DistanceKernel::discrete(samples);
    const auto start = Clock::now();
    auto sample = [samples](const Segment& s) {
        std::vector<Vec2> points;
        for (int k = 0; k <= samples; ++k) {
            points.push_back(k == samples ? s.b : s.a + (static_cast<double>(k) / samples) * (s.b - s.a));
        }
        return points;
    };
    const std::size_t n = segments.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (max_pairs != 0 && report.pairs_evaluated == max_pairs) {
                report.elapsed_seconds = seconds_since(start);
                return report;
            }
            const std::vector<Vec2> p = sample(segments[i]);
            const std::vector<Vec2> q = sample(segments[j]);
            double best = std::numeric_limits<double>::infinity();
            for (const Vec2 a : p) {
                for (const Vec2 b : q) {
                    best = std::min(best, distance(a, b));
                }
            }
            report.distance.push_back(best);
            report.collides.push_back(best < threshold ? 1 : 0);
            ++report.pairs_evaluated;
        }
    }
    report.elapsed_seconds = seconds_since(start);
    return report;
}

}  // namespace fieldsim
