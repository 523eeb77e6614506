#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fieldsim/analytic.hpp"
#include "fieldsim/montecarlo.hpp"

namespace fieldsim::cli {

struct Range {
    double min;
    double max;
};

enum class Sampling { Grid, RandomUniform };

enum class Method { Analytic, MonteCarlo };

const char* to_string(Method method);
// "analytic" or "mc".
Method parse_method(const std::string& name);

// Parameter sweep over arm length (l1, mm), arm ratio and pitch (mm). Defaults
// are the standard validation ranges.
struct SweepSpec {
    Range arm{7.25, 14.5};
    Range ratio{1.0, 2.0};
    Range pitch{24.6, 35.0};
    Sampling sampling = Sampling::RandomUniform;
    std::size_t count = 80;
    // Steps along arm, ratio, pitch for Grid sampling.
    std::array<std::size_t, 3> grid{1, 1, 1};
    std::uint64_t seed = 0;
    // Template for every Monte Carlo point; geometry, pitch, seed and region
    // are filled in per point.
    SimConfig mc;
    // Target region radius; unset = 1.5 x the array circumradius of each point.
    std::optional<double> region_radius;
    CoverMode cover = CoverMode::FullPatrol;

    // Throws InvalidParameter.
    void validate() const;
};

struct SweepPoint {
    double arm;
    double ratio;
    double pitch;
    // Root seed of this point's Monte Carlo run.
    std::uint64_t seed;
};

// Grid points in arm-major order, or `count` uniform draws from a stream seeded
// by spec.seed. Point k runs Monte Carlo with derive_seed(spec.seed, k).
std::vector<SweepPoint> sweep_points(const SweepSpec& spec);

inline constexpr double kRegionScale = 1.5;

double default_region_radius(const SimConfig& config);

SimConfig point_config(const SweepSpec& spec, const SweepPoint& point);

struct ResultRow {
    double arm = 0.0;
    double ratio = 0.0;
    double pitch = 0.0;
    Method method = Method::Analytic;
    double probability = 0.0;
    std::optional<double> wilson_lower;
    std::optional<double> wilson_upper;
    std::uint64_t seed = 0;
};

ResultRow analytic_row(const SweepSpec& spec, const SweepPoint& point);

// Empty when the run was cancelled before finishing.
std::optional<ResultRow> mc_row(const SweepSpec& spec, const SweepPoint& point,
                                const std::atomic<bool>* cancel = nullptr);

}  // namespace fieldsim::cli
