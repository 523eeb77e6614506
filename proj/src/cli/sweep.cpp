#include "fieldsim/cli/sweep.hpp"

#include <cmath>

#include "fieldsim/errors.hpp"
#include "fieldsim/rng.hpp"

namespace fieldsim::cli {

namespace {

void check_range(const Range& r, const char* name, double floor)
{
    if (!(r.min <= r.max)) {
        throw InvalidParameter(std::string(name) + " range is empty (min > max)");
    }
    if (!(r.min >= floor)) {
        throw InvalidParameter(std::string(name) + " range must start at or above " + std::to_string(floor));
    }
}

double grid_value(const Range& r, std::size_t i, std::size_t steps)
{
    if (steps <= 1) {
        return r.min;
    }
    return r.min + (r.max - r.min) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

}  // namespace

const char* to_string(Method method) { return method == Method::Analytic ? "analytic" : "mc"; }

Method parse_method(const std::string& name)
{
    if (name == "analytic") {
        return Method::Analytic;
    }
    if (name == "mc") {
        return Method::MonteCarlo;
    }
    throw InvalidParameter("unknown method '" + name + "' (expected analytic or mc)");
}

void SweepSpec::validate() const
{
    check_range(arm, "arm length", 1e-9);
    check_range(ratio, "ratio", 1.0);
    check_range(pitch, "pitch", 1e-9);
    if (sampling == Sampling::RandomUniform && count == 0) {
        throw InvalidParameter("sweep needs at least one point");
    }
    for (const std::size_t steps : grid) {
        if (sampling == Sampling::Grid && steps == 0) {
            throw InvalidParameter("grid steps must be at least 1");
        }
    }
    if (region_radius && !(*region_radius > 0.0)) {
        throw InvalidParameter("region radius must be positive");
    }
}

std::vector<SweepPoint> sweep_points(const SweepSpec& spec)
{
    spec.validate();
    std::vector<SweepPoint> points;
    if (spec.sampling == Sampling::Grid) {
        for (std::size_t a = 0; a < spec.grid[0]; ++a) {
            for (std::size_t r = 0; r < spec.grid[1]; ++r) {
                for (std::size_t p = 0; p < spec.grid[2]; ++p) {
                    points.push_back({grid_value(spec.arm, a, spec.grid[0]), grid_value(spec.ratio, r, spec.grid[1]),
                                      grid_value(spec.pitch, p, spec.grid[2]), 0});
                }
            }
        }
    } else {
        Rng rng(splitmix64(spec.seed));
        for (std::size_t k = 0; k < spec.count; ++k) {
            const double a = spec.arm.min + (spec.arm.max - spec.arm.min) * uniform01(rng);
            const double r = spec.ratio.min + (spec.ratio.max - spec.ratio.min) * uniform01(rng);
            const double p = spec.pitch.min + (spec.pitch.max - spec.pitch.min) * uniform01(rng);
            points.push_back({a, r, p, 0});
        }
    }
    for (std::size_t k = 0; k < points.size(); ++k) {
        points[k].seed = derive_seed(spec.seed, k);
    }
    return points;
}

double default_region_radius(const SimConfig& config) { return kRegionScale * config.array().circumradius(); }

SimConfig point_config(const SweepSpec& spec, const SweepPoint& point)
{
    SimConfig config = spec.mc;
    config.geom = ArmGeometry::from_ratio(point.arm, point.ratio);
    config.pitch = point.pitch;
    config.root_seed = point.seed;
    config.region_radius = spec.region_radius ? *spec.region_radius : default_region_radius(config);
    return config;
}

ResultRow analytic_row(const SweepSpec& spec, const SweepPoint& point)
{
    const ArmGeometry geom = ArmGeometry::from_ratio(point.arm, point.ratio);
    const AnalyticResult r = collision_probability_analytic(geom, spec.mc.safety, point.pitch, spec.cover);
    ResultRow row;
    row.arm = point.arm;
    row.ratio = point.ratio;
    row.pitch = point.pitch;
    row.method = Method::Analytic;
    row.probability = r.probability;
    row.seed = point.seed;
    return row;
}

std::optional<ResultRow> mc_row(const SweepSpec& spec, const SweepPoint& point, const std::atomic<bool>* cancel)
{
    SimConfig config = point_config(spec, point);
    config.cancel = cancel;
    const CollisionStats stats = run_simulation(config);
    if (cancel != nullptr && cancel->load()) {
        return std::nullopt;
    }
    ResultRow row;
    row.arm = point.arm;
    row.ratio = point.ratio;
    row.pitch = point.pitch;
    row.method = Method::MonteCarlo;
    row.probability = stats.reported;
    row.wilson_lower = stats.wilson_lower;
    row.wilson_upper = stats.wilson_upper;
    row.seed = point.seed;
    return row;
}

}  // namespace fieldsim::cli
