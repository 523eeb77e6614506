#include "fieldsim/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <omp.h>

#include "fieldsim/batch.hpp"
#include "fieldsim/errors.hpp"
#include "fieldsim/rng.hpp"

namespace fieldsim {

namespace {

Vec2 uniform_in_disk(Rng& rng, double radius)
{
    const double r2 = radius * radius;
    for (;;) {
        const Vec2 p{(2.0 * uniform01(rng) - 1.0) * radius, (2.0 * uniform01(rng) - 1.0) * radius};
        if (norm_sq(p) <= r2) {
            return p;
        }
    }
}

std::vector<Vec2> poisson_disk(Rng& rng, double radius, std::size_t count)
{
    const double spacing = poisson_disk_spacing(radius, count);
    const double spacing_sq = spacing * spacing;
    // One point per cell at most when cell = spacing / sqrt(2).
    const double cell = spacing / std::sqrt(2.0);
    const auto dim = static_cast<long long>(std::ceil(2.0 * radius / cell)) + 1;
    std::vector<std::int64_t> grid(static_cast<std::size_t>(dim * dim), -1);
    auto cell_of = [&](double v) {
        return std::clamp(static_cast<long long>(std::floor((v + radius) / cell)), 0LL, dim - 1);
    };

    std::vector<Vec2> points;
    points.reserve(count);
    const std::size_t max_attempts = kPoissonDiskAttemptsPerPoint * count;
    for (std::size_t attempt = 0; attempt < max_attempts && points.size() < count; ++attempt) {
        const Vec2 p = uniform_in_disk(rng, radius);
        const long long cx = cell_of(p.x);
        const long long cy = cell_of(p.y);
        bool clear = true;
        for (long long gx = std::max(0LL, cx - 2); clear && gx <= std::min(dim - 1, cx + 2); ++gx) {
            for (long long gy = std::max(0LL, cy - 2); gy <= std::min(dim - 1, cy + 2); ++gy) {
                const std::int64_t other = grid[static_cast<std::size_t>(gx * dim + gy)];
                if (other >= 0 && norm_sq(points[static_cast<std::size_t>(other)] - p) < spacing_sq) {
                    clear = false;
                    break;
                }
            }
        }
        if (clear) {
            grid[static_cast<std::size_t>(cx * dim + cy)] = static_cast<std::int64_t>(points.size());
            points.push_back(p);
        }
    }
    return points;
}

std::size_t draw_total(Rng& rng, std::size_t count)
{
    std::poisson_distribution<std::uint64_t> total(static_cast<double>(count));
    return static_cast<std::size_t>(total(rng));
}

}  // namespace

const char* to_string(Distribution distribution)
{
    switch (distribution) {
    case Distribution::UniformFixedCount:
        return "uniform";
    case Distribution::PoissonProcess:
        return "poisson";
    case Distribution::PoissonDisk:
        return "poisson-disk";
    }
    return "?";
}

Distribution parse_distribution(const std::string& name)
{
    if (name == "uniform") {
        return Distribution::UniformFixedCount;
    }
    if (name == "poisson") {
        return Distribution::PoissonProcess;
    }
    if (name == "poisson-disk") {
        return Distribution::PoissonDisk;
    }
    throw InvalidParameter("unknown distribution '" + name + "' (expected uniform, poisson or poisson-disk)");
}

double poisson_disk_spacing(double region_radius, std::size_t count)
{
    return region_radius * std::sqrt(kPoissonDiskPacking / static_cast<double>(count));
}

std::size_t poisson_target_total(std::size_t count, std::uint64_t seed)
{
    Rng rng(seed);
    return draw_total(rng, count);
}

TargetField gen_targets(Distribution distribution, double region_radius, std::size_t count, std::uint64_t seed)
{
    if (!(region_radius > 0.0)) {
        throw InvalidParameter("region radius must be positive");
    }
    if (count == 0) {
        throw InvalidParameter("target count must be at least 1");
    }
    TargetField field;
    field.distribution = distribution;
    field.region_radius = region_radius;
    field.seed = seed;
    Rng rng(seed);
    switch (distribution) {
    case Distribution::UniformFixedCount:
        field.points.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            field.points.push_back(uniform_in_disk(rng, region_radius));
        }
        break;
    case Distribution::PoissonProcess: {
        const std::size_t n = draw_total(rng, count);
        field.points.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            field.points.push_back(uniform_in_disk(rng, region_radius));
        }
        break;
    }
    case Distribution::PoissonDisk:
        field.points = poisson_disk(rng, region_radius, count);
        break;
    }
    return field;
}

const char* to_string(FinalTargetRule rule)
{
    return rule == FinalTargetRule::Nearest ? "nearest" : "random";
}

FinalTargetRule parse_final_target_rule(const std::string& name)
{
    if (name == "nearest") {
        return FinalTargetRule::Nearest;
    }
    if (name == "random") {
        return FinalTargetRule::Random;
    }
    throw InvalidParameter("unknown final-target rule '" + name + "' (expected nearest or random)");
}

std::size_t Assignment::assigned_count() const
{
    return static_cast<std::size_t>(
        std::count_if(final_target.begin(), final_target.end(), [](const auto& t) { return t.has_value(); }));
}

TargetAllocator::TargetAllocator(const HexArray& array)
    : centers_(array.centers()), geom_(array.geom()), cell_(array.geom().reach_max())
{
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;
    for (const Vec2 c : centers_) {
        min_x = std::min(min_x, c.x);
        min_y = std::min(min_y, c.y);
        max_x = std::max(max_x, c.x);
        max_y = std::max(max_y, c.y);
    }
    origin_x_ = min_x - cell_;
    origin_y_ = min_y - cell_;
    cols_ = static_cast<long long>(std::ceil((max_x - origin_x_ + cell_) / cell_)) + 1;
    rows_ = static_cast<long long>(std::ceil((max_y - origin_y_ + cell_) / cell_)) + 1;
    buckets_.resize(static_cast<std::size_t>(cols_ * rows_));
    for (std::size_t i = 0; i < centers_.size(); ++i) {
        const auto cx = static_cast<long long>(std::floor((centers_[i].x - origin_x_) / cell_));
        const auto cy = static_cast<long long>(std::floor((centers_[i].y - origin_y_) / cell_));
        buckets_[static_cast<std::size_t>(cy * cols_ + cx)].push_back(i);
    }
}

void TargetAllocator::reachable(Vec2 target, std::vector<std::pair<std::size_t, double>>& out) const
{
    out.clear();
    const auto cx = static_cast<long long>(std::floor((target.x - origin_x_) / cell_));
    const auto cy = static_cast<long long>(std::floor((target.y - origin_y_) / cell_));
    for (long long gy = std::max(0LL, cy - 1); gy <= std::min(rows_ - 1, cy + 1); ++gy) {
        for (long long gx = std::max(0LL, cx - 1); gx <= std::min(cols_ - 1, cx + 1); ++gx) {
            for (const std::size_t i : buckets_[static_cast<std::size_t>(gy * cols_ + gx)]) {
                const double dist = distance(target, centers_[i]);
                if (is_reachable(geom_, dist)) {
                    out.emplace_back(i, dist);
                }
            }
        }
    }
}

Assignment TargetAllocator::allocate(const TargetField& field, FinalTargetRule rule) const
{
    const std::size_t n_pos = centers_.size();
    const std::size_t n_targets = field.points.size();

    // Candidate lists in CSR form.
    std::vector<std::size_t> offsets(n_targets + 1, 0);
    std::vector<std::pair<std::size_t, double>> candidates;
    std::vector<std::pair<double, std::size_t>> order;
    std::vector<std::pair<std::size_t, double>> scratch;
    for (std::size_t t = 0; t < n_targets; ++t) {
        reachable(field.points[t], scratch);
        if (!scratch.empty()) {
            double nearest = scratch.front().second;
            for (const auto& c : scratch) {
                nearest = std::min(nearest, c.second);
            }
            order.emplace_back(nearest, t);
            candidates.insert(candidates.end(), scratch.begin(), scratch.end());
        }
        offsets[t + 1] = candidates.size();
    }
    std::sort(order.begin(), order.end());

    Assignment result;
    result.per_positioner_targets.resize(n_pos);
    result.final_target.assign(n_pos, std::nullopt);
    std::vector<double> final_distance(n_pos, 0.0);
    for (const auto& [nearest, t] : order) {
        const std::pair<std::size_t, double>* best = nullptr;
        for (std::size_t c = offsets[t]; c < offsets[t + 1]; ++c) {
            const auto& cand = candidates[c];
            if (best == nullptr) {
                best = &cand;
                continue;
            }
            const std::size_t load = result.per_positioner_targets[cand.first].size();
            const std::size_t best_load = result.per_positioner_targets[best->first].size();
            if (load < best_load || (load == best_load && cand.second < best->second)
                || (load == best_load && cand.second == best->second && cand.first < best->first)) {
                best = &cand;
            }
        }
        const std::size_t pos = best->first;
        result.per_positioner_targets[pos].push_back(t);
        auto& chosen = result.final_target[pos];
        if (!chosen || best->second < final_distance[pos] || (best->second == final_distance[pos] && t < *chosen)) {
            chosen = t;
            final_distance[pos] = best->second;
        }
    }
    for (std::size_t p = 0; p < n_pos; ++p) {
        const auto& mine = result.per_positioner_targets[p];
        if (mine.empty()) {
            result.unassigned_positioners.push_back(p);
        } else if (rule == FinalTargetRule::Random) {
            Rng rng(derive_seed(field.seed, p));
            result.final_target[p] = mine[rng() % mine.size()];
        }
    }
    return result;
}

Assignment allocate_targets(const HexArray& array, const TargetField& field, FinalTargetRule rule)
{
    return TargetAllocator(array).allocate(field, rule);
}

std::vector<std::optional<Pose>> assign_poses(const HexArray& array, const TargetField& field,
                                              const Assignment& assignment, Elbow elbow)
{
    std::vector<std::optional<Pose>> poses(array.size());
    for (std::size_t p = 0; p < array.size() && p < assignment.final_target.size(); ++p) {
        if (const auto& t = assignment.final_target[p]) {
            poses[p] = inverse_kinematics(array.geom(), array.centers()[p], field.points[*t], elbow);
        }
    }
    return poses;
}

NeighborIndex collision_neighbors(const HexArray& array, double threshold)
{
    return neighbor_pairs(array, 2.0 * array.geom().reach_max() + threshold);
}

CollisionCount count_collisions(const HexArray& array, const std::vector<std::optional<Pose>>& poses,
                                double threshold, DistanceKernel kernel)
{
    return count_collisions(array, collision_neighbors(array, threshold), poses, threshold, kernel);
}

CollisionCount count_collisions(const HexArray& array, const NeighborIndex& neighbors,
                                const std::vector<std::optional<Pose>>& poses, double threshold,
                                DistanceKernel kernel)
{
    if (!(threshold >= 0.0)) {
        throw InvalidParameter("collision threshold must be non-negative");
    }
    CollisionCount count;
    std::vector<std::optional<Segment>> arms(array.size());
    for (std::size_t p = 0; p < array.size() && p < poses.size(); ++p) {
        if (poses[p]) {
            arms[p] = eccentric_arm_segment(array.geom(), array.centers()[p], *poses[p]);
            ++count.assigned;
        }
    }
    std::vector<std::uint8_t> hit(array.size(), 0);
    for (const NeighborPair& pair : neighbors.pairs) {
        if (!arms[pair.i] || !arms[pair.j]) {
            continue;
        }
        ++count.candidate_pairs;
        if (early_exit_pair_distance(*arms[pair.i], *arms[pair.j], threshold, kernel).collides) {
            ++count.colliding_pairs;
            hit[pair.i] = 1;
            hit[pair.j] = 1;
        }
    }
    count.colliding_positioners = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), std::uint8_t{1}));
    return count;
}

VerdictComparison compare_verdicts(const HexArray& array, const NeighborIndex& neighbors,
                                   const std::vector<std::optional<Pose>>& poses, double threshold,
                                   DistanceKernel first, DistanceKernel second)
{
    VerdictComparison result;
    std::vector<std::optional<Segment>> arms(array.size());
    for (std::size_t p = 0; p < array.size() && p < poses.size(); ++p) {
        if (poses[p]) {
            arms[p] = eccentric_arm_segment(array.geom(), array.centers()[p], *poses[p]);
            ++result.second.assigned;
        }
    }
    std::vector<std::uint8_t> hit(array.size(), 0);
    for (const NeighborPair& pair : neighbors.pairs) {
        if (!arms[pair.i] || !arms[pair.j]) {
            continue;
        }
        ++result.pairs;
        ++result.second.candidate_pairs;
        const bool a = early_exit_pair_distance(*arms[pair.i], *arms[pair.j], threshold, first).collides;
        const bool b = early_exit_pair_distance(*arms[pair.i], *arms[pair.j], threshold, second).collides;
        if (a != b) {
            ++result.mismatches;
        }
        if (b) {
            ++result.second.colliding_pairs;
            hit[pair.i] = 1;
            hit[pair.j] = 1;
        }
    }
    result.second.colliding_positioners =
        static_cast<std::size_t>(std::count(hit.begin(), hit.end(), std::uint8_t{1}));
    return result;
}

WilsonInterval wilson_interval(double p_hat, std::size_t n, double z)
{
    if (n == 0) {
        throw InvalidParameter("Wilson interval needs n >= 1");
    }
    if (!(p_hat >= 0.0 && p_hat <= 1.0)) {
        throw InvalidParameter("proportion must lie in [0, 1]");
    }
    if (p_hat == 0.0) {
        // closed form; avoids a rounding residue in the lower bound
        const double z2 = z * z;
        return {0.0, z2 / (static_cast<double>(n) + z2)};
    }
    const double nn = static_cast<double>(n);
    const double z2 = z * z;
    const double scale = 1.0 / (1.0 + z2 / nn);
    const double mid = p_hat + z2 / (2.0 * nn);
    const double spread = z * std::sqrt(p_hat * (1.0 - p_hat) / nn + z2 / (4.0 * nn * nn));
    return {std::max(0.0, scale * (mid - spread)), std::min(1.0, scale * (mid + spread))};
}

void SimConfig::validate() const
{
    if (!(pitch > 0.0)) {
        throw InvalidParameter("pitch must be positive");
    }
    if (rings < 0) {
        throw InvalidParameter("rings must be non-negative");
    }
    safety.validate();
    if (iterations_max < 1) {
        throw InvalidParameter("iterations must be at least 1");
    }
    if (!(z > 0.0)) {
        throw InvalidParameter("z must be positive");
    }
    if (target_count < 1) {
        throw InvalidParameter("target count must be at least 1");
    }
    if (!(region_radius > 0.0)) {
        throw InvalidParameter("region radius must be positive");
    }
    if (kernel.kind == DistanceKernel::Kind::Discrete && kernel.samples < 2) {
        throw InvalidSampleCount("sample count must be at least 2");
    }
    if (cross_check && cross_check->kind == DistanceKernel::Kind::Discrete && cross_check->samples < 2) {
        throw InvalidSampleCount("sample count must be at least 2");
    }
    if (target_half_width && !(*target_half_width > 0.0)) {
        throw InvalidParameter("target half-width must be positive");
    }
}

HexArray SimConfig::array() const { return build_hex_array(pitch, rings, geom, safety); }

std::optional<std::string> region_warning(const SimConfig& config)
{
    const double extent = config.array().circumradius();
    if (config.region_radius > extent) {
        return std::nullopt;
    }
    std::ostringstream msg;
    msg << "target region radius " << config.region_radius << " mm does not exceed the array extent " << extent
        << " mm; outer positioners will see few or no targets";
    return msg.str();
}

IterationScene simulate_iteration(const SimConfig& config, const HexArray& array, const TargetAllocator& allocator,
                                  std::size_t k)
{
    IterationScene scene;
    scene.field = gen_targets(config.distribution, config.region_radius, config.target_count,
                              derive_seed(config.root_seed, k));
    scene.assignment = allocator.allocate(scene.field, config.final_target);
    scene.poses = assign_poses(array, scene.field, scene.assignment, config.elbow);
    return scene;
}

CollisionStats run_simulation(const SimConfig& config)
{
    config.validate();
    const HexArray array = config.array();
    const TargetAllocator allocator(array);
    const NeighborIndex neighbors = collision_neighbors(array, config.safety.threshold);
    const int threads = resolve_workers(config.workers);

    std::size_t colliding_positioners = 0;
    std::size_t colliding_pairs = 0;
    std::size_t assigned = 0;
    std::size_t candidates = 0;
    std::size_t check_pairs = 0;
    std::size_t check_mismatches = 0;
    std::size_t check_colliding = 0;
    std::size_t done = 0;
    const bool blocked = config.target_half_width || config.cancel != nullptr;
    const std::size_t block = blocked ? kEarlyStopBlock : config.iterations_max;

    while (done < config.iterations_max) {
        const std::size_t end = std::min(config.iterations_max, done + block);
        const auto first = static_cast<std::ptrdiff_t>(done);
        const auto last = static_cast<std::ptrdiff_t>(end);
#pragma omp parallel for num_threads(threads) schedule(dynamic, 8) \
    reduction(+ : colliding_positioners, colliding_pairs, assigned, candidates, check_pairs, check_mismatches, \
                  check_colliding)
        for (std::ptrdiff_t k = first; k < last; ++k) {
            const IterationScene scene = simulate_iteration(config, array, allocator, static_cast<std::size_t>(k));
            const CollisionCount c =
                count_collisions(array, neighbors, scene.poses, config.safety.threshold, config.kernel);
            colliding_positioners += c.colliding_positioners;
            colliding_pairs += c.colliding_pairs;
            assigned += c.assigned;
            candidates += c.candidate_pairs;
            if (config.cross_check) {
                const VerdictComparison v = compare_verdicts(array, neighbors, scene.poses, config.safety.threshold,
                                                             config.kernel, *config.cross_check);
                check_pairs += v.pairs;
                check_mismatches += v.mismatches;
                check_colliding += v.second.colliding_positioners;
            }
        }
        done = end;
        if (config.cancel != nullptr && config.cancel->load()) {
            break;
        }
        if (config.target_half_width) {
            const double p = assigned == 0 ? 0.0 : static_cast<double>(colliding_positioners) / assigned;
            if (wilson_interval(p, done, config.z).half_width() <= *config.target_half_width) {
                break;
            }
        }
    }

    CollisionStats stats;
    stats.iterations = done;
    stats.colliding_positioner_count = colliding_positioners;
    stats.colliding_pair_count = colliding_pairs;
    stats.assigned_positioner_count = assigned;
    stats.candidate_pair_count = candidates;
    stats.p_hat = assigned == 0 ? 0.0 : static_cast<double>(colliding_positioners) / static_cast<double>(assigned);
    stats.pair_proportion = candidates == 0 ? 0.0 : static_cast<double>(colliding_pairs) / static_cast<double>(candidates);
    stats.cross_check_pairs = check_pairs;
    stats.cross_check_mismatches = check_mismatches;
    stats.cross_check_p_hat =
        assigned == 0 ? 0.0 : static_cast<double>(check_colliding) / static_cast<double>(assigned);
    const WilsonInterval interval = wilson_interval(stats.p_hat, done, config.z);
    stats.wilson_lower = interval.lower;
    stats.wilson_upper = interval.upper;
    stats.reported = interval.center();
    return stats;
}

}  // namespace fieldsim
