#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fieldsim/array_model.hpp"
#include "fieldsim/geometry.hpp"

namespace fieldsim {

// UniformFixedCount: exactly `count` i.i.d. uniform points on the disk.
// PoissonProcess: homogeneous Poisson process with mean `count`.
// PoissonDisk: dart throwing with a minimum separation.
enum class Distribution { UniformFixedCount, PoissonProcess, PoissonDisk };

const char* to_string(Distribution distribution);
// Accepts "uniform", "poisson", "poisson-disk".
Distribution parse_distribution(const std::string& name);

inline constexpr double kPoissonDiskPacking = 0.75;
inline constexpr std::size_t kPoissonDiskAttemptsPerPoint = 30;

struct TargetField {
    std::vector<Vec2> points;
    Distribution distribution = Distribution::UniformFixedCount;
    double region_radius = 0.0;
    std::uint64_t seed = 0;
};

// Minimum separation used by PoissonDisk: radius * sqrt(0.75 / count).
double poisson_disk_spacing(double region_radius, std::size_t count);

// Number of points a PoissonProcess field with mean `count` holds for `seed`;
// the first draw of that field's stream.
std::size_t poisson_target_total(std::size_t count, std::uint64_t seed);

TargetField gen_targets(Distribution distribution, double region_radius, std::size_t count, std::uint64_t seed);

// Which assigned target a positioner finally points at: the one nearest its
// center, or one drawn uniformly from its assigned list.
enum class FinalTargetRule { Nearest, Random };

const char* to_string(FinalTargetRule rule);
// Accepts "nearest", "random".
FinalTargetRule parse_final_target_rule(const std::string& name);

struct Assignment {
    std::vector<std::vector<std::size_t>> per_positioner_targets;
    std::vector<std::optional<std::size_t>> final_target;
    std::vector<std::size_t> unassigned_positioners;

    std::size_t assigned_count() const;
};

// Reusable allocation state for one array: a bucket grid over positioner
// centers so each target only visits nearby positioners.
class TargetAllocator {
public:
    explicit TargetAllocator(const HexArray& array);

    // Targets are visited in order of distance to their nearest reachable
    // center (ties by index). Each goes to the reachable positioner with the
    // fewest targets so far, then the nearest, then the lowest index;
    // unreachable targets are dropped. The final target follows `rule`; the
    // Random rule draws from derive_seed(field.seed, positioner index).
    Assignment allocate(const TargetField& field, FinalTargetRule rule = FinalTargetRule::Nearest) const;

private:
    void reachable(Vec2 target, std::vector<std::pair<std::size_t, double>>& out) const;

    std::vector<Vec2> centers_;
    ArmGeometry geom_;
    double cell_;
    double origin_x_;
    double origin_y_;
    long long cols_;
    long long rows_;
    std::vector<std::vector<std::size_t>> buckets_;
};

Assignment allocate_targets(const HexArray& array, const TargetField& field,
                            FinalTargetRule rule = FinalTargetRule::Nearest);

std::vector<std::optional<Pose>> assign_poses(const HexArray& array, const TargetField& field,
                                              const Assignment& assignment, Elbow elbow = Elbow::Right);

struct CollisionCount {
    std::size_t colliding_positioners = 0;
    std::size_t colliding_pairs = 0;
    std::size_t assigned = 0;
    // Neighbor pairs in which both positioners hold a pose.
    std::size_t candidate_pairs = 0;
};

// Pairs farther apart than 2 reach_max + threshold can never collide.
NeighborIndex collision_neighbors(const HexArray& array, double threshold);

// A pair collides iff the eccentric-arm distance is below threshold; a
// positioner collides iff it is in at least one colliding pair.
CollisionCount count_collisions(const HexArray& array, const std::vector<std::optional<Pose>>& poses,
                                double threshold, DistanceKernel kernel = DistanceKernel::exact());
CollisionCount count_collisions(const HexArray& array, const NeighborIndex& neighbors,
                                const std::vector<std::optional<Pose>>& poses, double threshold,
                                DistanceKernel kernel = DistanceKernel::exact());

struct VerdictComparison {
    std::size_t pairs = 0;
    std::size_t mismatches = 0;
    // Tally under the second kernel.
    CollisionCount second;
};

// Evaluates every posed neighbor pair with both kernels and counts pairs whose
// collision verdicts differ.
VerdictComparison compare_verdicts(const HexArray& array, const NeighborIndex& neighbors,
                                   const std::vector<std::optional<Pose>>& poses, double threshold,
                                   DistanceKernel first, DistanceKernel second);

struct WilsonInterval {
    double lower;
    double upper;

    double half_width() const { return 0.5 * (upper - lower); }
    double center() const { return 0.5 * (lower + upper); }
};

// Wilson score interval, clamped to [0, 1]. Throws InvalidParameter for n = 0.
WilsonInterval wilson_interval(double p_hat, std::size_t n, double z);

struct SimConfig {
    double pitch = 25.6;
    int rings = 2;
    ArmGeometry geom{8.25, 8.25};
    SafetyModel safety{};
    std::size_t iterations_max = 6000;
    double z = 1.96;
    std::size_t target_count = 20000;
    double region_radius = 76.8;
    Distribution distribution = Distribution::UniformFixedCount;
    std::uint64_t root_seed = 0;
    Elbow elbow = Elbow::Right;
    FinalTargetRule final_target = FinalTargetRule::Random;
    DistanceKernel kernel = DistanceKernel::exact();
    // 0 = all hardware threads. Results do not depend on this value.
    int workers = 0;
    // Stop early once the Wilson half-width drops to this value, checked
    // after every block of iterations.
    std::optional<double> target_half_width;
    // Second kernel evaluated on the same scenes; fills the cross_check_* stats.
    std::optional<DistanceKernel> cross_check;
    // Polled between blocks of iterations; a run stops early once it reads true.
    const std::atomic<bool>* cancel = nullptr;

    // Throws InvalidParameter.
    void validate() const;
    HexArray array() const;
};

inline constexpr std::size_t kEarlyStopBlock = 100;

// Message when the target disk does not reach past the array, else empty.
std::optional<std::string> region_warning(const SimConfig& config);

struct CollisionStats {
    double p_hat = 0.0;
    double wilson_lower = 0.0;
    double wilson_upper = 0.0;
    double reported = 0.0;
    std::size_t iterations = 0;
    std::size_t colliding_pair_count = 0;
    std::size_t colliding_positioner_count = 0;
    std::size_t assigned_positioner_count = 0;
    std::size_t candidate_pair_count = 0;
    // colliding pairs / candidate pairs, for comparison with p_hat.
    double pair_proportion = 0.0;
    std::size_t cross_check_pairs = 0;
    std::size_t cross_check_mismatches = 0;
    // p_hat under the cross-check kernel.
    double cross_check_p_hat = 0.0;

    friend bool operator==(const CollisionStats&, const CollisionStats&) = default;
};

// Iteration k draws its targets from derive_seed(root_seed, k). p_hat pools
// colliding over assigned positioners across iterations; the interval uses
// n = iterations.
CollisionStats run_simulation(const SimConfig& config);

// Same pipeline for one iteration, exposed for corpus collection and tests.
struct IterationScene {
    TargetField field;
    Assignment assignment;
    std::vector<std::optional<Pose>> poses;
};
IterationScene simulate_iteration(const SimConfig& config, const HexArray& array, const TargetAllocator& allocator,
                                  std::size_t k);

}  // namespace fieldsim
