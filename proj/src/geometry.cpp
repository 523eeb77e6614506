#include "fieldsim/geometry.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <tuple>
#include <vector>

#include "fieldsim/errors.hpp"

namespace fieldsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Orders the pair so that kernels see the same operands regardless of call order.
bool canonical_first(const Segment& s1, const Segment& s2)
{
    return std::tie(s1.a.x, s1.a.y, s1.b.x, s1.b.y) <= std::tie(s2.a.x, s2.a.y, s2.b.x, s2.b.y);
}

double orientation(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

bool within_box(Vec2 a, Vec2 b, Vec2 p)
{
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y
           && p.y <= std::max(a.y, b.y);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

Vec2 sample_point(const Segment& s, int i, int n)
{
    if (i == n) {
        return s.b;
    }
    const double t = static_cast<double>(i) / static_cast<double>(n);
    return s.a + t * (s.b - s.a);
}

double discrete_min_sq(const Segment& s1, const Segment& s2, int n, Vec2* scratch)
{
    for (int j = 0; j <= n; ++j) {
        scratch[j] = sample_point(s2, j, n);
    }
    double best = norm_sq(s1.a - scratch[0]);
    for (int i = 0; i <= n; ++i) {
        const Vec2 p = sample_point(s1, i, n);
        for (int j = 0; j <= n; ++j) {
            const double dx = p.x - scratch[j].x;
            const double dy = p.y - scratch[j].y;
            const double d2 = dx * dx + dy * dy;
            best = d2 < best ? d2 : best;
        }
    }
    return best;
}

}  // namespace

double normalize_angle(double angle)
{
    double wrapped = std::fmod(angle, kTwoPi);
    if (wrapped < 0.0) {
        wrapped += kTwoPi;
    }
    // fmod of a tiny negative value can round up to exactly 2*pi.
    if (wrapped >= kTwoPi) {
        wrapped = 0.0;
    }
    return wrapped;
}

ArmGeometry::ArmGeometry(double l1, double l2) : l1_(l1), l2_(l2)
{
    if (!(l1 > 0.0) || !(l2 > 0.0)) {
        throw InvalidParameter("arm lengths must be positive");
    }
    if (l2 < l1) {
        throw InvalidParameter("arm ratio l2/l1 must be at least 1");
    }
}

ArmGeometry ArmGeometry::from_ratio(double l1, double ratio) { return ArmGeometry(l1, l1 * ratio); }

void SafetyModel::validate() const
{
    if (!(d >= 0.0)) {
        throw InvalidParameter("safety radius d must be non-negative");
    }
    if (!(threshold >= 0.0)) {
        throw InvalidParameter("collision threshold must be non-negative");
    }
    if (!(delta_theta >= 0.0)) {
        throw InvalidParameter("delta_theta must be non-negative");
    }
}

Pose Pose::normalized(double theta, double phi) { return {normalize_angle(theta), normalize_angle(phi)}; }

Vec2 forward_kinematics(const ArmGeometry& geom, Vec2 center, Pose pose)
{
    return center + geom.l1() * unit_at(pose.theta) + geom.l2() * unit_at(pose.theta + pose.phi);
}

bool is_reachable(const ArmGeometry& geom, double center_distance)
{
    return geom.reach_min() <= center_distance && center_distance <= geom.reach_max();
}

Pose inverse_kinematics(const ArmGeometry& geom, Vec2 center, Vec2 target, Elbow elbow)
{
    const Vec2 offset = target - center;
    const double r = norm(offset);
    if (!is_reachable(geom, r)) {
        throw OutOfReach("target at distance " + std::to_string(r) + " mm outside patrol annulus ["
                         + std::to_string(geom.reach_min()) + ", " + std::to_string(geom.reach_max()) + "]");
    }
    const double l1 = geom.l1();
    const double l2 = geom.l2();
    if (r == 0.0) {
        return {0.0, std::numbers::pi};
    }
    const double cos_phi = std::clamp((r * r - l1 * l1 - l2 * l2) / (2.0 * l1 * l2), -1.0, 1.0);
    double phi = std::acos(cos_phi);
    if (elbow == Elbow::Left) {
        phi = -phi;
    }
    const double bearing = std::atan2(offset.y, offset.x);
    const double theta = bearing - std::atan2(l2 * std::sin(phi), l1 + l2 * std::cos(phi));
    return Pose::normalized(theta, phi);
}

Segment eccentric_arm_segment(const ArmGeometry& geom, Vec2 center, Pose pose)
{
    const Vec2 elbow = center + geom.l1() * unit_at(pose.theta);
    return {elbow, elbow + geom.l2() * unit_at(pose.theta + pose.phi)};
}

double max_displacement(const ArmGeometry& geom, const SafetyModel& safety)
{
    if (!(safety.delta_theta >= 0.0) || safety.delta_theta > std::numbers::pi / 4.0) {
        throw InvalidParameter("delta_theta must lie in [0, pi/4]");
    }
    if (safety.delta_theta == 0.0) {
        return 0.0;
    }
    return geom.reach_max() * std::sin(2.0 * safety.delta_theta);
}

double min_safe_distance(const ArmGeometry& geom, const SafetyModel& safety)
{
    return max_displacement(geom, safety) + 2.0 * safety.d;
}

double point_segment_distance(Vec2 p, const Segment& s)
{
    const Vec2 dir = s.b - s.a;
    const double len_sq = norm_sq(dir);
    if (len_sq == 0.0) {
        return distance(p, s.a);
    }
    const double t = dot(p - s.a, dir) / len_sq;
    if (t <= 0.0) {
        return distance(p, s.a);
    }
    if (t >= 1.0) {
        return distance(p, s.b);
    }
    return distance(p, s.a + t * dir);
}

bool segments_intersect(const Segment& s1, const Segment& s2)
{
    const int o1 = sign(orientation(s1.a, s1.b, s2.a));
    const int o2 = sign(orientation(s1.a, s1.b, s2.b));
    const int o3 = sign(orientation(s2.a, s2.b, s1.a));
    const int o4 = sign(orientation(s2.a, s2.b, s1.b));
    if (o1 * o2 < 0 && o3 * o4 < 0) {
        return true;
    }
    // Touching or collinear overlap.
    return (o1 == 0 && within_box(s1.a, s1.b, s2.a)) || (o2 == 0 && within_box(s1.a, s1.b, s2.b))
           || (o3 == 0 && within_box(s2.a, s2.b, s1.a)) || (o4 == 0 && within_box(s2.a, s2.b, s1.b));
}

double segment_min_distance_exact(const Segment& s1, const Segment& s2)
{
    const Segment& u = canonical_first(s1, s2) ? s1 : s2;
    const Segment& v = canonical_first(s1, s2) ? s2 : s1;
    if (segments_intersect(u, v)) {
        return 0.0;
    }
    return std::min({point_segment_distance(u.a, v), point_segment_distance(u.b, v), point_segment_distance(v.a, u),
                     point_segment_distance(v.b, u)});
}

double segment_min_distance_discrete(const Segment& s1, const Segment& s2, int n)
{
    if (n < 2) {
        throw InvalidSampleCount("sample count must be at least 2, got " + std::to_string(n));
    }
    const Segment& u = canonical_first(s1, s2) ? s1 : s2;
    const Segment& v = canonical_first(s1, s2) ? s2 : s1;
    constexpr int kStackSamples = 256;
    if (n < kStackSamples) {
        std::array<Vec2, kStackSamples> scratch;
        return std::sqrt(discrete_min_sq(u, v, n, scratch.data()));
    }
    std::vector<Vec2> scratch(static_cast<std::size_t>(n) + 1);
    return std::sqrt(discrete_min_sq(u, v, n, scratch.data()));
}

std::string to_string(const DistanceKernel& kernel)
{
    if (kernel.kind == DistanceKernel::Kind::Exact) {
        return "exact";
    }
    return "discrete(" + std::to_string(kernel.samples) + ")";
}

}  // namespace fieldsim
