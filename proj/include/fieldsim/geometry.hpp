#pragma once

#include <cmath>
#include <numbers>
#include <string>

namespace fieldsim {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
    friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
constexpr double norm_sq(Vec2 v) { return dot(v, v); }
inline double norm(Vec2 v) { return std::sqrt(norm_sq(v)); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 unit_at(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Wraps an angle into [0, 2*pi).
double normalize_angle(double angle);

// Central (l1) and eccentric (l2) arm lengths of a theta-phi positioner, mm.
class ArmGeometry {
public:
    // Throws InvalidParameter unless l1 > 0, l2 > 0 and l2 / l1 >= 1.
    ArmGeometry(double l1, double l2);

    static ArmGeometry from_ratio(double l1, double ratio);

    double l1() const { return l1_; }
    double l2() const { return l2_; }
    double ratio() const { return l2_ / l1_; }
    double reach_max() const { return l1_ + l2_; }
    double reach_min() const { return std::abs(l2_ - l1_); }

private:
    double l1_;
    double l2_;
};

// Safety radius d around the eccentric arm line, per-step rotation bound and
// the pairwise detection threshold. d and threshold are independent settings;
// min_safe_distance() derives MD + 2d but is never substituted for threshold.
struct SafetyModel {
    double d = 4.5;
    double delta_theta = 0.0;
    double threshold = 4.5;

    // Throws InvalidParameter for negative fields.
    void validate() const;
};

struct Pose {
    double theta = 0.0;
    double phi = 0.0;

    // Both angles wrapped into [0, 2*pi).
    static Pose normalized(double theta, double phi);
};

struct Segment {
    Vec2 a;
    Vec2 b;

    double length() const { return distance(a, b); }
};

enum class Elbow { Left, Right };

Vec2 forward_kinematics(const ArmGeometry& geom, Vec2 center, Pose pose);

// Right selects phi in [0, pi], Left its mirror. Folded equal arms at the
// center return theta = 0, phi = pi. Throws OutOfReach outside the annulus.
Pose inverse_kinematics(const ArmGeometry& geom, Vec2 center, Vec2 target, Elbow elbow = Elbow::Right);

bool is_reachable(const ArmGeometry& geom, double center_distance);

// Elbow point to fiber tip.
Segment eccentric_arm_segment(const ArmGeometry& geom, Vec2 center, Pose pose);

// (l1 + l2) sin(2 delta_theta); requires delta_theta in [0, pi/4].
double max_displacement(const ArmGeometry& geom, const SafetyModel& safety);

// max_displacement + 2d.
double min_safe_distance(const ArmGeometry& geom, const SafetyModel& safety);

double point_segment_distance(Vec2 p, const Segment& s);

bool segments_intersect(const Segment& s1, const Segment& s2);

// True minimum distance between closed segments; symmetric bit-for-bit.
double segment_min_distance_exact(const Segment& s1, const Segment& s2);

inline constexpr int kDefaultSamples = 64;

// Minimum over the (n+1) x (n+1) equally spaced sample points of the two
// segments. Never below the exact distance. Throws InvalidSampleCount for n < 2.
double segment_min_distance_discrete(const Segment& s1, const Segment& s2, int n = kDefaultSamples);

// Selects between the exact kernel and the n-sample discretized kernel.
struct DistanceKernel {
    enum class Kind { Exact, Discrete };

    Kind kind = Kind::Exact;
    int samples = kDefaultSamples;

    static DistanceKernel exact() { return {Kind::Exact, kDefaultSamples}; }
    static DistanceKernel discrete(int n = kDefaultSamples) { return {Kind::Discrete, n}; }

    double operator()(const Segment& s1, const Segment& s2) const
    {
        return kind == Kind::Exact ? segment_min_distance_exact(s1, s2) : segment_min_distance_discrete(s1, s2, samples);
    }

    friend bool operator==(const DistanceKernel&, const DistanceKernel&) = default;
};

// "exact" or "discrete(n)".
std::string to_string(const DistanceKernel& kernel);

}  // namespace fieldsim
