#pragma once

#include <vector>

#include "fieldsim/array_model.hpp"
#include "fieldsim/geometry.hpp"

namespace fieldsim {

// ThinRing: pi (r_outer^2 - r_inner^2).
// FullPatrol: the inflated patrol annulus pi ((l1+l2+d)^2 - max(0, l2-l1-d)^2).
enum class CoverMode { ThinRing, FullPatrol };

const char* to_string(CoverMode mode);

struct RingRadii {
    double inner;
    double outer;
};

// Inner and outer radius of the motion ring, clamped at zero.
RingRadii ring_radii(const ArmGeometry& geom, const SafetyModel& safety);

double s_cover(const ArmGeometry& geom, const SafetyModel& safety, CoverMode mode = CoverMode::ThinRing);

// d (l2 + d) max(0, (l1 + l2 - D/2) / (l2/2)) for neighbors D apart.
double s_collision(const ArmGeometry& geom, const SafetyModel& safety, double center_distance);

// Area where the inflated patrol annuli of two positioners D apart overlap.
double s_conflict(const ArmGeometry& geom, const SafetyModel& safety, double center_distance);

// Area of the intersection of two disks with centers `d` apart.
double disk_intersection_area(double r1, double r2, double d);

struct ClassTerm {
    double distance;
    int multiplicity;
    double s_conflict;
    double s_collision;
    // multiplicity * s_conflict * s_collision / s_cover^2
    double contribution;
};

struct AnalyticAreas {
    double s_cover = 0.0;
    std::vector<ClassTerm> classes;
    double r_inner = 0.0;
    double r_outer = 0.0;
};

struct AnalyticResult {
    double probability = 0.0;
    double probability_clamped = 0.0;
    AnalyticAreas areas;
    InteractionType interaction = InteractionType::Type1;
    CoverMode mode = CoverMode::ThinRing;
};

// Sums the per-neighbor product of conflict and collision ratios over every
// lattice distance class below 2 (l1 + l2 + d). Throws DegenerateCover when the
// cover area vanishes under a nonzero numerator.
AnalyticResult collision_probability_analytic(const ArmGeometry& geom, const SafetyModel& safety, double pitch,
                                              CoverMode mode = CoverMode::ThinRing);

}  // namespace fieldsim
