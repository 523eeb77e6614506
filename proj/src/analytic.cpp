#include "fieldsim/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fieldsim/errors.hpp"

namespace fieldsim {

namespace {

constexpr double kPi = std::numbers::pi;

double patrol_outer(const ArmGeometry& geom, const SafetyModel& safety) { return geom.reach_max() + safety.d; }

double patrol_inner(const ArmGeometry& geom, const SafetyModel& safety)
{
    return std::max(0.0, geom.l2() - geom.l1() - safety.d);
}

}  // namespace

const char* to_string(CoverMode mode)
{
    return mode == CoverMode::ThinRing ? "ring" : "full";
}

RingRadii ring_radii(const ArmGeometry& geom, const SafetyModel& safety)
{
    const double offset = geom.l2() - geom.l1();
    return {std::max(0.0, offset - safety.d), std::max(0.0, offset + safety.d)};
}

double s_cover(const ArmGeometry& geom, const SafetyModel& safety, CoverMode mode)
{
    if (mode == CoverMode::ThinRing) {
        const RingRadii radii = ring_radii(geom, safety);
        return kPi * (radii.outer * radii.outer - radii.inner * radii.inner);
    }
    const double outer = patrol_outer(geom, safety);
    const double inner = patrol_inner(geom, safety);
    return kPi * (outer * outer - inner * inner);
}

double s_collision(const ArmGeometry& geom, const SafetyModel& safety, double center_distance)
{
    if (!(center_distance > 0.0)) {
        throw InvalidParameter("center distance must be positive");
    }
    const double overlap = (geom.reach_max() - center_distance / 2.0) / (geom.l2() / 2.0);
    return safety.d * (geom.l2() + safety.d) * std::max(0.0, overlap);
}

double disk_intersection_area(double r1, double r2, double d)
{
    if (r1 <= 0.0 || r2 <= 0.0 || d >= r1 + r2) {
        return 0.0;
    }
    const double small = std::min(r1, r2);
    if (d <= std::abs(r1 - r2)) {
        return kPi * small * small;
    }
    const double c1 = std::clamp((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1), -1.0, 1.0);
    const double c2 = std::clamp((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2), -1.0, 1.0);
    const double kite = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
    return r1 * r1 * std::acos(c1) + r2 * r2 * std::acos(c2) - 0.5 * std::sqrt(std::max(0.0, kite));
}

double s_conflict(const ArmGeometry& geom, const SafetyModel& safety, double center_distance)
{
    if (!(center_distance >= 0.0)) {
        throw InvalidParameter("center distance must be non-negative");
    }
    const double outer = patrol_outer(geom, safety);
    const double inner = patrol_inner(geom, safety);
    if (center_distance >= 2.0 * outer) {
        return 0.0;
    }
    // (D1 \ h1) & (D2 \ h2) with h inside D: inclusion-exclusion over the four disk pairs.
    const double area = disk_intersection_area(outer, outer, center_distance)
                        - 2.0 * disk_intersection_area(outer, inner, center_distance)
                        + disk_intersection_area(inner, inner, center_distance);
    return std::max(0.0, area);
}

AnalyticResult collision_probability_analytic(const ArmGeometry& geom, const SafetyModel& safety, double pitch,
                                              CoverMode mode)
{
    safety.validate();
    AnalyticResult result;
    result.mode = mode;
    result.interaction = classify_interaction(geom, safety, pitch);
    const RingRadii radii = ring_radii(geom, safety);
    result.areas.r_inner = radii.inner;
    result.areas.r_outer = radii.outer;
    result.areas.s_cover = s_cover(geom, safety, mode);
    if (result.interaction == InteractionType::Type1) {
        return result;
    }

    const double reach = 2.0 * patrol_outer(geom, safety);
    const double cover = result.areas.s_cover;
    double total = 0.0;
    for (const LatticeClass& cls : lattice_neighbor_classes(pitch, reach)) {
        ClassTerm term{cls.distance, cls.multiplicity, s_conflict(geom, safety, cls.distance),
                       s_collision(geom, safety, cls.distance), 0.0};
        if (cover == 0.0) {
            if (term.s_conflict > 0.0 || term.s_collision > 0.0) {
                throw DegenerateCover("cover area is zero while conflict/collision areas are not; "
                                      "use the full-patrol cover mode");
            }
        } else {
            term.contribution = cls.multiplicity * (term.s_conflict / cover) * (term.s_collision / cover);
        }
        total += term.contribution;
        result.areas.classes.push_back(term);
    }
    result.probability = total;
    result.probability_clamped = std::clamp(total, 0.0, 1.0);
    return result;
}

}  // namespace fieldsim
