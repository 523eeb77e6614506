#pragma once

#include <cstddef>
#include <vector>

#include "fieldsim/geometry.hpp"

namespace fieldsim {

// Positioners on a hexagonal lattice, one lattice vector along +x. Centers are
// enumerated ring by ring from the origin in a fixed spiral order.
class HexArray {
public:
    HexArray(double pitch, int rings, ArmGeometry geom, SafetyModel safety);

    double pitch() const { return pitch_; }
    int rings() const { return rings_; }
    const std::vector<Vec2>& centers() const { return centers_; }
    std::size_t size() const { return centers_.size(); }
    const ArmGeometry& geom() const { return geom_; }
    const SafetyModel& safety() const { return safety_; }

    // Farthest center from the origin plus the outer reach.
    double circumradius() const;

private:
    double pitch_;
    int rings_;
    std::vector<Vec2> centers_;
    ArmGeometry geom_;
    SafetyModel safety_;
};

HexArray build_hex_array(double pitch, int rings, const ArmGeometry& geom, const SafetyModel& safety);

constexpr std::size_t hex_count(int rings)
{
    return 3 * static_cast<std::size_t>(rings) * static_cast<std::size_t>(rings + 1) + 1;
}

// Smallest ring count whose array holds at least `count` positioners.
int rings_for_count(std::size_t count);

struct NeighborPair {
    std::size_t i;
    std::size_t j;
    double distance;
};

struct NeighborIndex {
    std::vector<NeighborPair> pairs;
    double cutoff = 0.0;
};

// Unordered pairs (i < j) with center distance <= cutoff, sorted by (i, j).
NeighborIndex neighbor_pairs(const std::vector<Vec2>& centers, double cutoff);
NeighborIndex neighbor_pairs(const HexArray& array, double cutoff);
// Cutoff 2 (l1 + l2 + d), the largest distance at which inflated patrol disks touch.
NeighborIndex neighbor_pairs(const HexArray& array);

enum class InteractionType { Type1 = 1, Type2 = 2, Type3 = 3 };

const char* to_string(InteractionType type);

// Boundary equalities fall to the lower-numbered type.
InteractionType classify_interaction(const ArmGeometry& geom, const SafetyModel& safety, double pitch);

struct LatticeClass {
    double distance;
    int multiplicity;
    // i^2 + ij + j^2 for lattice vector i a1 + j a2; distance = pitch sqrt(norm).
    long long norm;
};

// Distinct center distances of the infinite lattice in (0, cutoff] with their
// coordination numbers, ascending.
std::vector<LatticeClass> lattice_neighbor_classes(double pitch, double cutoff);

// Positioners whose uninflated patrol annulus contains p.
int coverage_multiplicity(const HexArray& array, Vec2 p);

}  // namespace fieldsim
