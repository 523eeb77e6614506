#include "fieldsim/array_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "fieldsim/errors.hpp"

namespace fieldsim {

namespace {

struct Axial {
    int q;
    int r;
};

constexpr Axial kDirections[6] = {{1, 0}, {1, -1}, {0, -1}, {-1, 0}, {-1, 1}, {0, 1}};

Vec2 axial_to_point(Axial a, double pitch)
{
    return {pitch * (a.q + 0.5 * a.r), pitch * (std::sqrt(3.0) / 2.0) * a.r};
}

}  // namespace

HexArray::HexArray(double pitch, int rings, ArmGeometry geom, SafetyModel safety)
    : pitch_(pitch), rings_(rings), geom_(geom), safety_(safety)
{
    if (!(pitch > 0.0)) {
        throw InvalidParameter("pitch must be positive");
    }
    if (rings < 0) {
        throw InvalidParameter("rings must be non-negative");
    }
    safety_.validate();
    centers_.reserve(hex_count(rings));
    centers_.push_back({0.0, 0.0});
    for (int k = 1; k <= rings; ++k) {
        Axial cur{kDirections[4].q * k, kDirections[4].r * k};
        for (const Axial dir : kDirections) {
            for (int step = 0; step < k; ++step) {
                centers_.push_back(axial_to_point(cur, pitch));
                cur.q += dir.q;
                cur.r += dir.r;
            }
        }
    }
}

double HexArray::circumradius() const
{
    double far = 0.0;
    for (const Vec2 c : centers_) {
        far = std::max(far, norm(c));
    }
    return far + geom_.reach_max();
}

HexArray build_hex_array(double pitch, int rings, const ArmGeometry& geom, const SafetyModel& safety)
{
    return HexArray(pitch, rings, geom, safety);
}

int rings_for_count(std::size_t count)
{
    int rings = 0;
    while (hex_count(rings) < count) {
        ++rings;
    }
    return rings;
}

NeighborIndex neighbor_pairs(const std::vector<Vec2>& centers, double cutoff)
{
    if (!(cutoff > 0.0)) {
        throw InvalidParameter("neighbor cutoff must be positive");
    }
    NeighborIndex index;
    index.cutoff = cutoff;

    // Uniform grid with cell = cutoff; candidates live in the 3x3 block.
    auto cell_of = [cutoff](Vec2 p) {
        return std::pair<long long, long long>{static_cast<long long>(std::floor(p.x / cutoff)),
                                               static_cast<long long>(std::floor(p.y / cutoff))};
    };
    std::map<std::pair<long long, long long>, std::vector<std::size_t>> grid;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        grid[cell_of(centers[i])].push_back(i);
    }
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const auto [cx, cy] = cell_of(centers[i]);
        for (long long dx = -1; dx <= 1; ++dx) {
            for (long long dy = -1; dy <= 1; ++dy) {
                const auto it = grid.find({cx + dx, cy + dy});
                if (it == grid.end()) {
                    continue;
                }
                for (const std::size_t j : it->second) {
                    if (j <= i) {
                        continue;
                    }
                    const double dist = distance(centers[i], centers[j]);
                    if (dist <= cutoff) {
                        index.pairs.push_back({i, j, dist});
                    }
                }
            }
        }
    }
    std::sort(index.pairs.begin(), index.pairs.end(), [](const NeighborPair& a, const NeighborPair& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    return index;
}

NeighborIndex neighbor_pairs(const HexArray& array, double cutoff) { return neighbor_pairs(array.centers(), cutoff); }

NeighborIndex neighbor_pairs(const HexArray& array)
{
    return neighbor_pairs(array, 2.0 * (array.geom().reach_max() + array.safety().d));
}

const char* to_string(InteractionType type)
{
    switch (type) {
    case InteractionType::Type1:
        return "Type1";
    case InteractionType::Type2:
        return "Type2";
    case InteractionType::Type3:
        return "Type3";
    }
    return "?";
}

InteractionType classify_interaction(const ArmGeometry& geom, const SafetyModel& safety, double pitch)
{
    if (!(pitch > 0.0)) {
        throw InvalidParameter("pitch must be positive");
    }
    const double reach = 2.0 * (geom.reach_max() + safety.d);
    if (pitch >= reach) {
        return InteractionType::Type1;
    }
    if (2.0 * pitch >= reach) {
        return InteractionType::Type2;
    }
    return InteractionType::Type3;
}

std::vector<LatticeClass> lattice_neighbor_classes(double pitch, double cutoff)
{
    if (!(pitch > 0.0)) {
        throw InvalidParameter("pitch must be positive");
    }
    if (!(cutoff > 0.0)) {
        throw InvalidParameter("cutoff must be positive");
    }
    // |i a1 + j a2| >= pitch * max(|i|, |j|) * sqrt(3)/2, so this bound is loose enough.
    const int bound = static_cast<int>(std::ceil(cutoff / pitch * 2.0 / std::sqrt(3.0))) + 1;
    std::map<long long, int> counts;
    for (int i = -bound; i <= bound; ++i) {
        for (int j = -bound; j <= bound; ++j) {
            const long long n = static_cast<long long>(i) * i + static_cast<long long>(i) * j
                                + static_cast<long long>(j) * j;
            if (n == 0) {
                continue;
            }
            if (pitch * std::sqrt(static_cast<double>(n)) <= cutoff) {
                ++counts[n];
            }
        }
    }
    std::vector<LatticeClass> classes;
    classes.reserve(counts.size());
    for (const auto& [n, mult] : counts) {
        classes.push_back({pitch * std::sqrt(static_cast<double>(n)), mult, n});
    }
    return classes;
}

int coverage_multiplicity(const HexArray& array, Vec2 p)
{
    int count = 0;
    for (const Vec2 c : array.centers()) {
        if (is_reachable(array.geom(), distance(p, c))) {
            ++count;
        }
    }
    return count;
}

}  // namespace fieldsim
