#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <tuple>
#include <vector>

#include "fieldsim/array_model.hpp"
#include "fieldsim/errors.hpp"
#include "fieldsim/rng.hpp"

using namespace fieldsim;

namespace {

const ArmGeometry kEqual(8.25, 8.25);
const SafetyModel kSafety{};

std::set<std::tuple<std::size_t, std::size_t>> brute_pairs(const std::vector<Vec2>& c, double cutoff)
{
    std::set<std::tuple<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t j = i + 1; j < c.size(); ++j) {
            if (distance(c[i], c[j]) <= cutoff) {
                out.emplace(i, j);
            }
        }
    }
    return out;
}

std::set<std::tuple<std::size_t, std::size_t>> as_set(const NeighborIndex& idx)
{
    std::set<std::tuple<std::size_t, std::size_t>> out;
    for (const NeighborPair& p : idx.pairs) {
        out.emplace(p.i, p.j);
    }
    return out;
}

}  // namespace

TEST_CASE("centered hexagonal counts")
{
    CHECK(build_hex_array(25.6, 0, kEqual, kSafety).size() == 1);
    CHECK(build_hex_array(25.6, 2, kEqual, kSafety).size() == 19);
    CHECK(build_hex_array(25.6, 12, kEqual, kSafety).size() == 469);
    for (int k = 0; k <= 20; ++k) {
        const HexArray a = build_hex_array(10.0, k, kEqual, kSafety);
        REQUIRE(a.size() == static_cast<std::size_t>(3 * k * (k + 1) + 1));
        REQUIRE(a.size() == hex_count(k));
    }
    CHECK(rings_for_count(1) == 0);
    CHECK(rings_for_count(7) == 1);
    CHECK(rings_for_count(8) == 2);
    CHECK(rings_for_count(4000) == 37);
    CHECK_THROWS_AS(build_hex_array(0.0, 2, kEqual, kSafety), InvalidParameter);
    CHECK_THROWS_AS(build_hex_array(-1.0, 2, kEqual, kSafety), InvalidParameter);
}

TEST_CASE("lattice geometry")
{
    const HexArray a = build_hex_array(25.6, 5, kEqual, kSafety);
    CHECK(a.centers().front() == Vec2{0, 0});
    // nearest neighbours sit exactly one pitch apart, nothing closer
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            const double dij = distance(a.centers()[i], a.centers()[j]);
            REQUIRE(dij > 25.6 - 1e-9);
            if (dij < 25.6 * 1.01) {
                REQUIRE(std::abs(dij - 25.6) < 1e-9);
            }
        }
    }
    // deterministic order
    const HexArray b = build_hex_array(25.6, 5, kEqual, kSafety);
    CHECK(a.centers() == b.centers());
    // a lattice vector along +x
    CHECK(std::any_of(a.centers().begin(), a.centers().end(), [](Vec2 c) {
        return std::abs(c.x - 25.6) < 1e-12 && std::abs(c.y) < 1e-12;
    }));
}

TEST_CASE("neighbor pair examples")
{
    const HexArray one = build_hex_array(10.0, 1, kEqual, kSafety);
    CHECK(neighbor_pairs(one, 15.0).pairs.size() == 12);
    CHECK(neighbor_pairs(one, 9.99).pairs.empty());

    const HexArray two = build_hex_array(10.0, 2, kEqual, kSafety);
    const NeighborIndex idx = neighbor_pairs(two, 21.0);
    CHECK(as_set(idx) == brute_pairs(two.centers(), 21.0));
    CHECK(idx.pairs.size() == brute_pairs(two.centers(), 21.0).size());
    for (const NeighborPair& p : idx.pairs) {
        CHECK(p.i < p.j);
        CHECK(p.distance == doctest::Approx(distance(two.centers()[p.i], two.centers()[p.j])));
    }
    CHECK(std::is_sorted(idx.pairs.begin(), idx.pairs.end(),
                         [](const NeighborPair& x, const NeighborPair& y) {
                             return std::tie(x.i, x.j) < std::tie(y.i, y.j);
                         }));

    const NeighborIndex dflt = neighbor_pairs(two);
    CHECK(dflt.cutoff == doctest::Approx(2 * (8.25 + 8.25 + 4.5)));
}

TEST_CASE("neighbor pairs match brute force on random clouds and are permutation invariant")
{
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Vec2> pts(300);
        for (Vec2& p : pts) {
            p = {200 * uniform01(rng) - 100, 200 * uniform01(rng) - 100};
        }
        const double cutoff = 1.0 + 30.0 * uniform01(rng);
        const NeighborIndex idx = neighbor_pairs(pts, cutoff);
        REQUIRE(as_set(idx) == brute_pairs(pts, cutoff));
        REQUIRE(idx.pairs.size() == as_set(idx).size());

        std::vector<std::size_t> perm(pts.size());
        for (std::size_t i = 0; i < perm.size(); ++i) {
            perm[i] = i;
        }
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<Vec2> shuffled(pts.size());
        for (std::size_t i = 0; i < perm.size(); ++i) {
            shuffled[i] = pts[perm[i]];
        }
        std::set<std::tuple<std::size_t, std::size_t>> mapped;
        for (const NeighborPair& p : neighbor_pairs(shuffled, cutoff).pairs) {
            mapped.emplace(std::min(perm[p.i], perm[p.j]), std::max(perm[p.i], perm[p.j]));
        }
        REQUIRE(mapped == as_set(idx));
    }
}

TEST_CASE("interaction classification")
{
    CHECK(classify_interaction(kEqual, kSafety, 50.0) == InteractionType::Type1);
    CHECK(classify_interaction(kEqual, kSafety, 25.6) == InteractionType::Type2);
    CHECK(classify_interaction(ArmGeometry(8.25, 24.75), kSafety, 25.6) == InteractionType::Type3);
    // boundaries go to the safer type
    CHECK(classify_interaction(kEqual, kSafety, 42.0) == InteractionType::Type1);
    CHECK(classify_interaction(kEqual, kSafety, 21.0) == InteractionType::Type2);

    // monotone in pitch
    for (const double ratio : {1.0, 1.5, 2.0, 3.0}) {
        const ArmGeometry g = ArmGeometry::from_ratio(8.25, ratio);
        int previous = 3;
        for (double pitch = 1.0; pitch < 120.0; pitch += 0.25) {
            const int t = static_cast<int>(classify_interaction(g, kSafety, pitch));
            REQUIRE(t <= previous);
            previous = t;
        }
    }
    CHECK(std::string(to_string(InteractionType::Type2)) == "Type2");
}

TEST_CASE("type 1 arrays never come within the threshold")
{
    Rng rng(23);
    const double pitch = 2 * (8.25 + 8.25 + 4.5) + 0.5;
    const HexArray a = build_hex_array(pitch, 2, kEqual, kSafety);
    REQUIRE(classify_interaction(kEqual, kSafety, pitch) == InteractionType::Type1);
    const NeighborIndex idx = neighbor_pairs(a, 3 * pitch);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<Segment> segs;
        for (const Vec2 c : a.centers()) {
            segs.push_back(eccentric_arm_segment(kEqual, c, {2 * std::numbers::pi * uniform01(rng),
                                                             2 * std::numbers::pi * uniform01(rng)}));
        }
        for (const NeighborPair& p : idx.pairs) {
            REQUIRE(segment_min_distance_exact(segs[p.i], segs[p.j]) > kSafety.threshold);
        }
    }
}

TEST_CASE("lattice neighbor classes")
{
    const double p = 25.6;
    const auto first = lattice_neighbor_classes(p, 1.1 * p);
    REQUIRE(first.size() == 1);
    CHECK(first[0].distance == doctest::Approx(p));
    CHECK(first[0].multiplicity == 6);

    const auto three = lattice_neighbor_classes(p, 2.05 * p);
    REQUIRE(three.size() == 3);
    CHECK(three[1].distance == doctest::Approx(std::sqrt(3.0) * p));
    CHECK(three[2].distance == doctest::Approx(2 * p));
    for (const auto& c : three) {
        CHECK(c.multiplicity == 6);
    }

    const auto four = lattice_neighbor_classes(p, 2.7 * p);
    REQUIRE(four.size() == 4);
    CHECK(four[3].distance == doctest::Approx(std::sqrt(7.0) * p));
    CHECK(four[3].multiplicity == 12);

    // multiplicities agree with counting neighbours of the central positioner
    const HexArray a = build_hex_array(p, 8, kEqual, kSafety);
    for (const auto& c : lattice_neighbor_classes(p, 6 * p)) {
        int count = 0;
        for (const Vec2 q : a.centers()) {
            count += std::abs(norm(q) - c.distance) < 1e-6 ? 1 : 0;
        }
        CHECK(count == c.multiplicity);
    }
}

TEST_CASE("coverage multiplicity")
{
    const HexArray eq = build_hex_array(25.6, 2, kEqual, kSafety);
    const Vec2 edge = eq.centers().back();
    CHECK(coverage_multiplicity(eq, edge) >= 1);

    const ArmGeometry uneq(7.25, 14.5);
    const HexArray un = build_hex_array(25.6, 2, uneq, kSafety);
    // own center lies inside the hole; neighbours are 25.6 away, beyond reach_max 21.75
    CHECK(coverage_multiplicity(un, un.centers()[0]) == 0);

    Rng rng(31);
    for (int k = 0; k < 5000; ++k) {
        const Vec2 p{160 * uniform01(rng) - 80, 160 * uniform01(rng) - 80};
        int expected = 0;
        for (const Vec2 c : eq.centers()) {
            const double r = distance(p, c);
            expected += (r >= kEqual.reach_min() && r <= kEqual.reach_max()) ? 1 : 0;
        }
        REQUIRE(coverage_multiplicity(eq, p) == expected);
    }
}
