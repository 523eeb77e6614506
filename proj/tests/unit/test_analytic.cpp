#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fieldsim/analytic.hpp"
#include "fieldsim/errors.hpp"
#include "fieldsim/rng.hpp"

using namespace fieldsim;
using std::numbers::pi;

namespace {

const ArmGeometry kEqual(8.25, 8.25);
const SafetyModel kSafety{};

// Rejection sampling of the overlap of two annuli [inner, outer] whose centers
// sit `dist` apart on the x axis, inside the overlap's bounding box.
double annulus_overlap_mc(double inner, double outer, double dist, std::size_t samples, std::uint64_t seed)
{
    const double x0 = std::max(-outer, dist - outer);
    const double x1 = std::min(outer, dist + outer);
    if (x1 <= x0) {
        return 0.0;
    }
    const double y0 = -outer;
    const double y1 = outer;
    Rng rng(seed);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < samples; ++k) {
        const double x = x0 + (x1 - x0) * uniform01(rng);
        const double y = y0 + (y1 - y0) * uniform01(rng);
        const double r1 = x * x + y * y;
        const double r2 = (x - dist) * (x - dist) + y * y;
        hits += (r1 <= outer * outer && r1 >= inner * inner && r2 <= outer * outer && r2 >= inner * inner) ? 1 : 0;
    }
    return (x1 - x0) * (y1 - y0) * static_cast<double>(hits) / static_cast<double>(samples);
}

}  // namespace

TEST_CASE("ring radii")
{
    const RingRadii eq = ring_radii(kEqual, kSafety);
    CHECK(eq.inner == 0.0);
    CHECK(eq.outer == doctest::Approx(4.5));
    const RingRadii un = ring_radii(ArmGeometry(7.25, 14.5), kSafety);
    CHECK(un.inner == doctest::Approx(2.75));
    CHECK(un.outer == doctest::Approx(11.75));
    const RingRadii zero = ring_radii(ArmGeometry(7.25, 14.5), {0.0, 0.0, 4.5});
    CHECK(zero.inner == doctest::Approx(7.25));
    CHECK(zero.outer == doctest::Approx(7.25));
}

TEST_CASE("cover area")
{
    CHECK(s_cover(ArmGeometry(7.25, 14.5), kSafety, CoverMode::ThinRing) == doctest::Approx(pi * 130.5));
    CHECK(s_cover(ArmGeometry(7.25, 14.5), kSafety) == doctest::Approx(409.98).epsilon(1e-4));
    CHECK(s_cover(ArmGeometry(7.25, 14.5), {0.0, 0.0, 4.5}, CoverMode::ThinRing) == 0.0);
    CHECK(s_cover(kEqual, kSafety, CoverMode::FullPatrol) == doctest::Approx(pi * 441.0));
    CHECK(s_cover(kEqual, kSafety, CoverMode::FullPatrol) == doctest::Approx(1385.44).epsilon(1e-5));
    const ArmGeometry g(7.25, 14.5);
    CHECK(s_cover(g, kSafety, CoverMode::FullPatrol) == doctest::Approx(pi * (26.25 * 26.25 - 2.75 * 2.75)));
}

TEST_CASE("collision area")
{
    CHECK(s_collision(kEqual, kSafety, 33.0) == 0.0);
    CHECK(s_collision(kEqual, kSafety, 40.0) == 0.0);
    CHECK(s_collision(kEqual, kSafety, 25.6) == doctest::Approx(4.5 * 12.75 * (16.5 - 12.8) / 4.125));
    CHECK(s_collision(kEqual, kSafety, 25.6) == doctest::Approx(51.466).epsilon(1e-4));
    CHECK(s_collision(ArmGeometry(3.0, 9.0), {0.0, 0.0, 4.5}, 5.0) == 0.0);
    CHECK_THROWS_AS(s_collision(kEqual, kSafety, 0.0), InvalidParameter);
}

TEST_CASE("disk intersection area")
{
    CHECK(disk_intersection_area(1, 1, 2) == 0.0);
    CHECK(disk_intersection_area(1, 1, 0) == doctest::Approx(pi));
    CHECK(disk_intersection_area(3, 1, 1.5) == doctest::Approx(pi));
    // two unit circles one apart: 2 pi/3 - sqrt(3)/2
    CHECK(disk_intersection_area(1, 1, 1) == doctest::Approx(2 * pi / 3 - std::sqrt(3.0) / 2));
}

TEST_CASE("conflict area examples")
{
    CHECK(s_conflict(kEqual, kSafety, 42.0) == 0.0);
    CHECK(s_conflict(kEqual, kSafety, 50.0) == 0.0);
    const ArmGeometry g(7.25, 14.5);
    CHECK(s_conflict(g, kSafety, 0.0) == doctest::Approx(s_cover(g, kSafety, CoverMode::FullPatrol)));

    const double lens = 2 * 21.0 * 21.0 * std::acos(12.8 / 21.0) - 12.8 * std::sqrt(4 * 21.0 * 21.0 - 25.6 * 25.6);
    CHECK(s_conflict(kEqual, kSafety, 25.6) == doctest::Approx(lens).epsilon(1e-12));
    const double mc = annulus_overlap_mc(0.0, 21.0, 25.6, 10'000'000, 1);
    CHECK(std::abs(mc - lens) / lens < 1e-3);
}

TEST_CASE("conflict area against rejection sampling over random parameters")
{
    Rng rng(77);
    for (int k = 0; k < 50; ++k) {
        const double l1 = 5.0 + 10.0 * uniform01(rng);
        const ArmGeometry g = ArmGeometry::from_ratio(l1, 1.0 + 2.0 * uniform01(rng));
        const SafetyModel s{1.0 + 5.0 * uniform01(rng), 0.0, 4.5};
        const double outer = g.reach_max() + s.d;
        const double inner = std::max(0.0, g.l2() - g.l1() - s.d);
        const double dist = (0.2 + 1.6 * uniform01(rng)) * outer;
        const double area = s_conflict(g, s, dist);
        const double mc = annulus_overlap_mc(inner, outer, dist, 4'000'000, 1000 + k);
        INFO("l1=", g.l1(), " l2=", g.l2(), " d=", s.d, " D=", dist);
        REQUIRE(area > 0.0);
        CHECK(std::abs(mc - area) / area <= 2e-3);
    }
}

TEST_CASE("analytic probability examples")
{
    const AnalyticResult t1 = collision_probability_analytic(kEqual, kSafety, 50.0);
    CHECK(t1.interaction == InteractionType::Type1);
    CHECK(t1.probability == 0.0);
    CHECK(t1.probability_clamped == 0.0);

    for (const CoverMode mode : {CoverMode::ThinRing, CoverMode::FullPatrol}) {
        const AnalyticResult r = collision_probability_analytic(kEqual, kSafety, 25.6, mode);
        CHECK(r.interaction == InteractionType::Type2);
        REQUIRE(r.areas.classes.size() == 1);
        CHECK(r.areas.classes[0].distance == doctest::Approx(25.6));
        CHECK(r.areas.classes[0].multiplicity == 6);
        const double cover = s_cover(kEqual, kSafety, mode);
        const double expected = 6 * s_conflict(kEqual, kSafety, 25.6) * s_collision(kEqual, kSafety, 25.6) / (cover * cover);
        CHECK(r.probability == doctest::Approx(expected).epsilon(1e-12));
        CHECK(r.probability_clamped == std::clamp(r.probability, 0.0, 1.0));
        CHECK(collision_probability_analytic(kEqual, kSafety, 25.6, mode).probability
              > collision_probability_analytic(kEqual, kSafety, 35.0, mode).probability);
    }

    CHECK_THROWS_AS(collision_probability_analytic(ArmGeometry(7.25, 14.5), {0.0, 0.0, 4.5}, 10.0),
                    DegenerateCover);
    CHECK_NOTHROW(collision_probability_analytic(ArmGeometry(7.25, 14.5), {0.0, 0.0, 4.5}, 10.0,
                                                 CoverMode::FullPatrol));
    CHECK_THROWS_AS(collision_probability_analytic(kEqual, kSafety, 0.0), InvalidParameter);
}

TEST_CASE("full-patrol probability is monotone over the 19- and 469-positioner grids")
{
    auto p = [](double l1, double ratio, double pitch) {
        return collision_probability_analytic(ArmGeometry::from_ratio(l1, ratio), kSafety, pitch,
                                              CoverMode::FullPatrol)
            .probability;
    };
    // 19-positioner grid: arm 8.25, ratio 1..3, pitch 25.6..35
    for (double ratio = 1.0; ratio <= 3.0 + 1e-9; ratio += 0.1) {
        for (double pitch = 25.6; pitch < 35.0; pitch += 0.2) {
            REQUIRE(p(8.25, ratio, pitch + 0.2) <= p(8.25, ratio, pitch));
            REQUIRE(p(8.25, ratio + 0.1, pitch) >= p(8.25, ratio, pitch));
        }
    }
    // 469-positioner grid: arm 7.25..14.5, ratio 1..2, pitch 24.6..35
    for (double l1 = 7.25; l1 <= 14.5; l1 += 0.725) {
        for (double ratio = 1.0; ratio <= 2.0 + 1e-9; ratio += 0.1) {
            for (double pitch = 24.6; pitch < 35.0; pitch += 0.4) {
                INFO("l1=", l1, " ratio=", ratio, " pitch=", pitch);
                REQUIRE(p(l1, ratio, pitch + 0.4) <= p(l1, ratio, pitch));
                REQUIRE(p(l1, ratio + 0.1, pitch) >= p(l1, ratio, pitch));
            }
        }
    }
}

TEST_CASE("class terms are non-negative and sum to the probability")
{
    Rng rng(4);
    for (int k = 0; k < 500; ++k) {
        const ArmGeometry g = ArmGeometry::from_ratio(5 + 10 * uniform01(rng), 1 + 2 * uniform01(rng));
        const double pitch = 10 + 40 * uniform01(rng);
        for (const CoverMode mode : {CoverMode::ThinRing, CoverMode::FullPatrol}) {
            const AnalyticResult r = collision_probability_analytic(g, kSafety, pitch, mode);
            double sum = 0.0;
            for (const ClassTerm& t : r.areas.classes) {
                REQUIRE(t.contribution >= 0.0);
                REQUIRE(t.s_conflict >= 0.0);
                REQUIRE(t.s_collision >= 0.0);
                // dropping a class never raises the total
                REQUIRE(r.probability - t.contribution <= r.probability);
                sum += t.contribution;
            }
            CHECK(sum == doctest::Approx(r.probability).epsilon(1e-12));
            CHECK(r.areas.r_outer >= r.areas.r_inner);
            CHECK(r.areas.r_inner >= 0.0);
        }
    }
}
