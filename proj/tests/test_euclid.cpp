#include "tdlab/euclid.hpp"

#include <catch_amalgamated.hpp>

#include <numbers>

using namespace tdlab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("domains validate and report bounds")
{
    const auto b = EuclideanDomain::ball(2, 1.5);
    CHECK(b.bounding_radius() == 1.5);
    CHECK(b.contains({1.0, 1.0}));
    CHECK_FALSE(b.contains({1.5, 0.0}));
    CHECK_THAT(*b.volume(), WithinRel(std::numbers::pi * 2.25, 1e-15));
    CHECK_THAT(*b.reference_turan(), WithinRel(std::numbers::pi * 2.25 / 4.0, 1e-15));

    const EuclideanDomain box(2, EuclideanDomain::Box{{0.5, 1.0}});
    CHECK(box.bounding_box() == std::vector<double>{0.5, 1.0});
    CHECK_THAT(box.bounding_radius(), WithinRel(std::sqrt(1.25), 1e-15));
    CHECK_FALSE(box.contains({0.5, 0.0}));

    // |x + y| < 1, |x - y| < 1: a square rotated by 45 degrees.
    const EuclideanDomain diamond(2, EuclideanDomain::Polytope{{{1.0, 1.0}, {1.0, -1.0}}, {1.0, 1.0}});
    CHECK(diamond.contains({0.4, 0.4}));
    CHECK_FALSE(diamond.contains({0.6, 0.6}));
    CHECK_THAT(diamond.bounding_radius(), WithinAbs(1.0, 1e-12));

    CHECK_THROWS_AS(EuclideanDomain::ball(2, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(EuclideanDomain::ball(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(EuclideanDomain(2, EuclideanDomain::Box{{1.0}}), std::invalid_argument);
}

TEST_CASE("discretize: interval (-1,1) with R = 4, N = 8")
{
    const auto grid = discretize(EuclideanDomain::ball(1, 1.0), 8, 4.0);
    CHECK(grid.spacing == 0.5);
    CHECK(grid.points.elements() == std::vector<std::size_t>{0, 1, 7});
    CHECK(grid.offsets(7) == std::vector<int>{-1});
    // U/2 = (-1/2, 1/2) holds only the origin.
    CHECK(grid.half_body.elements() == std::vector<std::size_t>{0});
}

TEST_CASE("discretize: the open unit disk at spacing 1 keeps only the origin")
{
    const auto grid = discretize(EuclideanDomain::ball(2, 1.0), 4, 4.0);
    CHECK(grid.spacing == 1.0);
    CHECK(grid.points.elements() == std::vector<std::size_t>{0});
    const auto finer = discretize(EuclideanDomain::ball(2, 1.0), 8, 4.0);
    // spacing 1/2: (0,0), (+-1/2, 0), (0, +-1/2), (+-1/2, +-1/2)
    CHECK(finer.points.size() == 9);
}

TEST_CASE("discretize rejects bad resolutions and periods")
{
    const auto u = EuclideanDomain::ball(1, 1.0);
    CHECK_THROWS_AS(discretize(u, 7, 4.0), std::invalid_argument);
    CHECK_THROWS_AS(discretize(u, 0, 4.0), std::invalid_argument);
    CHECK_THROWS_AS(discretize(u, 8, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(discretize(u, 8, 1.0), std::invalid_argument);
}

TEST_CASE("grid symmetries preserve the point set")
{
    const auto grid = discretize(EuclideanDomain::cube(2, 0.7), 8, 4.0);
    const auto maps = grid_symmetries(grid);
    CHECK(maps.size() >= 3);
    for (const auto& m : maps) {
        CHECK(m[0] == 0);
        for (std::size_t x : grid.points.elements()) {
            CHECK(grid.points.contains(m[x]));
        }
    }
    const EuclideanDomain rect(2, EuclideanDomain::Box{{0.7, 0.3}});
    const auto rgrid = discretize(rect, 8, 4.0);
    for (const auto& m : grid_symmetries(rgrid)) {
        for (std::size_t x : rgrid.points.elements()) {
            CHECK(rgrid.points.contains(m[x]));
        }
    }
}

TEST_CASE("interval: T_N converges to 1 with non-increasing errors")
{
    const auto rep = approximate_constants(EuclideanDomain::ball(1, 1.0), {8, 16, 32});
    REQUIRE(rep.ok());
    REQUIRE(rep.reference_turan);
    CHECK_THAT(*rep.reference_turan, WithinAbs(1.0, 1e-15));
    for (std::size_t k = 0; k < rep.levels.size(); ++k) {
        const auto& lv = rep.levels[k];
        CHECK(lv.delsarte >= lv.turan - 1e-9);
        if (k > 0) {
            CHECK(*lv.turan_error <= *rep.levels[k - 1].turan_error + 1e-12);
        }
    }
    CHECK(*rep.levels.back().turan_error <= 0.08);
    CHECK(rep.snapshot_resolution == std::optional<std::size_t>{32});
}

TEST_CASE("scaling U and R together scales T_N by 2^d")
{
    EuclidOptions a;
    a.period = 4.0;
    EuclidOptions b;
    b.period = 8.0;
    const auto small = approximate_constants(EuclideanDomain::ball(2, 1.0), {16}, a);
    const auto large = approximate_constants(EuclideanDomain::ball(2, 2.0), {16}, b);
    CHECK_THAT(large.levels[0].turan, WithinRel(4.0 * small.levels[0].turan, 1e-9));
    CHECK_THAT(large.levels[0].delsarte, WithinRel(4.0 * small.levels[0].delsarte, 1e-9));
}

TEST_CASE("symmetry reduction does not change the values")
{
    EuclidOptions plain;
    plain.use_symmetry = false;
    const auto u = EuclideanDomain::ball(2, 1.0);
    const auto a = approximate_constants(u, {12});
    const auto b = approximate_constants(u, {12}, plain);
    CHECK(a.levels[0].lp_variables_delsarte < b.levels[0].lp_variables_delsarte);
    CHECK_THAT(a.levels[0].turan, WithinAbs(b.levels[0].turan, 1e-8));
    CHECK_THAT(a.levels[0].delsarte, WithinAbs(b.levels[0].delsarte, 1e-8));
}

TEST_CASE("budget limits")
{
    CHECK_NOTHROW(check_budget(1, 64));
    CHECK_NOTHROW(check_budget(2, 64));
    CHECK_NOTHROW(check_budget(3, 16));
    CHECK_THROWS_AS(check_budget(2, 128), std::invalid_argument);
    CHECK_THROWS_AS(check_budget(3, 32), std::invalid_argument);
    CHECK_THROWS_AS(check_budget(4, 4), std::invalid_argument);
    CHECK_THROWS_AS(approximate_constants(EuclideanDomain::ball(3, 1.0), {64}), std::invalid_argument);
    EuclidOptions tight;
    tight.max_variables = 3;
    CHECK_THROWS_AS(approximate_constants(EuclideanDomain::ball(1, 1.0), {32}, tight), std::invalid_argument);
    CHECK_THROWS_AS(approximate_constants(EuclideanDomain::ball(1, 1.0), {}), std::invalid_argument);
}

TEST_CASE("Delsarte values dominate Turan values in two dimensions")
{
    for (const auto& u : {EuclideanDomain::ball(2, 1.0), EuclideanDomain::cube(2, 0.5)}) {
        const auto rep = approximate_constants(u, {8, 16});
        CHECK(rep.ok());
        for (const auto& lv : rep.levels) {
            CHECK(lv.delsarte >= lv.turan - 1e-9);
            CHECK(lv.turan >= lv.half_body_measure - 1e-9);
        }
    }
}

TEST_CASE("a square shows no gap beyond its own calibration")
{
    const auto g = turan_domain_gap(EuclideanDomain::cube(2, 0.5), 16);
    CHECK_THAT(g.half_measure, WithinAbs(0.25, 1e-15));
    CHECK(std::abs(g.turan_gap) <= g.threshold);
    CHECK(g.delsarte_gap <= g.threshold);
    CHECK_FALSE(g.strict_delsarte_gap);
    CHECK_THROWS_AS(turan_domain_gap(EuclideanDomain(2, EuclideanDomain::Union{{EuclideanDomain::ball(2, 0.5)}}), 8),
                    std::invalid_argument);
}
