#include <cmath>
#include <vector>

#include "doctest.h"
#include "salsa/errors.hpp"
#include "salsa/geometry.hpp"
#include "salsa/testbed.hpp"

using namespace salsa;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("piecewise profile branch values") {
    CHECK(piecewise_1d(-0.7) == 6.0);
    CHECK(piecewise_1d(-0.45) == 6.0);
    CHECK(piecewise_1d(-0.4) == doctest::Approx(6.1).epsilon(1e-12));
    CHECK(piecewise_1d(-0.375) == doctest::Approx(6.15).epsilon(1e-12));
    CHECK(piecewise_1d(-0.25) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(piecewise_1d(-0.2) == doctest::Approx(6.1).epsilon(1e-12));
    CHECK(piecewise_1d(-0.1) == doctest::Approx(6.1).epsilon(1e-12));
    CHECK(piecewise_1d(0.0) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(piecewise_1d(0.025) == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(piecewise_1d(0.25) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(piecewise_1d(0.55) ==
          doctest::Approx(-0.16180339887498949).epsilon(1e-12));
    CHECK(piecewise_1d(0.75) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("piecewise profile jump and corner structure") {
    const double eps = 1e-9;
    // Jumps at -0.4 and 0.55.
    CHECK(std::abs(piecewise_1d(-0.4 + eps) - piecewise_1d(-0.4 - eps)) > 0.09);
    CHECK(std::abs(piecewise_1d(0.55 + eps) - piecewise_1d(0.55 - eps)) > 6.0);
    // Continuous joins at -0.35, -0.15, -0.05.
    for (double x : {-0.35, -0.15, -0.05})
        CHECK(std::abs(piecewise_1d(x + eps) - piecewise_1d(x - eps)) < 1e-6);

    // Corner at -0.05: slope -2 from the left, -20*pi from the right.
    const double h = 1e-7;
    const double left =
        (piecewise_1d(-0.05) - piecewise_1d(-0.05 - h)) / h;
    const double right =
        (piecewise_1d(-0.05 + h) - piecewise_1d(-0.05)) / h;
    CHECK(left == doctest::Approx(-2.0).epsilon(1e-3));
    CHECK(right == doctest::Approx(-20.0 * kPi).epsilon(1e-3));

    // Corner at -0.25 (apex of the middle tent): slopes -2 and +2.
    const double l2 = (piecewise_1d(-0.25) - piecewise_1d(-0.25 - h)) / h;
    const double r2 = (piecewise_1d(-0.25 + h) - piecewise_1d(-0.25)) / h;
    CHECK(l2 == doctest::Approx(-2.0).epsilon(1e-3));
    CHECK(r2 == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("composite field feature values") {
    // Exponential peak center: the peak contributes exactly 1, everything
    // else is below 1e-6 there.
    CHECK(composite_2d(4.5, 2.0) == doctest::Approx(1.0).epsilon(1e-6));

    // Flat top of the truncated cone.
    CHECK(composite_2d(1.5, 4.5) == doctest::Approx(1.0).epsilon(1e-3));

    // Unit block edge: crossing y = 1.4 at x = 4.2 steps by ~1.
    const double jump = composite_2d(4.2, 1.399) - composite_2d(4.2, 1.401);
    CHECK(jump == doctest::Approx(1.0).epsilon(0.02));

    // Cone rim kink at (2.3, 4.5): radial slope changes by 1.5/0.8.
    const double h = 1e-6;
    const double left = (composite_2d(2.3, 4.5) - composite_2d(2.3 - h, 4.5)) / h;
    const double right = (composite_2d(2.3 + h, 4.5) - composite_2d(2.3, 4.5)) / h;
    CHECK(right - left == doctest::Approx(1.5 / 0.8).epsilon(0.01));

    // Ridge crest: tent apex on the curve y = 3.2 + 0.4 sin(pi x / 1.5).
    const double crest = 3.2 + 0.4 * std::sin(kPi * 0.9 / 1.5);
    const double up = (composite_2d(0.9, crest + h) - composite_2d(0.9, crest)) / h;
    const double dn = (composite_2d(0.9, crest) - composite_2d(0.9, crest - h)) / h;
    CHECK(dn - up == doctest::Approx(2.0 * 0.8 / 0.25).epsilon(0.01));
}

TEST_CASE("radial jump field") {
    const std::vector<double> c = {0.5, 0.5, 0.5};
    std::span<const double> cs(c.data(), 3);

    // Below the dividing surface the field is the constant 1.
    const std::vector<double> below = {0.2, 0.3, -0.9};
    CHECK(bunny_3d(below, cs) == 1.0);

    // Straight above the center the directional value is exactly 4.
    const std::vector<double> above = {0.5, 0.5, 0.9};
    CHECK(bunny_3d(above, cs) == doctest::Approx(4.0).epsilon(1e-12));

    // Horizontal from the center (dz = 0) gives 0.
    const std::vector<double> side = {0.9, 0.5, 0.5};
    CHECK(bunny_3d(side, cs) == doctest::Approx(0.0));

    // The center itself is excluded.
    CHECK_THROWS_AS(bunny_3d(c, cs), InvalidArgument);

    // Directional values are bounded by 4 everywhere.
    for (int i = 0; i < 200; ++i) {
        const std::vector<double> p = {0.13 + 0.004 * i, 0.91 - 0.003 * i,
                                       0.05 + 0.0045 * i};
        CHECK(std::abs(bunny_3d(p, cs)) <= 4.0 + 1e-12);
    }

    const std::vector<double> bad = {0.1, 0.2};
    CHECK_THROWS_AS(bunny_3d(bad, cs), InvalidArgument);
}

TEST_CASE("test function registry") {
    const TestFunction& pw = test_function("piecewise1d");
    CHECK(pw.dim == 1);
    CHECK(pw.domain.lower[0] == -1.0);
    CHECK(pw.domain.upper[0] == 1.0);
    CHECK(pw.annotations.size() == 8);
    int jumps = 0, corners = 0, smooth = 0;
    for (const auto& a : pw.annotations) {
        if (a.kind == Annotation::Kind::jump) {
            ++jumps;
            CHECK(a.beta_expected == 0.5);
        }
        if (a.kind == Annotation::Kind::corner) {
            ++corners;
            CHECK(a.beta_expected == 1.5);
        }
        if (a.kind == Annotation::Kind::smooth) {
            ++smooth;
            CHECK(std::isnan(a.beta_expected));
        }
    }
    CHECK(jumps == 2);
    CHECK(corners == 4);
    CHECK(smooth == 2);
    const std::vector<double> x = {0.25};
    CHECK(pw.evaluator(x) == doctest::Approx(piecewise_1d(0.25)));

    const TestFunction& comp = test_function("composite2d");
    CHECK(comp.dim == 2);
    CHECK(comp.annotations.size() == 4);

    const TestFunction& bun = test_function("bunny3d");
    CHECK(bun.dim == 3);
    // The jump probe sits on the dividing surface z = 0.5 sin(5x + 2y).
    const auto& probe = bun.annotations[0].probe;
    CHECK(std::abs(probe[2] - 0.5 * std::sin(5.0 * probe[0] + 2.0 * probe[1])) <
          1e-15);

    CHECK_THROWS_AS(test_function("nope"), InvalidArgument);
    auto names = test_function_names();
    REQUIRE(names.size() == 3);
    CHECK(names[0] == "bunny3d");
    CHECK(names[1] == "composite2d");
    CHECK(names[2] == "piecewise1d");
}

TEST_CASE("halton sequence oracles") {
    PointSet h1 = halton(4, 1);
    CHECK(h1[0][0] == 0.5);
    CHECK(h1[1][0] == 0.25);
    CHECK(h1[2][0] == 0.75);
    CHECK(h1[3][0] == 0.125);

    PointSet h2 = halton(2, 2);
    CHECK(h2[0][0] == 0.5);
    CHECK(h2[0][1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(h2[1][0] == 0.25);
    CHECK(h2[1][1] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

    PointSet h3 = halton(5, 3);
    CHECK(h3[0][2] == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(h3[4][2] == doctest::Approx(0.04).epsilon(1e-15));

    CHECK_THROWS_AS(halton(0, 1), InvalidArgument);
    CHECK_THROWS_AS(halton(10, 7), InvalidArgument);
}

TEST_CASE("halton fill distance shrinks with n") {
    BoundingBox unit{{0.0, 0.0}, {1.0, 1.0}};
    PointSet probes = sample_grid(unit, 50);
    const double f100 = fill_distance(halton(100, 2), probes);
    const double f400 = fill_distance(halton(400, 2), probes);
    const double f1600 = fill_distance(halton(1600, 2), probes);
    CHECK(f400 < f100);
    CHECK(f1600 < f400);
    CHECK(f1600 < 0.1);
}

TEST_CASE("sample grid") {
    BoundingBox seg{{0.0}, {1.0}};
    PointSet g = sample_grid(seg, 5);
    REQUIRE(g.size() == 5);
    CHECK(g[0][0] == 0.0);
    CHECK(g[1][0] == 0.25);
    CHECK(g[4][0] == 1.0);

    BoundingBox rect{{0.0, 0.0}, {1.0, 2.0}};
    PointSet g2 = sample_grid(rect, 3);
    REQUIRE(g2.size() == 9);
    // Lexicographic: last axis fastest.
    CHECK(g2[0][0] == 0.0);
    CHECK(g2[0][1] == 0.0);
    CHECK(g2[1][0] == 0.0);
    CHECK(g2[1][1] == 1.0);
    CHECK(g2[3][0] == 0.5);
    CHECK(g2[8][1] == 2.0);

    CHECK_THROWS_AS(sample_grid(seg, 1), InvalidArgument);
    CHECK_THROWS_AS(sample_grid(rect, 5000), InvalidArgument);
}

TEST_CASE("map to box") {
    BoundingBox target{{-1.0}, {1.0}};
    PointSet unit({0.5, 0.25}, 1);
    PointSet mapped = map_to_box(unit, target);
    CHECK(mapped[0][0] == 0.0);
    CHECK(mapped[1][0] == -0.5);

    BoundingBox square{{0.0, 0.0}, {1.0, 1.0}};
    CHECK_THROWS_AS(map_to_box(unit, square), InvalidArgument);
}
