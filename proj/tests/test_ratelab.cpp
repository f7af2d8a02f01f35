#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "salsa/errors.hpp"
#include "salsa/ratelab.hpp"

using namespace salsa;

TEST_CASE("standard experiments are well formed") {
    auto names = rate_experiment_names();
    REQUIRE(names.size() == 4);
    for (const auto& n : names) {
        RateExperiment e = standard_rate_experiment(n, 3.0, 5);
        CHECK(e.name == n);
        CHECK(e.levels.level_count() == 5);
        CHECK(e.domain.dim() == 1);
        CHECK(e.known_beta > 0.0);
        REQUIRE(e.target);
    }
    CHECK_THROWS_AS(standard_rate_experiment("nope"), InvalidArgument);
}

TEST_CASE("kink target rates near the predicted exponents") {
    RateExperiment e = standard_rate_experiment("abs_x", 3.0, 6);
    RateReport rep = run_rate_experiment(e);

    REQUIRE(rep.h.size() == 6);
    REQUIRE(rep.errors.at(2.0).size() == 6);
    // Errors decrease, native norms increase (unbounded target).
    for (int m = 1; m < 6; ++m) {
        CHECK(rep.errors.at(2.0)[m] < rep.errors.at(2.0)[m - 1]);
        CHECK(rep.native[m] > rep.native[m - 1]);
    }

    CHECK(rep.predicted_error.at(1.0) == 1.5);
    CHECK(rep.predicted_error.at(2.0) == 1.5);
    CHECK(rep.predicted_error.at(kQInf) == 1.0);
    CHECK(rep.predicted_native == doctest::Approx(-1.5));

    REQUIRE(rep.error_fits.at(2.0).valid);
    CHECK(rep.error_fits.at(2.0).slope == doctest::Approx(1.5).epsilon(0.25));
    REQUIRE(rep.error_fits.at(kQInf).valid);
    CHECK(rep.error_fits.at(kQInf).slope == doctest::Approx(1.0).epsilon(0.35));
    REQUIRE(rep.native_fit.valid);
    CHECK(rep.native_fit.slope == doctest::Approx(-1.5).epsilon(0.25));
}

TEST_CASE("step target native growth") {
    RateExperiment e = standard_rate_experiment("step", 3.0, 6);
    RateReport rep = run_rate_experiment(e);
    REQUIRE(rep.native_fit.valid);
    CHECK(rep.native_fit.slope == doctest::Approx(-2.5).epsilon(0.2));
    CHECK(rep.predicted_native == doctest::Approx(-2.5));
    REQUIRE(rep.error_fits.at(2.0).valid);
    CHECK(rep.error_fits.at(2.0).slope == doctest::Approx(0.5).epsilon(0.5));
}

TEST_CASE("kernel translate stays inside the native space") {
    RateExperiment e = standard_rate_experiment("kernel_translate", 3.0, 6);
    RateReport rep = run_rate_experiment(e);
    // The translate has native norm exactly 1; interpolant norms approach
    // it from below and never exceed it.
    for (double nn : rep.native) {
        CHECK(nn <= 1.0 + 1e-8);
        CHECK(nn > 0.5);
    }
    for (int m = 1; m < 6; ++m) CHECK(rep.native[m] >= rep.native[m - 1] - 1e-12);
    // Bounded native sequence: essentially flat, never a growth law.
    REQUIRE(rep.native_fit.valid);
    CHECK(std::abs(rep.native_fit.slope) < 0.25);
    CHECK_FALSE(rep.pre_asymptotic);
    // Errors still decay cleanly.
    REQUIRE(rep.error_fits.at(2.0).valid);
    CHECK(rep.error_fits.at(2.0).slope > 2.0);
}

TEST_CASE("analytic target saturates at the kernel rate") {
    RateExperiment e = standard_rate_experiment("sine", 3.0, 6);
    RateReport rep = run_rate_experiment(e);
    REQUIRE(rep.error_fits.at(2.0).valid);
    CHECK(rep.error_fits.at(2.0).slope > 2.5);
    REQUIRE(rep.native_fit.valid);
    CHECK(std::abs(rep.native_fit.slope) < 0.25);  // bounded native norms
}

TEST_CASE("validation grid must out-resolve the finest level") {
    RateExperiment e = standard_rate_experiment("abs_x", 3.0, 5);
    CHECK_THROWS_AS(run_rate_experiment(e, 5), EstimationError);
    CHECK_NOTHROW(run_rate_experiment(e, 700));
}

TEST_CASE("experiment validation") {
    RateExperiment e = standard_rate_experiment("abs_x", 3.0, 5);
    CHECK_THROWS_AS(run_rate_experiment(e, 0, -1), InvalidArgument);
    CHECK_THROWS_AS(run_rate_experiment(e, 0, 4), InvalidArgument);

    RateExperiment no_target = e;
    no_target.target = nullptr;
    CHECK_THROWS_AS(run_rate_experiment(no_target), InvalidArgument);

    RateExperiment bad_q = e;
    bad_q.q_norms = {3.0};
    CHECK_THROWS_AS(run_rate_experiment(bad_q), InvalidArgument);

    RateExperiment bad_dim = e;
    bad_dim.domain = BoundingBox{{0.0, 0.0}, {1.0, 1.0}};
    CHECK_THROWS_AS(run_rate_experiment(bad_dim), InvalidArgument);
}

TEST_CASE("predicted exponents include the embedding gap in 2d") {
    RateExperiment e;
    e.name = "tiny2d";
    e.spec = KernelSpec(3.0, 2, 1.0);
    e.domain = BoundingBox{{0.0, 0.0}, {1.0, 1.0}};
    e.target = [](std::span<const double> p) { return p[0] + p[1]; };
    e.known_beta = 2.0;
    e.levels = fixed_stencils(std::vector<double>{0.5, 0.5}, 0.5, 3, e.domain);

    RateReport rep = run_rate_experiment(e, 17, 0);
    CHECK(rep.predicted_error.at(1.0) == 2.0);
    CHECK(rep.predicted_error.at(2.0) == 2.0);
    CHECK(rep.predicted_error.at(kQInf) == doctest::Approx(1.0));
    CHECK(rep.predicted_native == doctest::Approx(-1.0));
}

TEST_CASE("wrappers agree with the full run") {
    RateExperiment e = standard_rate_experiment("abs_x", 3.0, 5);
    RateReport rep = run_rate_experiment(e);
    auto fits = measure_error_rates(e);
    CHECK(fits.at(2.0).slope == rep.error_fits.at(2.0).slope);
    SlopeFit nat = measure_native_growth(e);
    CHECK(nat.slope == rep.native_fit.slope);
}

TEST_CASE("inverse consistency between global rates and local estimate") {
    RateExperiment kink = standard_rate_experiment("abs_x", 3.0, 6);
    InverseCheck chk = inverse_consistency_check(kink);
    CHECK(chk.pass);
    CHECK_FALSE(chk.saturated);
    CHECK(chk.beta_from_rates == doctest::Approx(1.5).epsilon(0.3));
    CHECK(chk.beta_from_salsa == doctest::Approx(1.5).epsilon(0.3));

    RateExperiment smooth = standard_rate_experiment("sine", 3.0, 6);
    InverseCheck chk2 = inverse_consistency_check(smooth);
    CHECK(chk2.pass);
}

TEST_CASE("rate table formatting") {
    RateExperiment e = standard_rate_experiment("abs_x", 3.0, 5);
    RateReport rep = run_rate_experiment(e);

    std::string csv = format_rate_table(rep, true);
    CHECK(csv.rfind("level,h,err_q1,err_q2,err_qinf,native_norm\n", 0) == 0);
    CHECK(csv.find("# fit L2: exponent=") != std::string::npos);
    CHECK(csv.find("# fit native: exponent=") != std::string::npos);
    // 5 data rows after the header.
    int rows = 0;
    for (size_t pos = csv.find('\n'); pos != std::string::npos;
         pos = csv.find('\n', pos + 1))
        ++rows;
    CHECK(rows >= 9);  // header + 5 levels + >= 3 fit lines

    std::string txt = format_rate_table(rep, false);
    CHECK(txt.find("native_norm") != std::string::npos);
    CHECK(txt.find('#') == std::string::npos);
    CHECK(txt.find("predicted=") != std::string::npos);
}
