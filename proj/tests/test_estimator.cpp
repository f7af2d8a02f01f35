#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "salsa/errors.hpp"
#include "salsa/estimator.hpp"
#include "salsa/testbed.hpp"

using namespace salsa;

namespace {

std::vector<double> geometric(double first, double ratio, int n) {
    std::vector<double> v(n);
    double x = first;
    for (int i = 0; i < n; ++i, x *= ratio) v[i] = x;
    return v;
}

Eigen::VectorXd eval_on(const PointSet& pts,
                        const std::function<double(std::span<const double>)>& f) {
    Eigen::VectorXd out(pts.size());
    for (int i = 0; i < pts.size(); ++i) out[i] = f(pts[i]);
    return out;
}

}  // namespace

TEST_CASE("fit_loglog recovers exact power laws") {
    for (double p : {0.5, 1.0, 2.0, -1.5, 3.25}) {
        auto h = geometric(0.5, 0.5, 6);
        std::vector<double> c(6);
        for (int i = 0; i < 6; ++i) c[i] = 2.7 * std::pow(h[i], p);
        SlopeFit fit = fit_loglog(h, c);
        REQUIRE(fit.valid);
        CHECK(fit.slope == doctest::Approx(p).epsilon(1e-12));
        CHECK(fit.intercept == doctest::Approx(std::log(2.7)).epsilon(1e-10));
        CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(fit.n_points == 6);
    }
}

TEST_CASE("fit_loglog degenerate and invalid inputs") {
    std::vector<double> h = {0.5, 0.25, 0.125};
    std::vector<double> flat = {3.0, 3.0, 3.0};
    SlopeFit fit = fit_loglog(h, flat);
    CHECK(fit.slope == doctest::Approx(0.0));
    CHECK(fit.r_squared == 1.0);  // zero variance explained exactly

    std::vector<double> c2 = {1.0, 2.0};
    CHECK_THROWS_AS(fit_loglog(h, c2), InvalidArgument);
    std::vector<double> one = {0.5};
    CHECK_THROWS_AS(fit_loglog(one, one), InvalidArgument);
    std::vector<double> neg = {1.0, -1.0, 1.0};
    CHECK_THROWS_AS(fit_loglog(h, neg), InvalidArgument);
    std::vector<double> zero = {1.0, 0.0, 1.0};
    CHECK_THROWS_AS(fit_loglog(h, zero), InvalidArgument);
    std::vector<double> same = {0.5, 0.5, 0.5};
    std::vector<double> y = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(fit_loglog(same, y), InvalidArgument);
}

TEST_CASE("lengthscale rules") {
    LengthscaleContext ctx;
    ctx.stencil_radius = 0.05;
    ctx.neighbor_diam = 0.3;
    ctx.global_fill = 0.01;

    LengthscaleRule r;
    r.kind = LengthscaleRule::Kind::stencil_radius_x2;
    CHECK(lengthscale_from_rule(r, ctx) == doctest::Approx(0.1));
    r.kind = LengthscaleRule::Kind::neighbor_diam_x2;
    CHECK(lengthscale_from_rule(r, ctx) == doctest::Approx(0.6));
    r.kind = LengthscaleRule::Kind::fill_times_diam;
    ctx.neighbor_diam = 0.4;
    CHECK(lengthscale_from_rule(r, ctx) == doctest::Approx(0.004));
    r.kind = LengthscaleRule::Kind::fixed;
    r.fixed_value = 0.7;
    CHECK(lengthscale_from_rule(r, ctx) == doctest::Approx(0.7));

    r.fixed_value = 0.0;
    CHECK_THROWS_AS(lengthscale_from_rule(r, ctx), InvalidArgument);
    r.kind = LengthscaleRule::Kind::stencil_radius_x2;
    ctx.stencil_radius = 0.0;
    CHECK_THROWS_AS(lengthscale_from_rule(r, ctx), InvalidArgument);
}

TEST_CASE("run_salsa report shapes and abscissae") {
    BoundingBox dom{{-2.0}, {2.0}};
    std::vector<double> c = {0.0};
    const int M = 5;
    Hierarchy H = fixed_stencils(c, 1.0, M, dom);
    KernelSpec spec(3.0, 1, 2.0);
    Eigen::VectorXd f = eval_on(H.master, [](std::span<const double> p) {
        return std::sin(2.0 * p[0]);
    });

    SmoothnessReport rep = run_salsa(spec, H, {f.data(), (size_t)f.size()});
    CHECK(rep.levels_used == M);
    CHECK(rep.h.size() == M - 1);
    CHECK(rep.c2.size() == M - 1);
    CHECK(rep.cN.size() == M - 1);
    CHECK(rep.cN_diff.empty());
    CHECK(rep.flagged.size() == M);
    for (int i = 0; i + 1 < M; ++i) CHECK(rep.h[i] == H.h_proxy[i]);
    CHECK(rep.tau == 3.0);
    CHECK(rep.lengthscale == 2.0);
    CHECK_FALSE(rep.truncated_hierarchy);

    EstimatorOptions diag;
    diag.difference_native_diagnostic = true;
    SmoothnessReport rep2 = run_salsa(spec, H, {f.data(), (size_t)f.size()}, diag);
    REQUIRE(rep2.cN_diff.size() == M - 1);
    for (double v : rep2.cN_diff) CHECK(v >= 0.0);
}

TEST_CASE("run_salsa recovers the kink exponent of |x|") {
    BoundingBox dom{{-2.0}, {2.0}};
    std::vector<double> c = {0.0};
    Hierarchy H = fixed_stencils(c, 1.0, 7, dom);
    KernelSpec spec(3.0, 1, 2.0);
    Eigen::VectorXd f = eval_on(
        H.master, [](std::span<const double> p) { return std::abs(p[0]); });

    SmoothnessReport rep = run_salsa(spec, H, {f.data(), (size_t)f.size()});
    REQUIRE(rep.status == SmoothnessReport::Status::ok);
    CHECK(rep.beta_l2 == doctest::Approx(1.5).epsilon(0.25));
    CHECK(rep.beta_native == doctest::Approx(1.5).epsilon(0.25));
    CHECK(rep.fit_l2.r_squared > 0.97);
    CHECK(rep.fit_native.r_squared > 0.97);
}

TEST_CASE("run_salsa recovers the jump exponent of a step") {
    BoundingBox dom{{-2.0}, {2.0}};
    std::vector<double> c = {0.0};
    Hierarchy H = fixed_stencils(c, 1.0, 7, dom);
    KernelSpec spec(3.0, 1, 2.0);
    Eigen::VectorXd f = eval_on(H.master, [](std::span<const double> p) {
        return p[0] < 0.0 ? 0.0 : 1.0;
    });

    SmoothnessReport rep = run_salsa(spec, H, {f.data(), (size_t)f.size()});
    REQUIRE(rep.status == SmoothnessReport::Status::ok);
    CHECK(rep.beta_l2 == doctest::Approx(0.5).epsilon(0.45));
    CHECK(rep.beta_native == doctest::Approx(0.5).epsilon(0.45));
}

TEST_CASE("run_salsa on identically zero data is degenerate, not fatal") {
    BoundingBox dom{{-1.0}, {1.0}};
    std::vector<double> c = {0.0};
    Hierarchy H = fixed_stencils(c, 0.5, 4, dom);
    KernelSpec spec(3.0, 1, 1.0);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(H.master.size());

    SmoothnessReport rep = run_salsa(spec, H, {f.data(), (size_t)f.size()});
    CHECK(rep.status == SmoothnessReport::Status::degenerate);
    CHECK_FALSE(rep.has_beta_l2());
    CHECK_FALSE(rep.has_beta_native());
    CHECK(rep.message.find("difference track") != std::string::npos);
    CHECK(rep.message.find("native track") != std::string::npos);
}

TEST_CASE("run_salsa flags every level of a hopeless scale mismatch") {
    // All nodes within 2e-17 of each other under lengthscale 1: the kernel
    // rounds to exactly 1 at such separations, so every gram matrix is
    // exactly the all-ones matrix and every solve must take jitter.
    BoundingBox dom{{0.0}, {1.0}};
    std::vector<double> c = {0.5};
    Hierarchy H = fixed_stencils(c, 1e-17, 3, dom);
    KernelSpec spec(3.0, 1, 1.0);
    Eigen::VectorXd f = eval_on(
        H.master, [](std::span<const double> p) { return p[0] * 1e7; });

    SmoothnessReport rep = run_salsa(spec, H, {f.data(), (size_t)f.size()});
    int n_flagged = 0;
    for (char fl : rep.flagged) n_flagged += fl;
    CHECK(n_flagged == 3);
    CHECK(rep.status == SmoothnessReport::Status::degenerate);
}

TEST_CASE("drop_first_pair removes the coarsest regression point") {
    BoundingBox dom{{-2.0}, {2.0}};
    std::vector<double> c = {0.0};
    Hierarchy H = fixed_stencils(c, 1.0, 6, dom);
    KernelSpec spec(3.0, 1, 2.0);
    Eigen::VectorXd f = eval_on(
        H.master, [](std::span<const double> p) { return std::abs(p[0]); });

    EstimatorOptions opt;
    opt.drop_first_pair = true;
    SmoothnessReport rep = run_salsa(spec, H, {f.data(), (size_t)f.size()}, opt);
    REQUIRE(rep.fit_l2.valid);
    CHECK(rep.fit_l2.n_points == 4);  // 5 pairs minus the first
    REQUIRE_FALSE(rep.fit_l2.dropped_levels.empty());
    CHECK(rep.fit_l2.dropped_levels[0] == 0);
}

TEST_CASE("beta is invariant under data rescaling") {
    BoundingBox dom{{-2.0}, {2.0}};
    std::vector<double> c = {0.0};
    Hierarchy H = fixed_stencils(c, 1.0, 6, dom);
    KernelSpec spec(3.0, 1, 2.0);
    Eigen::VectorXd f = eval_on(
        H.master, [](std::span<const double> p) { return std::abs(p[0]); });
    Eigen::VectorXd g = 100.0 * f;

    SmoothnessReport a = run_salsa(spec, H, {f.data(), (size_t)f.size()});
    SmoothnessReport b = run_salsa(spec, H, {g.data(), (size_t)g.size()});
    REQUIRE(a.status == SmoothnessReport::Status::ok);
    REQUIRE(b.status == SmoothnessReport::Status::ok);
    CHECK(std::abs(a.beta_l2 - b.beta_l2) <= 1e-10);
    CHECK(std::abs(a.beta_native - b.beta_native) <= 1e-10);
}

TEST_CASE("mean and sum normalizations give the same slope") {
    BoundingBox dom{{-2.0}, {2.0}};
    std::vector<double> c = {0.0};
    Hierarchy H = fixed_stencils(c, 1.0, 5, dom);
    KernelSpec spec(3.0, 1, 2.0);
    Eigen::VectorXd f = eval_on(
        H.master, [](std::span<const double> p) { return std::abs(p[0]); });

    EstimatorOptions mean_opt, sum_opt;
    sum_opt.normalization = EstimatorOptions::Norm::sum;
    SmoothnessReport a = run_salsa(spec, H, {f.data(), (size_t)f.size()}, mean_opt);
    SmoothnessReport b = run_salsa(spec, H, {f.data(), (size_t)f.size()}, sum_opt);
    REQUIRE(a.status == SmoothnessReport::Status::ok);
    REQUIRE(b.status == SmoothnessReport::Status::ok);
    // The master size is a level-independent factor: slopes agree.
    CHECK(a.beta_l2 == doctest::Approx(b.beta_l2).epsilon(1e-10));
    for (size_t i = 0; i < a.c2.size(); ++i)
        CHECK(b.c2[i] == doctest::Approx(a.c2[i] * H.master.size()));
}

TEST_CASE("run_salsa preconditions") {
    BoundingBox dom{{-1.0}, {1.0}};
    std::vector<double> c = {0.0};
    Hierarchy H = fixed_stencils(c, 0.5, 3, dom);
    KernelSpec spec(3.0, 1, 1.0);

    Eigen::VectorXd wrong = Eigen::VectorXd::Zero(H.master.size() + 1);
    CHECK_THROWS_AS(
        run_salsa(spec, H, {wrong.data(), (size_t)wrong.size()}),
        InvalidArgument);

    KernelSpec spec2(3.0, 2, 1.0);
    Eigen::VectorXd ok = Eigen::VectorXd::Zero(H.master.size());
    CHECK_THROWS_AS(run_salsa(spec2, H, {ok.data(), (size_t)ok.size()}),
                    InvalidArgument);

    Eigen::VectorXd nf = ok;
    nf[1] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(run_salsa(spec, H, {nf.data(), (size_t)nf.size()}),
                    InvalidArgument);

    Hierarchy short_h = H.window(0, 1);
    CHECK_THROWS_AS(run_salsa(spec, short_h, {ok.data(), 0}), EstimationError);
}

TEST_CASE("global fill proxy on a uniform grid") {
    std::vector<double> xs(11);
    for (int i = 0; i <= 10; ++i) xs[i] = 0.1 * i;
    PointSet grid(std::move(xs), 1);
    CHECK(global_fill_proxy(grid) == doctest::Approx(0.05).epsilon(1e-2));
}

TEST_CASE("analyze_field subsample smoke test") {
    PointSet data = halton(2000, 1);
    std::vector<double> values(data.size());
    for (int i = 0; i < data.size(); ++i)
        values[i] = std::abs(data[i][0] - 0.5);

    AnalysisPolicy pol;
    pol.method = Hierarchy::Method::subsample;
    pol.levels = 8;
    pol.neighbors = 200;
    pol.tau = 3.0;
    pol.lengthscale.kind = LengthscaleRule::Kind::neighbor_diam_x2;
    pol.threads = 1;

    PointSet centers({0.5, 0.2}, 1);
    auto reports = analyze_field(pol, data, values, centers);
    REQUIRE(reports.size() == 2);

    const SmoothnessReport& kink = reports[0];
    REQUIRE(kink.status == SmoothnessReport::Status::ok);
    CHECK(kink.center[0] == 0.5);
    CHECK(kink.beta_l2 == doctest::Approx(1.5).epsilon(0.35));
    CHECK(kink.beta_native == doctest::Approx(1.5).epsilon(0.35));

    const SmoothnessReport& smooth = reports[1];
    CHECK(smooth.status != SmoothnessReport::Status::failed);
    if (smooth.has_beta_l2()) CHECK(smooth.beta_l2 > 1.9);
}

TEST_CASE("analyze_field stencil mode matches direct run_salsa") {
    AnalysisPolicy pol;
    pol.method = Hierarchy::Method::stencil;
    pol.levels = 6;
    pol.stencil_radius = 1.0;
    pol.domain = BoundingBox{{-2.0}, {2.0}};
    pol.tau = 3.0;
    pol.lengthscale.kind = LengthscaleRule::Kind::stencil_radius_x2;
    pol.threads = 1;

    auto f = [](std::span<const double> p) { return std::abs(p[0]); };
    PointSet centers({0.0}, 1);
    auto reports = analyze_field(pol, PointSet(), {}, centers, f);
    REQUIRE(reports.size() == 1);

    Hierarchy H = fixed_stencils(centers[0], 1.0, 6, *pol.domain);
    KernelSpec spec(3.0, 1, 2.0);
    Eigen::VectorXd fv = eval_on(H.master, f);
    SmoothnessReport direct = run_salsa(spec, H, {fv.data(), (size_t)fv.size()});

    REQUIRE(reports[0].status == SmoothnessReport::Status::ok);
    CHECK(reports[0].beta_l2 == direct.beta_l2);
    CHECK(reports[0].beta_native == direct.beta_native);
    CHECK(reports[0].lengthscale == 2.0);
}

TEST_CASE("analyze_field is deterministic across thread counts") {
    PointSet data = halton(1500, 1);
    std::vector<double> values(data.size());
    for (int i = 0; i < data.size(); ++i)
        values[i] = std::abs(data[i][0] - 0.4) + 0.3 * data[i][0];

    AnalysisPolicy pol;
    pol.method = Hierarchy::Method::subsample;
    pol.levels = 6;
    pol.neighbors = 120;
    pol.lengthscale.kind = LengthscaleRule::Kind::neighbor_diam_x2;

    std::vector<double> cs;
    for (int i = 0; i < 12; ++i) cs.push_back(0.1 + 0.07 * i);
    PointSet centers(std::move(cs), 1);

    pol.threads = 1;
    auto serial = analyze_field(pol, data, values, centers);
    pol.threads = 3;
    auto parallel = analyze_field(pol, data, values, centers);

    REQUIRE(serial.size() == parallel.size());
    for (size_t i = 0; i < serial.size(); ++i) {
        CHECK(std::memcmp(&serial[i].beta_l2, &parallel[i].beta_l2,
                          sizeof(double)) == 0);
        CHECK(std::memcmp(&serial[i].beta_native, &parallel[i].beta_native,
                          sizeof(double)) == 0);
        CHECK(serial[i].status == parallel[i].status);
    }
}

TEST_CASE("analyze_field isolates per-center failures") {
    // Two data points cannot sustain three hierarchy levels: the center
    // fails but the batch survives.
    PointSet data({0.0, 1.0}, 1);
    std::vector<double> values = {0.0, 1.0};

    AnalysisPolicy pol;
    pol.method = Hierarchy::Method::subsample;
    pol.levels = 8;
    pol.neighbors = 2;
    pol.lengthscale.kind = LengthscaleRule::Kind::neighbor_diam_x2;
    pol.threads = 1;

    PointSet centers({0.5}, 1);
    auto reports = analyze_field(pol, data, values, centers);
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].status == SmoothnessReport::Status::failed);
    CHECK_FALSE(reports[0].message.empty());
    CHECK(reports[0].center[0] == 0.5);
}

TEST_CASE("analyze_field validation") {
    PointSet data({0.0, 0.5, 1.0}, 1);
    std::vector<double> values = {0.0, 0.5, 1.0};
    PointSet centers({0.5}, 1);
    AnalysisPolicy pol;
    pol.method = Hierarchy::Method::subsample;
    pol.lengthscale.kind = LengthscaleRule::Kind::neighbor_diam_x2;

    CHECK_THROWS_AS(analyze_field(pol, data, values, PointSet()),
                    InvalidArgument);

    AnalysisPolicy few = pol;
    few.levels = 2;
    CHECK_THROWS_AS(analyze_field(few, data, values, centers), InvalidArgument);

    AnalysisPolicy bad_tau = pol;
    bad_tau.tau = 0.4;  // must exceed d/2
    CHECK_THROWS_AS(analyze_field(bad_tau, data, values, centers),
                    InvalidArgument);

    AnalysisPolicy k0 = pol;
    k0.neighbors = 0;
    CHECK_THROWS_AS(analyze_field(k0, data, values, centers), InvalidArgument);

    AnalysisPolicy stencil = pol;
    stencil.method = Hierarchy::Method::stencil;
    stencil.stencil_radius = 0.1;
    CHECK_THROWS_AS(analyze_field(stencil, data, values, centers),
                    InvalidArgument);  // no function supplied

    std::vector<double> short_values = {0.0};
    CHECK_THROWS_AS(analyze_field(pol, data, short_values, centers),
                    InvalidArgument);
}
