#include "salsa/estimator.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "salsa/errors.hpp"
#include "salsa/kdtree.hpp"

namespace salsa {

SlopeFit fit_loglog(std::span<const double> h, std::span<const double> c) {
    if (h.size() != c.size())
        throw InvalidArgument("fit_loglog: length mismatch");
    const int n = static_cast<int>(h.size());
    if (n < 2) throw InvalidArgument("fit_loglog: need at least 2 points");

    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        if (!(h[i] > 0.0) || !(c[i] > 0.0))
            throw InvalidArgument("fit_loglog: nonpositive entry");
        xs[i] = std::log(h[i]);
        ys[i] = std::log(c[i]);
    }
    double xbar = 0.0, ybar = 0.0;
    for (int i = 0; i < n; ++i) {
        xbar += xs[i];
        ybar += ys[i];
    }
    xbar /= n;
    ybar /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dx = xs[i] - xbar;
        const double dy = ys[i] - ybar;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0))
        throw InvalidArgument("fit_loglog: abscissae are all identical");

    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    fit.r_squared = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    fit.n_points = n;
    fit.valid = true;
    return fit;
}

namespace {

Eigen::VectorXd gather(std::span<const double> values, const std::vector<int>& idx) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
    for (size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = values[idx[i]];
    return out;
}

}  // namespace

SmoothnessReport run_salsa(const KernelSpec& spec, const Hierarchy& H,
                           std::span<const double> f_values,
                           const EstimatorOptions& options) {
    const int M = H.level_count();
    if (M < 3) throw EstimationError("run_salsa: need at least 3 levels");
    if (static_cast<int>(f_values.size()) != H.master.size())
        throw InvalidArgument("run_salsa: f_values size != master size");
    if (spec.dim != H.master.dim())
        throw InvalidArgument("run_salsa: spec dimension != hierarchy dimension");
    for (double v : f_values)
        if (!std::isfinite(v)) throw InvalidArgument("run_salsa: non-finite f value");

    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    SmoothnessReport rep;
    rep.tau = spec.tau;
    rep.lengthscale = spec.lengthscale;
    rep.levels_used = M;
    rep.truncated_hierarchy = H.truncated();
    rep.h.assign(M - 1, nan);
    rep.c2.assign(M - 1, nan);
    rep.cN.assign(M - 1, nan);
    rep.flagged.assign(M, 0);
    if (options.difference_native_diagnostic) rep.cN_diff.assign(M - 1, nan);

    // Solve every level; evaluation happens per pair below so that each
    // difference is one compensated accumulation, accurate relative to the
    // difference itself even where consecutive interpolants nearly agree.
    std::vector<std::optional<Interpolant>> interp(M);
    for (int m = 0; m < M; ++m) {
        try {
            Interpolant I =
                interpolate(spec, H.level_points(m), gather(f_values, H.levels[m]));
            rep.flagged[m] = I.jitter_used > 0.0 ? 1 : 0;
            interp[m] = std::move(I);
        } catch (const Error&) {
            rep.flagged[m] = 1;  // unusable level; its pairs drop out
        }
    }

    double scale = 0.0;
    for (double v : f_values) scale = std::max(scale, std::abs(v));
    const double eps = std::numeric_limits<double>::epsilon();
    const double floor = options.floor_factor * eps * eps * scale * scale;
    const double norm_div =
        options.normalization == EstimatorOptions::Norm::mean
            ? static_cast<double>(H.master.size())
            : 1.0;

    for (int i = 0; i + 1 < M; ++i) {
        rep.h[i] = H.h_proxy[i];  // abscissa: the coarser level of the pair
        if (interp[i] && interp[i + 1]) {
            const Eigen::VectorXd d =
                evaluate_difference(*interp[i + 1], *interp[i], H.master);
            rep.c2[i] = d.squaredNorm() / norm_div;
            if (options.difference_native_diagnostic)
                rep.cN_diff[i] =
                    native_norm_sq_of_difference(*interp[i + 1], *interp[i]);
        }
        if (interp[i]) rep.cN[i] = interp[i]->native_sq;
    }

    // Assemble each track's usable pairs and fit.
    const auto run_fit = [&](const std::vector<double>& c,
                             auto&& pair_usable) -> SlopeFit {
        std::vector<double> hh, cc;
        SlopeFit fit;
        for (int i = 0; i + 1 < M; ++i) {
            const bool keep = pair_usable(i) && std::isfinite(c[i]) && c[i] > floor &&
                              !(options.drop_first_pair && i == 0);
            if (keep) {
                hh.push_back(rep.h[i]);
                cc.push_back(c[i]);
            } else {
                fit.dropped_levels.push_back(i);
            }
        }
        if (hh.size() >= 2) {
            auto dropped = std::move(fit.dropped_levels);
            fit = fit_loglog(hh, cc);
            fit.dropped_levels = std::move(dropped);
        }
        return fit;
    };

    const bool keep_flagged = options.include_flagged;
    rep.fit_l2 = run_fit(rep.c2, [&](int i) {
        return keep_flagged || (!rep.flagged[i] && !rep.flagged[i + 1]);
    });
    rep.fit_native =
        run_fit(rep.cN, [&](int i) { return keep_flagged || !rep.flagged[i]; });

    if (rep.fit_l2.valid) rep.beta_l2 = 0.5 * rep.fit_l2.slope;
    if (rep.fit_native.valid) rep.beta_native = spec.tau + 0.5 * rep.fit_native.slope;

    if (rep.fit_l2.valid && rep.fit_native.valid) {
        rep.status = SmoothnessReport::Status::ok;
    } else {
        rep.status = SmoothnessReport::Status::degenerate;
        std::string why;
        if (!rep.fit_l2.valid) why += "difference track has < 2 usable pairs";
        if (!rep.fit_native.valid) {
            if (!why.empty()) why += "; ";
            why += "native track has < 2 usable pairs";
        }
        rep.message = why;
    }
    return rep;
}

double lengthscale_from_rule(const LengthscaleRule& rule,
                             const LengthscaleContext& context) {
    double ell = 0.0;
    switch (rule.kind) {
        case LengthscaleRule::Kind::stencil_radius_x2:
            ell = 2.0 * context.stencil_radius;
            break;
        case LengthscaleRule::Kind::neighbor_diam_x2:
            ell = 2.0 * context.neighbor_diam;
            break;
        case LengthscaleRule::Kind::fill_times_diam:
            ell = context.global_fill * context.neighbor_diam;
            break;
        case LengthscaleRule::Kind::fixed:
            ell = rule.fixed_value;
            break;
    }
    if (!(ell > 0.0))
        throw InvalidArgument("lengthscale_from_rule: nonpositive lengthscale");
    return ell;
}

namespace {

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    int T = threads > 0 ? threads
                        : static_cast<int>(std::thread::hardware_concurrency());
    if (T < 1) T = 1;
    T = std::min(T, n);
    if (T <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(T);
    for (int t = 0; t < T; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

// Global fill-distance proxy: max distance from a candidate-grid point of
// the data bounding box to its nearest data site. Grid resolution is capped
// (~4e5 candidates), which bounds the proxy's underestimate by half the
// candidate spacing; adequate for the lengthscale rules it feeds.
double global_fill_proxy(const PointSet& data) {
    const BoundingBox box = bounding_box(data);
    const int d = data.dim();
    int per_axis = static_cast<int>(std::ceil(std::pow(4e5, 1.0 / d)));
    per_axis = std::clamp(per_axis, 2, 65537);
    std::vector<double> coords;
    std::vector<int> idx(d, 0);
    const long long total = [&] {
        long long t = 1;
        for (int a = 0; a < d; ++a) t *= per_axis;
        return t;
    }();
    coords.reserve(static_cast<size_t>(total) * d);
    for (long long lin = 0; lin < total; ++lin) {
        long long rem = lin;
        for (int a = d - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(rem % per_axis);
            rem /= per_axis;
        }
        for (int a = 0; a < d; ++a)
            coords.push_back(box.lower[a] +
                             box.extent(a) * idx[a] / (per_axis - 1.0));
    }
    return fill_distance(data, PointSet(std::move(coords), d));
}

std::vector<SmoothnessReport> analyze_field(
    const AnalysisPolicy& policy, const PointSet& data,
    std::span<const double> values, const PointSet& centers,
    const std::function<double(std::span<const double>)>& func) {
    if (centers.empty()) throw InvalidArgument("analyze_field: no centers");
    if (policy.levels < 3)
        throw InvalidArgument("analyze_field: need at least 3 levels");
    const int d = centers.dim();
    KernelSpec(policy.tau, d, 1.0);  // validates tau > d/2 up front

    const bool stencil = policy.method == Hierarchy::Method::stencil;
    BoundingBox domain;
    if (stencil) {
        if (!func)
            throw InvalidArgument(
                "analyze_field: stencil method requires a closed-form function");
        if (policy.domain)
            domain = *policy.domain;
        else if (!data.empty())
            domain = bounding_box(data);
        else
            throw InvalidArgument("analyze_field: stencil method needs a domain");
        if (!(policy.stencil_radius > 0.0))
            throw InvalidArgument("analyze_field: stencil radius must be > 0");
    } else {
        if (data.empty())
            throw InvalidArgument("analyze_field: subsample method needs data");
        if (static_cast<int>(values.size()) != data.size())
            throw InvalidArgument("analyze_field: values size != data size");
        if (data.dim() != d)
            throw InvalidArgument("analyze_field: center/data dimension mismatch");
        if (policy.neighbors < 1 || policy.neighbors > data.size())
            throw InvalidArgument("analyze_field: neighbor count out of range");
    }

    double global_fill = 0.0;
    if (policy.lengthscale.kind == LengthscaleRule::Kind::fill_times_diam) {
        if (data.empty())
            throw InvalidArgument(
                "analyze_field: fill_times_diam rule needs data sites");
        global_fill = global_fill_proxy(data);
    }

    std::optional<KdTree> tree;
    if (!stencil && data.size() > 10000) tree.emplace(data);

    std::vector<SmoothnessReport> out(centers.size());
    parallel_for(centers.size(), policy.threads, [&](int i) {
        SmoothnessReport rep;
        try {
            LengthscaleContext ctx;
            ctx.global_fill = global_fill;
            Hierarchy H;
            Eigen::VectorXd fv;
            if (stencil) {
                H = fixed_stencils(centers[i], policy.stencil_radius,
                                   policy.levels, domain);
                fv.resize(H.master.size());
                for (int j = 0; j < H.master.size(); ++j) fv[j] = func(H.master[j]);
                ctx.stencil_radius = policy.stencil_radius;
            } else {
                const std::vector<int> nn =
                    tree ? tree->knn(centers[i], policy.neighbors,
                                     KdTree::Metric::chebyshev)
                         : detail::knn_chebyshev_scan(data, centers[i],
                                                      policy.neighbors);
                const PointSet nb = data.subset(nn);
                H = uniform_subsample(nb, policy.levels);
                fv.resize(H.master.size());
                for (int j = 0; j < H.master.size(); ++j)
                    fv[j] = values[nn[H.master_source[j]]];
                ctx.neighbor_diam = bounding_box(nb).diameter();
            }
            const double ell = lengthscale_from_rule(policy.lengthscale, ctx);
            const KernelSpec spec(policy.tau, d, ell);
            rep = run_salsa(spec, H,
                            std::span<const double>(fv.data(), fv.size()),
                            policy.fit);
        } catch (const std::exception& e) {
            rep.status = SmoothnessReport::Status::failed;
            rep.message = e.what();
            rep.tau = policy.tau;
        }
        rep.center.assign(centers[i].begin(), centers[i].end());
        out[i] = std::move(rep);
    });
    return out;
}

}  // namespace salsa
