#include "salsa/app.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "salsa/errors.hpp"
#include "salsa/ratelab.hpp"
#include "salsa/table_io.hpp"
#include "salsa/testbed.hpp"

namespace salsa {

namespace {

PointSet resolve_centers(const CentersSpec& spec, const PointSet& data,
                         const BoundingBox& domain, int dim) {
    switch (spec.kind) {
        case CentersSpec::Kind::all:
            if (data.empty())
                throw ConfigError(
                    "io.centers: 'all' needs an input dataset (io.input)");
            return data;
        case CentersSpec::Kind::grid:
            return sample_grid(domain, spec.grid_per_axis);
        case CentersSpec::Kind::file: {
            PointSet c = ingest_points(spec.path);
            if (c.dim() != dim)
                throw DataError("io.centers: center file dimension " +
                                std::to_string(c.dim()) + " != data dimension " +
                                std::to_string(dim));
            return c;
        }
    }
    throw ConfigError("io.centers: unresolved centers spec");
}

void check_tau(double tau, int d) {
    if (!(tau > 0.5 * d))
        throw ConfigError("kernel.tau: must exceed d/2 = " +
                          std::to_string(0.5 * d));
}

}  // namespace

void run_analyze(const RunConfig& cfg) {
    if (cfg.mode != RunConfig::Mode::analyze)
        throw ConfigError("mode: run_analyze requires mode = analyze");
    if (cfg.io.output.empty())
        throw ConfigError("io.output: output directory is required");

    const bool stencil = cfg.hierarchy.method == Hierarchy::Method::stencil;
    const auto rule_kind = cfg.kernel.lengthscale_rule.kind;
    if (stencil && (rule_kind == LengthscaleRule::Kind::neighbor_diam_x2 ||
                    rule_kind == LengthscaleRule::Kind::fill_times_diam))
        throw ConfigError(
            "kernel.lengthscale_rule: neighbor-based rules require "
            "hierarchy.method = subsample");
    if (!stencil && rule_kind == LengthscaleRule::Kind::stencil_radius_x2)
        throw ConfigError(
            "kernel.lengthscale_rule: stencil_radius_x2 requires "
            "hierarchy.method = stencil");

    AnalysisPolicy policy;
    policy.method = cfg.hierarchy.method;
    policy.levels = cfg.hierarchy.levels;
    policy.neighbors = cfg.hierarchy.neighbors;
    policy.tau = cfg.kernel.tau;
    policy.lengthscale = cfg.kernel.lengthscale_rule;
    policy.fit.drop_first_pair = cfg.fitting.drop_first;
    policy.fit.floor_factor = cfg.fitting.floor;
    policy.threads = cfg.threads;

    Table table;
    table.points = PointSet(1);
    std::vector<SmoothnessReport> reports;
    PointSet centers(1);

    if (stencil) {
        if (cfg.io.function.empty())
            throw ConfigError(
                "io.function: stencil method requires a built-in function");
        const TestFunction* tf = nullptr;
        try {
            tf = &test_function(cfg.io.function);
        } catch (const InvalidArgument&) {
            throw ConfigError("io.function: unknown test function '" +
                              cfg.io.function + "'");
        }
        const int d = tf->dim;
        check_tau(cfg.kernel.tau, d);
        policy.domain = tf->domain;

        if (!cfg.io.input.empty()) {
            table = ingest(cfg.io.input);
            if (table.points.dim() != d)
                throw DataError("io.input: dataset dimension " +
                                std::to_string(table.points.dim()) +
                                " != function dimension " + std::to_string(d));
        }
        centers = resolve_centers(cfg.io.centers, table.points, tf->domain, d);

        const auto& rr = cfg.hierarchy.stencil_radius_rule;
        if (rr.kind == StencilRadiusRule::Kind::fixed) {
            policy.stencil_radius = rr.value;
        } else {
            // Fill-based radius: measured on the input sites if given,
            // otherwise on the centers themselves.
            const PointSet& sites =
                table.points.empty() ? centers : table.points;
            const double fill = global_fill_proxy(sites);
            policy.stencil_radius =
                rr.kind == StencilRadiusRule::Kind::fill ? fill
                                                         : rr.value * fill;
        }

        reports = analyze_field(
            policy, table.points,
            std::span<const double>(table.values.data(), table.values.size()),
            centers, tf->evaluator);
    } else {
        if (cfg.io.input.empty())
            throw ConfigError(
                "io.input: subsample method requires an input dataset");
        table = ingest(cfg.io.input);
        const int d = table.points.dim();
        check_tau(cfg.kernel.tau, d);
        if (cfg.hierarchy.neighbors > table.points.size())
            throw ConfigError(
                "hierarchy.neighbors: more neighbors than data points");
        centers = resolve_centers(cfg.io.centers, table.points,
                                  bounding_box(table.points), d);
        reports = analyze_field(
            policy, table.points,
            std::span<const double>(table.values.data(), table.values.size()),
            centers);
    }

    EmitOptions emit;
    emit.raw = cfg.io.raw;
    emit.tau = cfg.kernel.tau;
    emit.summary_header = config_to_text(cfg);
    emit_report(reports, cfg.io.output, emit);

    int n_ok = 0;
    for (const auto& r : reports)
        if (r.status == SmoothnessReport::Status::ok) ++n_ok;
    std::cout << "analyze: " << reports.size() << " centers, " << n_ok
              << " ok -> " << cfg.io.output << "/smoothness.csv\n";
}

void run_rates(const std::string& experiment, const std::string& out_dir,
               double tau, int levels) {
    std::vector<std::string> names;
    if (experiment == "all")
        names = rate_experiment_names();
    else
        names.push_back(experiment);

    std::filesystem::create_directories(out_dir);
    for (const std::string& name : names) {
        RateExperiment e;
        try {
            e = standard_rate_experiment(name, tau, levels);
        } catch (const InvalidArgument&) {
            throw ConfigError("unknown rate experiment: " + name);
        }
        // Fit over at most the 7 finest levels; deep hierarchies shed their
        // coarse pre-asymptotic head.
        const int fit_from = std::max(1, levels - 7);
        const RateReport rep = run_rate_experiment(e, 0, fit_from);

        // Round-trip line: global L2 rate vs the local estimator on the
        // same hierarchy and kernel.
        Eigen::VectorXd fm(e.levels.master.size());
        for (int i = 0; i < e.levels.master.size(); ++i)
            fm[i] = e.target(e.levels.master[i]);
        const SmoothnessReport sr =
            run_salsa(e.spec, e.levels,
                      std::span<const double>(fm.data(), fm.size()));
        const double cap = e.spec.tau - 0.25;
        const double rate_beta = rep.error_fits.at(2.0).slope;
        const bool saturated = rate_beta >= cap && sr.has_beta_l2() &&
                               sr.beta_l2 >= cap;
        const bool pass =
            saturated ||
            (sr.has_beta_l2() && std::abs(rate_beta - sr.beta_l2) <= 0.25);

        char extra[160];
        std::snprintf(extra, sizeof(extra),
                      "consistency: rate_beta=%.4f local_beta=%.4f %s\n",
                      rate_beta, sr.has_beta_l2() ? sr.beta_l2 : nan(""),
                      pass ? (saturated ? "pass (saturated)" : "pass")
                           : "FAIL");

        namespace fs = std::filesystem;
        {
            std::ofstream out(fs::path(out_dir) / ("rate_" + name + ".csv"));
            if (!out) throw DataError("cannot write rate table in " + out_dir);
            out << format_rate_table(rep, true) << "# " << extra;
        }
        {
            std::ofstream out(fs::path(out_dir) / ("rate_" + name + ".txt"));
            if (!out) throw DataError("cannot write rate table in " + out_dir);
            out << format_rate_table(rep, false) << extra;
        }
        std::cout << "rates " << name << ": L2 exponent "
                  << rep.error_fits.at(2.0).slope << " (predicted "
                  << rep.predicted_error.at(2.0) << "), native "
                  << rep.native_fit.slope << " (predicted "
                  << rep.predicted_native << ")\n";
    }
}

void run_synth(const std::string& function, const std::string& sampler, int n,
               const std::string& out_path) {
    const TestFunction* tf = nullptr;
    try {
        tf = &test_function(function);
    } catch (const InvalidArgument&) {
        throw ConfigError("unknown test function: " + function);
    }

    PointSet pts(tf->dim);
    if (sampler == "grid")
        pts = sample_grid(tf->domain, n);
    else if (sampler == "halton")
        pts = map_to_box(halton(n, tf->dim), tf->domain);
    else
        throw ConfigError("sampler must be 'grid' or 'halton'");

    // Points where the function is undefined (excluded singular centers)
    // are dropped from the dataset rather than aborting the run.
    std::vector<double> coords, values;
    int skipped = 0;
    for (int i = 0; i < pts.size(); ++i) {
        double v;
        try {
            v = tf->evaluator(pts[i]);
        } catch (const Error&) {
            ++skipped;
            continue;
        }
        const auto p = pts[i];
        coords.insert(coords.end(), p.begin(), p.end());
        values.push_back(v);
    }
    if (values.empty()) throw DataError("synth: no evaluable points");
    write_table(out_path, PointSet(std::move(coords), tf->dim), values);
    std::cout << "synth " << function << ": " << values.size() << " points -> "
              << out_path;
    if (skipped > 0) std::cout << " (" << skipped << " undefined skipped)";
    std::cout << "\n";
}

}  // namespace salsa
