#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "salsa/hierarchy.hpp"
#include "salsa/interpolation.hpp"

namespace salsa {

/// Ordinary least-squares fit of log c against log h.
struct SlopeFit {
    double slope = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double r_squared = std::numeric_limits<double>::quiet_NaN();
    int n_points = 0;
    /// Pair indices excluded from this fit (floored, flagged, or windowed).
    std::vector<int> dropped_levels;
    bool valid = false;
};

/**
 * OLS regression of log(c) on log(h). Requires equal lengths >= 2 and all
 * entries strictly positive (callers pre-filter); exact power laws are
 * recovered to roundoff.
 */
SlopeFit fit_loglog(std::span<const double> h, std::span<const double> c);

struct EstimatorOptions {
    /// Exclude the first (coarsest) regression pair as pre-asymptotic.
    bool drop_first_pair = false;
    /// c entries below floor_factor * eps^2 * (data scale)^2 are treated as
    /// exact zeros and their pairs dropped.
    double floor_factor = 1e2;
    /// Keep conditioning-flagged levels in the fits (default: drop them).
    bool include_flagged = false;
    /// Also record the squared native norms of successive interpolant
    /// differences (diagnostic track).
    bool difference_native_diagnostic = false;
    /// Discrete L2 normalization over the master set: mean (default) or sum.
    enum class Norm { mean, sum } normalization = Norm::mean;
};

/**
 * Per-center output of the smoothness estimator.
 *
 * Sequences have length M-1 (one entry per consecutive level pair, plotted
 * at the coarser level's h). beta_l2 is half the fitted slope of the
 * squared-difference track; beta_native is tau plus half the fitted slope
 * of the native-norm track. A track without two usable pairs leaves its
 * beta as NaN and the report degenerate.
 */
struct SmoothnessReport {
    enum class Status { ok, degenerate, failed };

    std::vector<double> center;
    double tau = std::numeric_limits<double>::quiet_NaN();
    double lengthscale = std::numeric_limits<double>::quiet_NaN();
    int levels_used = 0;

    std::vector<double> h;   // per-pair abscissae
    std::vector<double> c2;  // squared discrete L2 differences
    std::vector<double> cN;  // coarse-level squared native norms
    std::vector<double> cN_diff;  // optional diagnostic (empty unless enabled)
    std::vector<char> flagged;    // per-level conditioning flags (length M)

    SlopeFit fit_l2;
    SlopeFit fit_native;
    double beta_l2 = std::numeric_limits<double>::quiet_NaN();
    double beta_native = std::numeric_limits<double>::quiet_NaN();

    Status status = Status::failed;
    std::string message;
    bool truncated_hierarchy = false;

    bool has_beta_l2() const { return std::isfinite(beta_l2); }
    bool has_beta_native() const { return std::isfinite(beta_native); }
};

/**
 * The multilevel smoothness estimator: interpolate f on every level of the
 * hierarchy, evaluate all interpolants on the master set, record
 *   c2[m-1] = ||I_m f - I_{m-1} f||^2_{L2(X_M)}   (mean of squares)
 *   cN[m-1] = f_{m-1}^T K_{m-1}^{-1} f_{m-1}
 * for m = 2..M, then fit both sequences against h in log-log. Slopes encode
 * the smoothness: slope(c2) = 2*beta_l2, slope(cN) = 2*(beta_native - tau).
 *
 * Levels whose solve needed jitter are flagged and excluded from the fits
 * (configurable); c values below the floor drop their pairs. Fewer than two
 * usable pairs leaves the affected track degenerate. Requires M >= 3.
 */
SmoothnessReport run_salsa(const KernelSpec& spec, const Hierarchy& H,
                           std::span<const double> f_values,
                           const EstimatorOptions& options = {});

/// How the kernel lengthscale is derived for each center.
struct LengthscaleRule {
    enum class Kind {
        stencil_radius_x2,  // 2 * initial stencil radius
        neighbor_diam_x2,   // 2 * diameter of the neighbor bounding box
        fill_times_diam,    // global fill distance * neighbor box diameter
        fixed,              // fixed_value as-is
    };
    Kind kind = Kind::stencil_radius_x2;
    double fixed_value = 0.0;
};

/// Context for resolving a LengthscaleRule at one center.
struct LengthscaleContext {
    double stencil_radius = 0.0;
    double neighbor_diam = 0.0;
    double global_fill = 0.0;
};

/// Resolve the rule; errors on a nonpositive result.
double lengthscale_from_rule(const LengthscaleRule& rule,
                             const LengthscaleContext& context);

/// Fill-distance proxy for a whole dataset: max distance from a bounded
/// candidate grid over the bounding box to the nearest data site.
double global_fill_proxy(const PointSet& data);

/// Batch policy binding hierarchy construction, kernel choice and fit
/// options for analyze_field.
struct AnalysisPolicy {
    Hierarchy::Method method = Hierarchy::Method::stencil;
    int levels = 8;
    int neighbors = 200;          // subsample mode
    double stencil_radius = 0.0;  // stencil mode (absolute)
    std::optional<BoundingBox> domain;  // stencil clipping box
    double tau = 3.0;
    LengthscaleRule lengthscale;
    EstimatorOptions fit;
    int threads = 0;  // 0 = hardware concurrency
};

/**
 * Run the estimator at every center over a worker pool; one report per
 * center, order-preserving (deterministic output). Stencil mode requires a
 * closed-form function and a clipping domain; subsample mode requires
 * sampled data values and draws k Chebyshev-nearest neighbors per center.
 * A center that fails estimation yields a failed/degenerate report and
 * never aborts the batch.
 */
std::vector<SmoothnessReport> analyze_field(
    const AnalysisPolicy& policy, const PointSet& data,
    std::span<const double> values, const PointSet& centers,
    const std::function<double(std::span<const double>)>& func = nullptr);

}  // namespace salsa
