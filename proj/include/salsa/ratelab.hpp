#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "salsa/estimator.hpp"
#include "salsa/geometry.hpp"
#include "salsa/hierarchy.hpp"
#include "salsa/kernels.hpp"

namespace salsa {

// Empirical rate-verification harness: interpolate targets of known Sobolev
// order on nested global grids, measure error decay and native-norm growth,
// and compare fitted exponents with the predicted ones.

inline constexpr double kQInf = std::numeric_limits<double>::infinity();

struct RateExperiment {
    std::string name;
    KernelSpec spec{3.0, 1, 1.0};
    BoundingBox domain;
    std::function<double(std::span<const double>)> target;
    double known_beta = 0.0;  // exclusive supremum of the target's Sobolev order
    Hierarchy levels;         // nested quasi-uniform global sets
    std::vector<double> q_norms{1.0, 2.0, kQInf};
};

struct RateReport {
    std::string name;
    std::vector<double> h;                         // per level
    std::map<double, std::vector<double>> errors;  // q -> per-level L_q error
    std::vector<double> native;                    // per-level native norm
    std::map<double, SlopeFit> error_fits;
    std::map<double, double> predicted_error;      // q -> predicted exponent
    SlopeFit native_fit;
    double predicted_native = 0.0;
    bool pre_asymptotic = false;  // some designed fit had r_squared <= 0.95
};

// Full sweep: one interpolant per level, discrete L_q errors on a validation
// grid (validation_per_axis = 0 picks a grid 20x finer than the finest
// level), native norms, and slope fits starting at level index fit_from.
RateReport run_rate_experiment(const RateExperiment& e,
                               int validation_per_axis = 0, int fit_from = 1);

std::map<double, SlopeFit> measure_error_rates(const RateExperiment& e);

SlopeFit measure_native_growth(const RateExperiment& e);

struct InverseCheck {
    double beta_from_rates = 0.0;  // fitted L2 error exponent
    double beta_from_salsa = 0.0;  // local estimator on the same hierarchy
    double difference = 0.0;
    bool saturated = false;  // both sides at or beyond the identifiable range
    bool pass = false;
};

// Round-trip consistency: the globally measured rate and the local estimator
// must agree within 0.25, unless both saturate near tau.
InverseCheck inverse_consistency_check(const RateExperiment& e);

// Prebuilt 1D experiments on [-1, 1]: abs_x, step, sine, kernel_translate.
RateExperiment standard_rate_experiment(const std::string& name,
                                        double tau = 3.0, int levels = 8);
std::vector<std::string> rate_experiment_names();

// Rate table (columns level, h, per-q errors, native norm; footer with
// fitted vs predicted exponents) as CSV or aligned text.
std::string format_rate_table(const RateReport& r, bool csv);

}  // namespace salsa
