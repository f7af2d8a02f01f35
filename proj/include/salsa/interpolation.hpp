#pragma once

#include <Eigen/Dense>

#include "salsa/geometry.hpp"
#include "salsa/kernels.hpp"

namespace salsa {

/**
 * Kernel interpolant I(x) = sum_i coeffs[i] * phi(|x - centers[i]|).
 *
 * Coefficients are stored in compensated form: the working value of entry i
 * is coeffs[i] + coeffs_lo[i], where coeffs_lo carries the rounding residual
 * of the triangular solves. Evaluation and inner products consume both parts,
 * which keeps the data-to-output map linear far below double rounding and
 * makes reported quantities invariant under rescaling of the data. Code that
 * only needs plain double coefficients can read coeffs alone; an empty
 * coeffs_lo is treated as all zeros.
 *
 * native_sq is the squared native-space norm coeffs.dot(f) = f^T K^{-1} f
 * (clamped at 0 against roundoff). jitter_used records the diagonal shift
 * that made the factorization succeed; 0 means a clean solve, and any
 * positive value flags the interpolant as conditioning-compromised.
 */
struct Interpolant {
    KernelSpec spec;
    PointSet centers;
    Eigen::VectorXd coeffs;
    Eigen::VectorXd coeffs_lo;
    double native_sq = 0.0;
    double jitter_used = 0.0;

    bool empty() const { return centers.empty(); }
    /// The zero interpolant (empty center set, norm 0).
    static Interpolant zero(const KernelSpec& spec) {
        return Interpolant{spec, {}, {}, {}, 0.0, 0.0};
    }
};

/**
 * Solve K alpha = f by Cholesky factorization of the kernel matrix.
 *
 * On factorization failure the solve retries with K + eps*I for
 * eps = 1e-12 * #X, escalating tenfold up to 1e-6 * #X; the shift that
 * succeeded is recorded in jitter_used. Exhausting the ladder raises
 * ConditioningError.
 */
Interpolant interpolate(const KernelSpec& spec, const PointSet& X,
                        const Eigen::VectorXd& f);

/// Evaluate the interpolant at every point of Y. Each value is a single
/// compensated accumulation over the centers, rounded once at the end.
Eigen::VectorXd evaluate(const Interpolant& I, const PointSet& Y);

/**
 * Evaluate (a - b) at every point of Y in one compensated accumulation, so
 * the result is accurate relative to the difference even where the two
 * interpolants agree to many digits. Either interpolant may be empty (the
 * zero function); when both are present they must share the kernel spec.
 */
Eigen::VectorXd evaluate_difference(const Interpolant& a, const Interpolant& b,
                                    const PointSet& Y);

/**
 * Squared native norm of (fine - coarse) for interpolants sharing a spec,
 * with coarse centers a subset of fine centers. Computed on the union of
 * centers via
 *   |f - c|^2 = |f|^2 + |c|^2 - 2 <f, c>,
 * where the inner product uses the reproducing property
 * <f, c> = sum_j coarse_coeffs[j] * f(coarse_center_j) evaluated through the
 * cross matrix, so no second factorization is needed. An empty coarse
 * interpolant is the zero function.
 */
double native_norm_sq_of_difference(const Interpolant& fine,
                                    const Interpolant& coarse);

}  // namespace salsa
