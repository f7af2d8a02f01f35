#pragma once

#include <Eigen/Dense>
#include <vector>

#include "salsa/geometry.hpp"

namespace salsa {

/**
 * Sobolev-spline (Matérn) kernel specification.
 *
 * The radial profile is phi_nu(s) = 2^{1-nu}/Gamma(nu) * s^nu * K_nu(s) with
 * nu = tau - dim/2, evaluated at the scaled radius s = r / lengthscale and
 * normalized so phi(0) = 1. The bare-radius convention is used: no sqrt(2 nu)
 * factor is inserted into the argument (many ML libraries differ here). The
 * native space of this kernel is norm-equivalent to the Sobolev space of
 * order tau.
 */
struct KernelSpec {
    double tau;
    int dim;
    double lengthscale;

    KernelSpec(double tau, int dim, double lengthscale);

    double nu() const { return tau - 0.5 * dim; }
    /// True when nu is within 1e-9 of a positive half-integer p + 1/2.
    bool half_integer_order() const;

    bool operator==(const KernelSpec& o) const {
        return tau == o.tau && dim == o.dim && lengthscale == o.lengthscale;
    }
};

/**
 * Precomputed radial evaluator for a KernelSpec.
 *
 * Half-integer nu = p + 1/2 uses the closed form
 *   phi(s) = exp(-s) * sum_{k=0..p} a_k s^k,   a_p = ... , a_0 = 1,
 * with coefficients fixed at construction (nu=1/2: e^{-s}; 3/2: (1+s)e^{-s};
 * 5/2: (1+s+s^2/3)e^{-s}; ...). Other nu fall back to a numerical
 * modified-Bessel evaluation accurate to ~1e-15 relative for nu in (0,10],
 * s in [1e-6, 30]; s < 1e-10 returns the limit value 1.
 */
class MaternRadial {
public:
    explicit MaternRadial(const KernelSpec& spec);

    /// phi(r / lengthscale); requires r >= 0.
    double operator()(double r) const;

private:
    double inv_len_;
    double nu_;
    std::vector<double> poly_;  // ascending powers of s; empty => Bessel path
};

/// Scalar convenience wrapper; builds a MaternRadial per call.
double matern_phi(const KernelSpec& spec, double r);

/// Symmetric kernel matrix K_ij = phi(|x_i - x_j|); unit diagonal; errors on
/// coincident points (strict positive definiteness needs distinct sites).
Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const PointSet& X);

/// Rectangular evaluation matrix E_ij = phi(|a_i - b_j|).
Eigen::MatrixXd cross_matrix(const KernelSpec& spec, const PointSet& A,
                             const PointSet& B);

}  // namespace salsa
