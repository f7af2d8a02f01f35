#include "salsa/interpolation.hpp"

#include <cmath>
#include <string>

#include "salsa/errors.hpp"

namespace salsa {

namespace {

// Compensated (double-double) arithmetic for every stage that touches the
// data vector. The Cholesky factor itself is ordinary double precision and
// depends only on the geometry, so carrying the solves, evaluations, and
// inner products through error-free transforms makes the data-to-output map
// linear to far below double rounding. That is what keeps the reported
// quantities invariant when the data is rescaled: the factor is bit-identical
// across runs, and everything downstream of it is (numerically) exact.
struct Dd {
    double hi = 0.0;
    double lo = 0.0;
};

// Knuth's branch-free exact sum: hi + lo == a + b exactly.
inline Dd two_sum(double a, double b) {
    const double s = a + b;
    const double t = s - a;
    return {s, (a - (s - t)) + (b - t)};
}

// Dekker's exact product via a 2^27+1 split (no FMA requirement).
inline Dd two_prod(double a, double b) {
    constexpr double splitter = 134217729.0;
    const double p = a * b;
    const double ca = splitter * a;
    const double ahi = ca - (ca - a);
    const double alo = a - ahi;
    const double cb = splitter * b;
    const double bhi = cb - (cb - b);
    const double blo = b - bhi;
    const double err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo;
    return {p, err};
}

inline Dd dd_add(Dd a, Dd b) {
    const Dd s = two_sum(a.hi, b.hi);
    return two_sum(s.hi, s.lo + a.lo + b.lo);
}

// acc + x * (y_hi + y_lo); the x * y_lo cross term stays in plain double
// because its own rounding error is third order.
inline Dd dd_fma(Dd acc, double x, double y_hi, double y_lo) {
    const Dd p = two_prod(x, y_hi);
    return dd_add(acc, Dd{p.hi, p.lo + x * y_lo});
}

// (a.hi + a.lo) / d with one Newton correction of the double quotient.
inline Dd dd_div(Dd a, double d) {
    const double q1 = a.hi / d;
    const Dd p = two_prod(q1, d);
    const double r = (a.hi - p.hi) + (a.lo - p.lo);
    return two_sum(q1, r / d);
}

// Forward then backward substitution against the lower-triangular factor L,
// with every running sum carried in compensated form. Solves L L^T x = b.
void solve_compensated(const Eigen::MatrixXd& L, const Eigen::VectorXd& b,
                       Eigen::VectorXd& hi, Eigen::VectorXd& lo) {
    const Eigen::Index n = L.rows();
    Eigen::VectorXd yhi(n), ylo(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Dd acc{b[i], 0.0};
        for (Eigen::Index j = 0; j < i; ++j)
            acc = dd_fma(acc, -L(i, j), yhi[j], ylo[j]);
        const Dd y = dd_div(acc, L(i, i));
        yhi[i] = y.hi;
        ylo[i] = y.lo;
    }
    hi.resize(n);
    lo.resize(n);
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        Dd acc{yhi[i], ylo[i]};
        for (Eigen::Index j = i + 1; j < n; ++j)
            acc = dd_fma(acc, -L(j, i), hi[j], lo[j]);
        const Dd x = dd_div(acc, L(i, i));
        hi[i] = x.hi;
        lo[i] = x.lo;
    }
}

inline double lo_or_zero(const Eigen::VectorXd& lo, Eigen::Index j) {
    return lo.size() > j ? lo[j] : 0.0;
}

// Accumulate sign * I(y) into acc through the compensated coefficients.
inline Dd accumulate_terms(Dd acc, const Interpolant& I, const MaternRadial& phi,
                           std::span<const double> y, double sign) {
    const int nc = I.centers.size();
    for (int j = 0; j < nc; ++j) {
        const double k = sign * phi(dist_euclidean(y, I.centers[j]));
        acc = dd_fma(acc, k, I.coeffs[j], lo_or_zero(I.coeffs_lo, j));
    }
    return acc;
}

}  // namespace

Interpolant interpolate(const KernelSpec& spec, const PointSet& X,
                        const Eigen::VectorXd& f) {
    if (X.empty()) throw InvalidArgument("interpolate: empty point set");
    if (f.size() != X.size())
        throw InvalidArgument("interpolate: #f != #X");
    for (Eigen::Index i = 0; i < f.size(); ++i)
        if (!std::isfinite(f[i]))
            throw InvalidArgument("interpolate: non-finite value at index " +
                                  std::to_string(i));

    const Eigen::MatrixXd K = gram_matrix(spec, X);
    const int n = X.size();

    Eigen::LLT<Eigen::MatrixXd> llt(K);
    double jitter = 0.0;
    if (llt.info() != Eigen::Success) {
        const double eps_max = 1e-6 * n;
        for (double eps = 1e-12 * n; eps <= eps_max * (1.0 + 1e-12); eps *= 10.0) {
            Eigen::MatrixXd Kj = K;
            Kj.diagonal().array() += eps;
            llt.compute(Kj);
            if (llt.info() == Eigen::Success) {
                jitter = eps;
                break;
            }
        }
        if (llt.info() != Eigen::Success)
            throw ConditioningError(
                "interpolate: factorization failed with jitter up to 1e-6 * n");
    }

    const Eigen::MatrixXd L = llt.matrixL();
    Eigen::VectorXd alpha, alpha_lo;
    solve_compensated(L, f, alpha, alpha_lo);

    Dd nat{0.0, 0.0};
    for (Eigen::Index i = 0; i < f.size(); ++i)
        nat = dd_fma(nat, f[i], alpha[i], alpha_lo[i]);
    const double native_sq = std::max(0.0, nat.hi);

    return Interpolant{spec,      X,         std::move(alpha),
                       std::move(alpha_lo), native_sq, jitter};
}

Eigen::VectorXd evaluate(const Interpolant& I, const PointSet& Y) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(Y.size());
    if (I.empty() || Y.empty()) return out;
    if (Y.dim() != I.centers.dim())
        throw InvalidArgument("evaluate: dimension mismatch");
    const MaternRadial phi(I.spec);
    for (int y = 0; y < Y.size(); ++y)
        out[y] = accumulate_terms(Dd{}, I, phi, Y[y], 1.0).hi;
    return out;
}

Eigen::VectorXd evaluate_difference(const Interpolant& a, const Interpolant& b,
                                    const PointSet& Y) {
    if (a.empty()) {
        Eigen::VectorXd out = evaluate(b, Y);
        out = -out;
        return out;
    }
    if (b.empty()) return evaluate(a, Y);
    if (!(a.spec == b.spec))
        throw InvalidArgument("evaluate_difference: spec mismatch");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(Y.size());
    if (Y.empty()) return out;
    if (Y.dim() != a.centers.dim() || Y.dim() != b.centers.dim())
        throw InvalidArgument("evaluate_difference: dimension mismatch");
    const MaternRadial phi(a.spec);
    for (int y = 0; y < Y.size(); ++y) {
        Dd acc = accumulate_terms(Dd{}, a, phi, Y[y], 1.0);
        acc = accumulate_terms(acc, b, phi, Y[y], -1.0);
        out[y] = acc.hi;
    }
    return out;
}

double native_norm_sq_of_difference(const Interpolant& fine,
                                    const Interpolant& coarse) {
    if (!(fine.spec == coarse.spec))
        throw InvalidArgument("native_norm_sq_of_difference: spec mismatch");
    if (coarse.empty()) return fine.native_sq;
    if (fine.empty())
        throw InvalidArgument(
            "native_norm_sq_of_difference: coarse centers not a subset of fine");

    for (int j = 0; j < coarse.centers.size(); ++j) {
        bool found = false;
        for (int i = 0; i < fine.centers.size() && !found; ++i)
            found = dist_euclidean(coarse.centers[j], fine.centers[i]) <= 1e-12;
        if (!found)
            throw InvalidArgument(
                "native_norm_sq_of_difference: coarse centers not a subset of fine");
    }

    // <fine, coarse>_N = sum_j coarse_coeffs[j] * fine(coarse_center_j)
    // by the reproducing property; no joint factorization needed.
    const Eigen::VectorXd fine_at_coarse = evaluate(fine, coarse.centers);
    Dd inner{0.0, 0.0};
    for (int j = 0; j < coarse.centers.size(); ++j)
        inner = dd_fma(inner, fine_at_coarse[j], coarse.coeffs[j],
                       lo_or_zero(coarse.coeffs_lo, j));
    const Dd total = dd_add(two_sum(fine.native_sq, coarse.native_sq),
                            Dd{-2.0 * inner.hi, -2.0 * inner.lo});
    return std::max(0.0, total.hi);
}

}  // namespace salsa
