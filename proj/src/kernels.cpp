#include "salsa/kernels.hpp"

#include <cmath>

#include "salsa/errors.hpp"

namespace salsa {

KernelSpec::KernelSpec(double tau, int dim, double lengthscale)
    : tau(tau), dim(dim), lengthscale(lengthscale) {
    if (dim < 1) throw InvalidArgument("KernelSpec: dim must be >= 1");
    if (!(tau > 0.5 * dim))
        throw InvalidArgument("KernelSpec: tau must exceed dim/2");
    if (!(lengthscale > 0.0))
        throw InvalidArgument("KernelSpec: lengthscale must be positive");
}

bool KernelSpec::half_integer_order() const {
    const double p = nu() - 0.5;
    return p >= -1e-9 && std::abs(p - std::round(p)) <= 1e-9;
}

MaternRadial::MaternRadial(const KernelSpec& spec)
    : inv_len_(1.0 / spec.lengthscale), nu_(spec.nu()) {
    if (!spec.half_integer_order()) return;  // Bessel path

    // nu = p + 1/2. With t_k = (p+k)! / (k! (p-k)! 2^k), the profile is
    // phi(s) = exp(-s) / t_p * sum_{k=0..p} t_k s^{p-k}; the t_k follow the
    // recurrence t_k = t_{k-1} (p+k)(p-k+1) / (2k), exact in double for the
    // orders used here.
    const int p = static_cast<int>(std::round(nu_ - 0.5));
    std::vector<double> t(p + 1);
    t[0] = 1.0;
    for (int k = 1; k <= p; ++k)
        t[k] = t[k - 1] * static_cast<double>(p + k) *
               static_cast<double>(p - k + 1) / (2.0 * k);
    poly_.resize(p + 1);
    for (int k = 0; k <= p; ++k) poly_[p - k] = t[k] / t[p];  // s^{p-k} coeff
}

double MaternRadial::operator()(double r) const {
    if (r < 0.0) throw InvalidArgument("matern_phi: negative radius");
    const double s = r * inv_len_;
    if (!poly_.empty()) {
        if (s > 700.0) return 0.0;  // exp underflow region; phi < 1e-300
        double acc = 0.0;
        for (size_t i = poly_.size(); i-- > 0;) acc = acc * s + poly_[i];
        return std::exp(-s) * acc;
    }
    if (s < 1e-10) return 1.0;
    if (s > 700.0) return 0.0;
    return std::pow(2.0, 1.0 - nu_) / std::tgamma(nu_) * std::pow(s, nu_) *
           std::cyl_bessel_k(nu_, s);
}

double matern_phi(const KernelSpec& spec, double r) {
    return MaternRadial(spec)(r);
}

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const PointSet& X) {
    if (X.dim() != spec.dim)
        throw InvalidArgument("gram_matrix: point dimension != spec.dim");
    const MaternRadial phi(spec);
    const int n = X.size();
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i) {
        K(i, i) = 1.0;
        for (int j = 0; j < i; ++j) {
            const double r = dist_euclidean(X[i], X[j]);
            if (r <= 1e-12)
                throw DataError("gram_matrix: coincident points at rows " +
                                std::to_string(j) + " and " + std::to_string(i));
            const double v = phi(r);
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

Eigen::MatrixXd cross_matrix(const KernelSpec& spec, const PointSet& A,
                             const PointSet& B) {
    if (A.dim() != B.dim())
        throw InvalidArgument("cross_matrix: dimension mismatch");
    if (A.dim() != spec.dim)
        throw InvalidArgument("cross_matrix: point dimension != spec.dim");
    const MaternRadial phi(spec);
    Eigen::MatrixXd E(A.size(), B.size());
    for (int i = 0; i < A.size(); ++i)
        for (int j = 0; j < B.size(); ++j)
            E(i, j) = phi(dist_euclidean(A[i], B[j]));
    return E;
}

}  // namespace salsa
