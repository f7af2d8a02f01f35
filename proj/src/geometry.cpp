#include "salsa/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "salsa/errors.hpp"
#include "salsa/kdtree.hpp"

namespace salsa {

namespace {

// Exhaustive scan stays the oracle; the tree takes over beyond this size.
constexpr int kKnnScanLimit = 10000;
// fill_distance switches to per-candidate tree queries above this work bound.
constexpr long long kFillBruteWork = 40'000'000;

}  // namespace

double BoundingBox::diameter() const {
    double s = 0.0;
    for (size_t i = 0; i < lower.size(); ++i) {
        const double e = upper[i] - lower[i];
        s += e * e;
    }
    return std::sqrt(s);
}

bool BoundingBox::contains(std::span<const double> x, double tol) const {
    if (static_cast<int>(x.size()) != dim()) return false;
    for (int i = 0; i < dim(); ++i)
        if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
    return true;
}

PointSet::PointSet(int dim) : dim_(dim) {
    if (dim_ < 1) throw InvalidArgument("PointSet: dimension must be >= 1");
}

PointSet::PointSet(std::vector<double> coords, int dim)
    : coords_(std::move(coords)), dim_(dim) {
    if (dim_ < 1) throw InvalidArgument("PointSet: dimension must be >= 1");
    if (coords_.size() % static_cast<size_t>(dim_) != 0)
        throw InvalidArgument("PointSet: coordinate count not divisible by dim");
    count_ = static_cast<int>(coords_.size() / static_cast<size_t>(dim_));
}

PointSet PointSet::subset(std::span<const int> indices) const {
    std::vector<double> out;
    out.reserve(indices.size() * static_cast<size_t>(dim_));
    for (int idx : indices) {
        if (idx < 0 || idx >= count_)
            throw InvalidArgument("PointSet::subset: index out of range");
        auto p = (*this)[idx];
        out.insert(out.end(), p.begin(), p.end());
    }
    return PointSet(std::move(out), dim_);
}

std::optional<std::pair<int, int>> PointSet::find_duplicate(double tol) const {
    if (count_ < 2) return std::nullopt;
    double best = std::numeric_limits<double>::infinity();
    std::pair<int, int> pair{-1, -1};
    if (count_ <= 2000) {
        for (int i = 0; i < count_; ++i)
            for (int j = i + 1; j < count_; ++j) {
                const double d = dist_euclidean((*this)[i], (*this)[j]);
                if (d < best) {
                    best = d;
                    pair = {i, j};
                }
            }
    } else {
        KdTree tree(*this);
        for (int i = 0; i < count_; ++i) {
            auto nn = tree.knn((*this)[i], 2, KdTree::Metric::euclidean);
            const int other = (nn[0] == i) ? nn[1] : nn[0];
            const double d = dist_euclidean((*this)[i], (*this)[other]);
            if (d < best) {
                best = d;
                pair = {std::min(i, other), std::max(i, other)};
            }
        }
    }
    if (best <= tol) return pair;
    return std::nullopt;
}

double dist_euclidean(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double dist_chebyshev(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double fill_distance(const PointSet& X, const PointSet& candidates) {
    if (X.empty()) throw InvalidArgument("fill_distance: X is empty");
    if (candidates.empty()) throw InvalidArgument("fill_distance: candidates empty");
    if (X.dim() != candidates.dim())
        throw InvalidArgument("fill_distance: dimension mismatch");

    const long long work =
        static_cast<long long>(X.size()) * static_cast<long long>(candidates.size());
    double h = 0.0;
    if (work <= kFillBruteWork) {
        for (int c = 0; c < candidates.size(); ++c) {
            double dmin = std::numeric_limits<double>::infinity();
            for (int i = 0; i < X.size(); ++i)
                dmin = std::min(dmin, dist_euclidean(candidates[c], X[i]));
            h = std::max(h, dmin);
        }
    } else {
        KdTree tree(X);
        for (int c = 0; c < candidates.size(); ++c)
            h = std::max(h, tree.nearest_dist(candidates[c], KdTree::Metric::euclidean));
    }
    return h;
}

double separation_radius(const PointSet& X) {
    if (X.size() < 2) throw InvalidArgument("separation_radius: need >= 2 points");
    double dmin = std::numeric_limits<double>::infinity();
    if (X.size() <= kKnnScanLimit) {
        for (int i = 0; i < X.size(); ++i)
            for (int j = i + 1; j < X.size(); ++j)
                dmin = std::min(dmin, dist_euclidean(X[i], X[j]));
    } else {
        KdTree tree(X);
        for (int i = 0; i < X.size(); ++i) {
            auto nn = tree.knn(X[i], 2, KdTree::Metric::euclidean);
            const int other = (nn[0] == i) ? nn[1] : nn[0];
            dmin = std::min(dmin, dist_euclidean(X[i], X[other]));
        }
    }
    return 0.5 * dmin;
}

namespace detail {

std::vector<int> knn_chebyshev_scan(const PointSet& X,
                                    std::span<const double> center, int k) {
    std::vector<std::pair<double, int>> all(X.size());
    for (int i = 0; i < X.size(); ++i)
        all[i] = {dist_chebyshev(X[i], center), i};
    std::partial_sort(all.begin(), all.begin() + k, all.end());
    std::vector<int> out(k);
    for (int i = 0; i < k; ++i) out[i] = all[i].second;
    return out;
}

}  // namespace detail

std::vector<int> knn_chebyshev(const PointSet& X, std::span<const double> center,
                               int k) {
    if (k < 1 || k > X.size())
        throw InvalidArgument("knn_chebyshev: k must satisfy 1 <= k <= #X");
    if (static_cast<int>(center.size()) != X.dim())
        throw InvalidArgument("knn_chebyshev: center dimension mismatch");
    if (X.size() <= kKnnScanLimit) return detail::knn_chebyshev_scan(X, center, k);
    KdTree tree(X);
    return tree.knn(center, k, KdTree::Metric::chebyshev);
}

BoundingBox bounding_box(const PointSet& X) {
    if (X.empty()) throw InvalidArgument("bounding_box: empty point set");
    BoundingBox box;
    box.lower.assign(X[0].begin(), X[0].end());
    box.upper = box.lower;
    for (int i = 1; i < X.size(); ++i) {
        auto p = X[i];
        for (int a = 0; a < X.dim(); ++a) {
            box.lower[a] = std::min(box.lower[a], p[a]);
            box.upper[a] = std::max(box.upper[a], p[a]);
        }
    }
    return box;
}

void AffineMap::apply(std::span<const double> x, std::span<double> y) const {
    for (size_t a = 0; a < offset.size(); ++a) y[a] = (x[a] - offset[a]) / scale[a];
}

void AffineMap::invert(std::span<const double> y, std::span<double> x) const {
    for (size_t a = 0; a < offset.size(); ++a) x[a] = y[a] * scale[a] + offset[a];
}

std::pair<PointSet, AffineMap> rescale_to_unit_cube(const PointSet& X) {
    const BoundingBox box = bounding_box(X);
    AffineMap map;
    map.offset = box.lower;
    map.scale.resize(box.lower.size());
    for (int a = 0; a < box.dim(); ++a) {
        const double e = box.extent(a);
        map.scale[a] = (e > 0.0) ? e : 1.0;
    }
    std::vector<double> out(X.coords().size());
    const int d = X.dim();
    for (int i = 0; i < X.size(); ++i)
        map.apply(X[i], std::span<double>(out.data() + static_cast<size_t>(i) * d,
                                          static_cast<size_t>(d)));
    return {PointSet(std::move(out), d), map};
}

}  // namespace salsa
