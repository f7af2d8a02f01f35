#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace salsa {

/// Axis-aligned box; lower <= upper componentwise.
struct BoundingBox {
    std::vector<double> lower;
    std::vector<double> upper;

    int dim() const { return static_cast<int>(lower.size()); }
    double extent(int axis) const { return upper[axis] - lower[axis]; }
    /// Euclidean length of (upper - lower).
    double diameter() const;
    bool contains(std::span<const double> x, double tol = 0.0) const;
};

/**
 * Immutable ordered set of d-dimensional points, stored contiguously.
 *
 * Construction validates the shape (coords.size() divisible by dim, d >= 1).
 * Pairwise distinctness is the caller's responsibility for internally
 * generated sets (grids, subsets); ingested data must be screened through
 * find_duplicate(), which is how duplicate inputs are rejected.
 */
class PointSet {
public:
    PointSet() = default;
    /// Empty set carrying a dimension, ready to be assigned or queried.
    explicit PointSet(int dim);
    PointSet(std::vector<double> coords, int dim);

    int dim() const { return dim_; }
    int size() const { return count_; }
    bool empty() const { return count_ == 0; }

    std::span<const double> operator[](int i) const {
        return {coords_.data() + static_cast<size_t>(i) * dim_,
                static_cast<size_t>(dim_)};
    }
    const std::vector<double>& coords() const { return coords_; }

    /// New PointSet holding rows `indices` in the given order.
    PointSet subset(std::span<const int> indices) const;

    /// Indices (i, j), i < j, of the closest pair at Euclidean distance
    /// <= tol, or nullopt if all points are pairwise distinct within tol.
    std::optional<std::pair<int, int>> find_duplicate(double tol = 1e-12) const;

private:
    std::vector<double> coords_;
    int dim_ = 0;
    int count_ = 0;
};

double dist_euclidean(std::span<const double> a, std::span<const double> b);
double dist_chebyshev(std::span<const double> a, std::span<const double> b);

/**
 * Discretized fill distance: max over c in `candidates` of the Euclidean
 * distance from c to its nearest point of X. The finite candidate set
 * stands in for the continuous domain; with the finest hierarchy level as
 * candidates the value is h_{X_m, X_M}, which preserves the level-to-level
 * ratios a slope fit consumes on quasi-uniform sets.
 */
double fill_distance(const PointSet& X, const PointSet& candidates);

/// Half the minimum pairwise Euclidean distance. Requires #X >= 2.
double separation_radius(const PointSet& X);

/**
 * Indices of the k nearest points to `center` in the Chebyshev norm,
 * ascending by distance, ties broken by ascending index. Uses an exhaustive
 * scan up to 10^4 points and a kd-tree above; both paths return identical
 * index lists.
 */
std::vector<int> knn_chebyshev(const PointSet& X, std::span<const double> center,
                               int k);

BoundingBox bounding_box(const PointSet& X);

/// Forward map y = (x - offset) / scale, applied per axis. Division by the
/// exact box extent sends the box edges to exactly 0 and 1.
struct AffineMap {
    std::vector<double> offset;
    std::vector<double> scale;

    void apply(std::span<const double> x, std::span<double> y) const;
    void invert(std::span<const double> y, std::span<double> x) const;
};

/**
 * Affine rescale of X onto [0,1]^d: each non-degenerate axis maps its
 * bounding-box extent to [0,1]; zero-extent axes keep scale 1 (offset only)
 * so the map stays invertible on lower-dimensional slices.
 */
std::pair<PointSet, AffineMap> rescale_to_unit_cube(const PointSet& X);

namespace detail {
/// Exhaustive-scan kNN (the oracle path for knn_chebyshev).
std::vector<int> knn_chebyshev_scan(const PointSet& X,
                                    std::span<const double> center, int k);
}  // namespace detail

}  // namespace salsa
