#pragma once

#include <span>
#include <vector>

#include "salsa/geometry.hpp"

namespace salsa {

/**
 * Static kd-tree over a PointSet for exact nearest-neighbor queries.
 *
 * Supports the Chebyshev and Euclidean norms through box-distance pruning
 * that never discards a subtree whose closest possible point ties the
 * current k-th best, so results (including (distance, index) tie order)
 * match the exhaustive scan exactly.
 */
class KdTree {
public:
    enum class Metric { euclidean, chebyshev };

    explicit KdTree(const PointSet& points);

    /// k smallest (distance, index) pairs, ascending; k <= size required.
    std::vector<int> knn(std::span<const double> query, int k, Metric metric) const;

    /// Distance from query to the nearest stored point.
    double nearest_dist(std::span<const double> query, Metric metric) const;

private:
    struct Node {
        int left = -1, right = -1;  // children, -1 for leaf
        int begin = 0, end = 0;     // index range into order_ (leaves)
        int axis = 0;
        double split = 0.0;
        std::vector<double> box_lo, box_hi;
    };

    const PointSet& points_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
    int root_ = -1;

    int build(int begin, int end);

    struct Best;
    void search(int node, std::span<const double> q, Metric metric, Best& best) const;
};

}  // namespace salsa
