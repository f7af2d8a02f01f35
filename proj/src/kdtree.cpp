#include "salsa/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "salsa/errors.hpp"

namespace salsa {

namespace {

constexpr int kLeafSize = 16;

double box_distance(std::span<const double> q, const std::vector<double>& lo,
                    const std::vector<double>& hi, KdTree::Metric metric) {
    if (metric == KdTree::Metric::chebyshev) {
        double m = 0.0;
        for (size_t a = 0; a < lo.size(); ++a) {
            const double excess = std::max({0.0, lo[a] - q[a], q[a] - hi[a]});
            m = std::max(m, excess);
        }
        return m;
    }
    double s = 0.0;
    for (size_t a = 0; a < lo.size(); ++a) {
        const double excess = std::max({0.0, lo[a] - q[a], q[a] - hi[a]});
        s += excess * excess;
    }
    return std::sqrt(s);
}

double point_distance(std::span<const double> a, std::span<const double> b,
                      KdTree::Metric metric) {
    return metric == KdTree::Metric::chebyshev ? dist_chebyshev(a, b)
                                               : dist_euclidean(a, b);
}

}  // namespace

// Bounded best-k collector: max-heap ordered lexicographically by
// (distance, index) so tie handling matches the exhaustive scan.
struct KdTree::Best {
    int k;
    std::vector<std::pair<double, int>> heap;

    explicit Best(int k) : k(k) { heap.reserve(k); }

    bool full() const { return static_cast<int>(heap.size()) == k; }
    const std::pair<double, int>& worst() const { return heap.front(); }

    void offer(double d, int idx) {
        const std::pair<double, int> cand{d, idx};
        if (!full()) {
            heap.push_back(cand);
            std::push_heap(heap.begin(), heap.end());
        } else if (cand < heap.front()) {
            std::pop_heap(heap.begin(), heap.end());
            heap.back() = cand;
            std::push_heap(heap.begin(), heap.end());
        }
    }
};

KdTree::KdTree(const PointSet& points) : points_(points) {
    if (points_.empty()) throw InvalidArgument("KdTree: empty point set");
    order_.resize(points_.size());
    for (int i = 0; i < points_.size(); ++i) order_[i] = i;
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    root_ = build(0, points_.size());
}

int KdTree::build(int begin, int end) {
    Node node;
    node.begin = begin;
    node.end = end;

    const int d = points_.dim();
    node.box_lo.assign(points_[order_[begin]].begin(), points_[order_[begin]].end());
    node.box_hi = node.box_lo;
    for (int i = begin + 1; i < end; ++i) {
        auto p = points_[order_[i]];
        for (int a = 0; a < d; ++a) {
            node.box_lo[a] = std::min(node.box_lo[a], p[a]);
            node.box_hi[a] = std::max(node.box_hi[a], p[a]);
        }
    }

    if (end - begin > kLeafSize) {
        int axis = 0;
        double widest = -1.0;
        for (int a = 0; a < d; ++a) {
            const double w = node.box_hi[a] - node.box_lo[a];
            if (w > widest) {
                widest = w;
                axis = a;
            }
        }
        node.axis = axis;
        const int mid = begin + (end - begin) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid,
                         order_.begin() + end, [&](int i, int j) {
                             const double ci = points_[i][axis];
                             const double cj = points_[j][axis];
                             return ci < cj || (ci == cj && i < j);
                         });
        node.split = points_[order_[mid]][axis];
        const int self = static_cast<int>(nodes_.size());
        nodes_.push_back(node);
        const int left = build(begin, mid);
        const int right = build(mid, end);
        nodes_[self].left = left;
        nodes_[self].right = right;
        return self;
    }

    const int self = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    return self;
}

void KdTree::search(int idx, std::span<const double> q, Metric metric,
                    Best& best) const {
    const Node& node = nodes_[idx];
    if (node.left < 0) {
        for (int i = node.begin; i < node.end; ++i) {
            const int p = order_[i];
            best.offer(point_distance(points_[p], q, metric), p);
        }
        return;
    }
    const int near = (q[node.axis] < node.split) ? node.left : node.right;
    const int far = (near == node.left) ? node.right : node.left;
    search(near, q, metric, best);
    // Visit the far side whenever its box could still hold a point tying the
    // current worst: a tie with a smaller index must replace it.
    const Node& fnode = nodes_[far];
    const double bd = box_distance(q, fnode.box_lo, fnode.box_hi, metric);
    if (!best.full() || bd <= best.worst().first) search(far, q, metric, best);
}

std::vector<int> KdTree::knn(std::span<const double> query, int k,
                             Metric metric) const {
    if (k < 1 || k > points_.size())
        throw InvalidArgument("KdTree::knn: k out of range");
    Best best(k);
    search(root_, query, metric, best);
    std::sort(best.heap.begin(), best.heap.end());
    std::vector<int> out(k);
    for (int i = 0; i < k; ++i) out[i] = best.heap[i].second;
    return out;
}

double KdTree::nearest_dist(std::span<const double> query, Metric metric) const {
    Best best(1);
    search(root_, query, metric, best);
    return best.heap.front().first;
}

}  // namespace salsa
