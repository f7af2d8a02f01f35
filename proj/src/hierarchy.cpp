#include "salsa/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>

#include "salsa/errors.hpp"

namespace salsa {

PointSet Hierarchy::level_points(int m) const {
    return master.subset(levels.at(m));
}

Hierarchy Hierarchy::window(int lo, int hi) const {
    if (lo < 0 || hi >= level_count() || lo > hi)
        throw InvalidArgument("Hierarchy::window: bad level range");
    Hierarchy out;
    out.master = master;
    out.levels.assign(levels.begin() + lo, levels.begin() + hi + 1);
    out.h_proxy.assign(h_proxy.begin() + lo, h_proxy.begin() + hi + 1);
    out.method = method;
    out.master_source = master_source;
    out.requested_levels = hi - lo + 1;
    return out;
}

Hierarchy fixed_stencils(std::span<const double> center, double radius, int M,
                         const BoundingBox& domain) {
    const int d = static_cast<int>(center.size());
    if (d < 1) throw InvalidArgument("fixed_stencils: empty center");
    if (!(radius > 0.0)) throw InvalidArgument("fixed_stencils: radius must be > 0");
    if (M < 3) throw InvalidArgument("fixed_stencils: M must be >= 3");
    if (domain.dim() != d)
        throw InvalidArgument("fixed_stencils: domain dimension mismatch");

    const long long edge = (1LL << M) + 1;  // E_M nodes per axis
    long long total = 1;
    for (int a = 0; a < d; ++a) {
        total *= edge;
        if (total > 5'000'000)
            throw InvalidArgument("fixed_stencils: stencil node count too large");
    }

    const long long half = 1LL << (M - 1);
    const double step = 2.0 * radius / static_cast<double>(1LL << M);

    std::vector<double> tol(d);
    for (int a = 0; a < d; ++a)
        tol[a] = 1e-12 * std::max({1.0, std::abs(domain.lower[a]),
                                   std::abs(domain.upper[a])});

    // Pass 1: enumerate the finest grid, keep in-domain nodes as master.
    std::vector<int> row_of(static_cast<size_t>(total), -1);
    std::vector<double> coords;
    std::vector<long long> ji(d);
    std::vector<double> x(d);
    int rows = 0;
    for (long long lin = 0; lin < total; ++lin) {
        long long rem = lin;
        for (int a = d - 1; a >= 0; --a) {
            ji[a] = rem % edge;
            rem /= edge;
        }
        bool inside = true;
        for (int a = 0; a < d && inside; ++a) {
            x[a] = center[a] + static_cast<double>(ji[a] - half) * step;
            inside = x[a] >= domain.lower[a] - tol[a] &&
                     x[a] <= domain.upper[a] + tol[a];
        }
        if (!inside) continue;
        coords.insert(coords.end(), x.begin(), x.end());
        row_of[static_cast<size_t>(lin)] = rows++;
    }

    Hierarchy H;
    H.method = Hierarchy::Method::stencil;
    H.master = PointSet(std::move(coords), d);
    H.requested_levels = M;

    // Pass 2: level ell consists of the finest-grid nodes whose per-axis
    // index is a multiple of 2^{M-ell}; enumerate each level grid directly.
    for (int ell = 1; ell <= M; ++ell) {
        const long long stride = 1LL << (M - ell);
        const long long count = (1LL << ell) + 1;  // E_ell
        long long level_total = 1;
        for (int a = 0; a < d; ++a) level_total *= count;

        std::vector<int> idx;
        idx.reserve(static_cast<size_t>(level_total));
        for (long long lin = 0; lin < level_total; ++lin) {
            long long rem = lin;
            long long fine_lin = 0;
            for (int a = 0; a < d; ++a) {
                // reconstruct in axis-major order to match pass 1
                long long t = rem;
                for (int b = d - 1; b > a; --b) t /= count;
                t %= count;
                fine_lin = fine_lin * edge + t * stride;
            }
            const int row = row_of[static_cast<size_t>(fine_lin)];
            if (row >= 0) idx.push_back(row);
        }
        if (static_cast<int>(idx.size()) < 2)
            throw DataError("fixed_stencils: level " + std::to_string(ell) +
                            " has fewer than 2 nodes after domain clipping");
        H.levels.push_back(std::move(idx));
        H.h_proxy.push_back(2.0 * radius / static_cast<double>((1LL << ell)));
    }
    return H;
}

Hierarchy uniform_subsample(const PointSet& neighbors, int M,
                            const SubsampleOptions& options) {
    if (neighbors.empty())
        throw InvalidArgument("uniform_subsample: empty neighbor set");
    if (M < 1) throw InvalidArgument("uniform_subsample: M must be >= 1");
    const int d = neighbors.dim();
    if (static_cast<long long>(M - 1) * d > 62)
        throw InvalidArgument("uniform_subsample: cell index space too large");

    BoundingBox box;
    if (options.partition_box) {
        box = *options.partition_box;
        if (box.dim() != d)
            throw InvalidArgument("uniform_subsample: partition box dimension mismatch");
    } else {
        box = bounding_box(neighbors);
    }

    // Rescale into the unit cube of the partition box (degenerate axes keep
    // scale 1, matching rescale_to_unit_cube semantics).
    std::vector<double> scale(d);
    for (int a = 0; a < d; ++a) {
        const double e = box.extent(a);
        scale[a] = (e > 0.0) ? e : 1.0;
    }
    const int n = neighbors.size();
    std::vector<double> y(static_cast<size_t>(n) * d);
    for (int i = 0; i < n; ++i) {
        auto p = neighbors[i];
        for (int a = 0; a < d; ++a)
            y[static_cast<size_t>(i) * d + a] = (p[a] - box.lower[a]) / scale[a];
    }

    Hierarchy H;
    H.method = Hierarchy::Method::subsample;
    H.requested_levels = M;

    std::vector<char> selected(n, 0);
    std::vector<int> order;  // master rows in selection order
    const double diam = box.diameter();

    for (int m = 0; m < M; ++m) {
        const long long cells = 1LL << m;  // per axis
        struct CellBest {
            double dist;
            int idx;
        };
        std::map<int64_t, CellBest> best;  // ordered: deterministic append order
        for (int i = 0; i < n; ++i) {
            int64_t key = 0;
            double dist_sq = 0.0;
            for (int a = 0; a < d; ++a) {
                const double ya = y[static_cast<size_t>(i) * d + a];
                long long c = static_cast<long long>(std::floor(ya * cells));
                c = std::clamp(c, 0LL, cells - 1);  // last cell closed
                key = key * cells + c;
                const double mid = (static_cast<double>(c) + 0.5) / cells;
                dist_sq += (ya - mid) * (ya - mid);
            }
            auto it = best.find(key);
            if (it == best.end() || dist_sq < it->second.dist ||
                (dist_sq == it->second.dist && i < it->second.idx))
                best[key] = CellBest{dist_sq, i};
        }

        int added = 0;
        for (const auto& [key, cb] : best) {
            (void)key;
            if (!selected[cb.idx]) {
                selected[cb.idx] = 1;
                order.push_back(cb.idx);
                ++added;
            }
        }
        if (added == 0) break;  // levels stopped growing: truncate here

        std::vector<int> level(order.size());
        for (size_t i = 0; i < order.size(); ++i) level[i] = static_cast<int>(i);
        H.levels.push_back(std::move(level));
        H.h_proxy.push_back(std::ldexp(diam / 2.0, -m));  // 2^{-m} * diam/2
    }

    H.master = neighbors.subset(order);
    H.master_source = std::move(order);

    if (options.measured_fill) {
        for (int m = 0; m < H.level_count(); ++m)
            H.h_proxy[m] = fill_distance(H.level_points(m), neighbors);
        for (int m = 0; m + 1 < H.level_count(); ++m)
            if (!(H.h_proxy[m + 1] < H.h_proxy[m]))
                throw DataError(
                    "uniform_subsample: measured fill distances not strictly "
                    "decreasing; use the analytic h proxy");
    }
    return H;
}

}  // namespace salsa
