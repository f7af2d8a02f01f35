#pragma once

#include <optional>
#include <span>
#include <vector>

#include "salsa/geometry.hpp"

namespace salsa {

/**
 * Nested point-set sequence X_1 c X_2 c ... c X_M with per-level
 * fill-distance proxies.
 *
 * master holds the coordinates of X_M; levels[m] lists the master rows of
 * X_{m+1} (index-set inclusion gives exact nestedness); h_proxy[m] is the
 * regression abscissa for level m+1 and decreases geometrically (ratio
 * within [0.3, 0.7] on quasi-uniform inputs).
 */
struct Hierarchy {
    enum class Method { stencil, subsample };

    PointSet master;
    std::vector<std::vector<int>> levels;
    std::vector<double> h_proxy;
    Method method = Method::stencil;

    /// Subsample hierarchies: master row -> row in the original neighbor
    /// set (so sampled data values can be gathered). Empty for stencils.
    std::vector<int> master_source;

    /// Levels originally requested; fewer present means the construction
    /// truncated (subsampling stopped growing).
    int requested_levels = 0;

    int level_count() const { return static_cast<int>(levels.size()); }
    bool truncated() const { return level_count() < requested_levels; }

    /// Coordinates of X_{m+1} (0-based level index).
    PointSet level_points(int m) const;

    /// Sub-hierarchy of levels [lo, hi] (0-based, inclusive); master and
    /// index sets are preserved, only the level window narrows.
    Hierarchy window(int lo, int hi) const;
};

/**
 * Nested tensor-grid stencils centered at a point: level m spans
 * [center - radius, center + radius]^d with E_m nodes per edge, E_1 = 3 and
 * E_{m+1} = 2 E_m - 1 (sizes 3, 5, 9, 17, ... per axis), nested by midpoint
 * insertion. Nodes outside `domain` are dropped (boundary clipping); a level
 * left with fewer than 2 nodes is an error. h_proxy[m] is the exact grid
 * spacing 2 * radius / (E_m - 1).
 */
Hierarchy fixed_stencils(std::span<const double> center, double radius, int M,
                         const BoundingBox& domain);

struct SubsampleOptions {
    /// Box whose dyadic subdivision defines the cells. Default: the tight
    /// bounding box of the neighbors (affine rescale onto the unit cube).
    std::optional<BoundingBox> partition_box;
    /// Replace the analytic 2^{-m} h_proxy with measured fill distances
    /// (errors if the measured sequence fails to decrease strictly).
    bool measured_fill = false;
};

/**
 * Uniform cell subsampling: for scales m = 0..M-1 partition the (rescaled)
 * unit cube into 2^{md} half-open cells (the last cell per axis closed);
 * each nonempty cell contributes the point nearest its midpoint (ties ->
 * lowest input index); level sets are cumulative unions across scales, so
 * nestedness is structural. h_proxy[m] = 2^{-m} * diam(partition box) / 2.
 * If a scale adds no new representative the hierarchy is truncated there
 * (check truncated()).
 */
Hierarchy uniform_subsample(const PointSet& neighbors, int M,
                            const SubsampleOptions& options = {});

}  // namespace salsa
