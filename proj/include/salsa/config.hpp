#pragma once

#include <string>

#include "salsa/estimator.hpp"
#include "salsa/hierarchy.hpp"

namespace salsa {

/// How the base stencil radius is chosen in stencil mode.
struct StencilRadiusRule {
    enum class Kind { fixed, fill, fill_x };
    Kind kind = Kind::fill;
    double value = 0.0;  // fixed radius, or the multiplier for fill_x
};

/// Where the estimation centers come from.
struct CentersSpec {
    enum class Kind { all, grid, file };
    Kind kind = Kind::all;
    int grid_per_axis = 0;
    std::string path;
};

/// Flat key=value run configuration (see parse_config_text for the keys).
struct RunConfig {
    enum class Mode { analyze, rates, synth };
    Mode mode = Mode::analyze;

    struct {
        double tau = 3.0;
        LengthscaleRule lengthscale_rule;
    } kernel;

    struct {
        Hierarchy::Method method = Hierarchy::Method::subsample;
        int levels = 8;
        int neighbors = 200;
        StencilRadiusRule stencil_radius_rule;
    } hierarchy;

    struct {
        bool drop_first = false;
        double floor = 1e2;  // floor factor on the squared-difference scale
    } fitting;

    struct {
        std::string input;
        std::string output;
        CentersSpec centers;
        std::string function;  // built-in test function (stencil mode)
        bool raw = false;      // also dump per-center level tables
    } io;

    int threads = 0;  // worker pool size; 0 = hardware parallelism
};

/**
 * Parse a flat key=value config. Keys:
 *   mode                          analyze | rates | synth
 *   kernel.tau                    real > 0
 *   kernel.lengthscale_rule       stencil_radius_x2 | neighbor_diam_x2 |
 *                                 fill_times_diam | fixed(v)
 *   hierarchy.method              stencil | subsample
 *   hierarchy.levels              integer >= 3
 *   hierarchy.neighbors           integer >= hierarchy.levels
 *   hierarchy.stencil_radius_rule fixed(v) | fill | fill_x(k)
 *   fitting.drop_first            true | false
 *   fitting.floor                 real > 0
 *   io.input                      path
 *   io.output                     path
 *   io.centers                    all | grid(n) | file(path)
 *   io.function                   built-in test function name
 *   io.raw                        true | false
 *   threads                       integer >= 0
 * Lines starting with '#' and blank lines are skipped. Unknown keys and
 * malformed values raise ConfigError naming the field.
 */
RunConfig parse_config_text(const std::string& text);

/// parse_config_text on the contents of a file.
RunConfig load_config(const std::string& path);

/// Serialize back to the key=value form accepted by parse_config_text.
std::string config_to_text(const RunConfig& cfg);

}  // namespace salsa
