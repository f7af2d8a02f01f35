#pragma once

#include <span>
#include <string>
#include <vector>

#include "salsa/estimator.hpp"
#include "salsa/geometry.hpp"

namespace salsa {

/// One parsed data table: N points, N values, and each data row's original
/// line number in the file (for error reporting and duplicate diagnostics).
struct Table {
    PointSet points{1};
    std::vector<double> values;
    std::vector<int> lines;
};

/**
 * Read a delimited text table with header "x,f" (1D) or "x1,...,xd,f".
 * Comma or whitespace delimited; lines whose first non-blank character is
 * '#' are skipped. Rejects unparsable cells, non-finite values, and
 * duplicate coordinates (all reported with file line numbers).
 */
Table ingest(const std::string& path);

/// Same format without the trailing f column (center lists); a trailing f
/// column is accepted and ignored.
PointSet ingest_points(const std::string& path);

/// Write points and values in the format ingest reads, 17 significant
/// digits (round-trips exactly).
void write_table(const std::string& path, const PointSet& points,
                 std::span<const double> values);

struct EmitOptions {
    bool raw = false;           // also write raw/center_NNNNNN.csv dumps
    std::string summary_header; // run parameters echoed into summary.txt
    double tau = 3.0;           // smooth-bucket cut point is tau - 0.25
};

/**
 * Write smoothness.csv (one row per center: coordinates, beta_l2,
 * beta_native, r2_l2, r2_native, status), optional per-center raw dumps,
 * and summary.txt with class-bucket counts. Deterministic byte output.
 */
void emit_report(const std::vector<SmoothnessReport>& reports,
                 const std::string& out_dir, const EmitOptions& options = {});

}  // namespace salsa
