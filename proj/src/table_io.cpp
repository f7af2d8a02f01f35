#include "salsa/table_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "salsa/errors.hpp"

namespace salsa {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::string s = line;
    for (char& c : s)
        if (c == ',' || c == '\t' || c == '\r') c = ' ';
    std::vector<std::string> toks;
    std::istringstream in(s);
    std::string t;
    while (in >> t) toks.push_back(t);
    return toks;
}

bool is_comment_or_blank(const std::string& line) {
    for (char c : line) {
        if (c == ' ' || c == '\t' || c == '\r') continue;
        return c == '#';
    }
    return true;
}

double parse_cell(const std::string& tok, int line, int column) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + tok.size())
        throw DataError("line " + std::to_string(line) + ", column " +
                        std::to_string(column) + ": cannot parse '" + tok +
                        "'");
    if (!std::isfinite(v))
        throw DataError("line " + std::to_string(line) + ", column " +
                        std::to_string(column) + ": non-finite value");
    return v;
}

// Header is x,f / x1..xd,f; with_values=false drops the f requirement but
// tolerates (and ignores) a trailing f column.
int parse_header(const std::vector<std::string>& toks, int line,
                 bool with_values, bool& has_f) {
    std::vector<std::string> coord = toks;
    has_f = !toks.empty() && toks.back() == "f";
    if (with_values && !has_f)
        throw DataError("line " + std::to_string(line) +
                        ": header must end with an 'f' column");
    if (has_f) coord.pop_back();
    const int d = static_cast<int>(coord.size());
    if (d < 1)
        throw DataError("line " + std::to_string(line) +
                        ": header has no coordinate columns");
    const bool bare_x = d == 1 && (coord[0] == "x" || coord[0] == "x1");
    if (!bare_x) {
        for (int a = 0; a < d; ++a) {
            if (coord[a] != "x" + std::to_string(a + 1))
                throw DataError("line " + std::to_string(line) +
                                ": expected coordinate column x" +
                                std::to_string(a + 1) + ", got '" + coord[a] +
                                "'");
        }
    }
    return d;
}

Table read_table(const std::string& path, bool with_values) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file: " + path);

    Table out;
    std::vector<double> coords;
    std::string line;
    int lineno = 0;
    int d = -1;
    bool has_f = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_comment_or_blank(line)) continue;
        const auto toks = tokenize(line);
        if (d < 0) {
            d = parse_header(toks, lineno, with_values, has_f);
            continue;
        }
        const int want = d + (has_f ? 1 : 0);
        if (static_cast<int>(toks.size()) != want)
            throw DataError("line " + std::to_string(lineno) + ": expected " +
                            std::to_string(want) + " columns, got " +
                            std::to_string(toks.size()));
        for (int a = 0; a < d; ++a)
            coords.push_back(parse_cell(toks[a], lineno, a + 1));
        if (has_f) out.values.push_back(parse_cell(toks[d], lineno, d + 1));
        out.lines.push_back(lineno);
    }
    if (d < 0) throw DataError(path + ": no header row found");
    if (coords.empty()) throw DataError(path + ": no data rows");

    out.points = PointSet(std::move(coords), d);
    if (auto dup = out.points.find_duplicate()) {
        throw DataError("duplicate coordinates at lines " +
                        std::to_string(out.lines[dup->first]) + " and " +
                        std::to_string(out.lines[dup->second]));
    }
    return out;
}

void format_g17(std::string& dst, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    dst += buf;
}

void append_opt(std::string& dst, double v) {
    if (std::isfinite(v)) format_g17(dst, v);
}

}  // namespace

Table ingest(const std::string& path) { return read_table(path, true); }

PointSet ingest_points(const std::string& path) {
    return read_table(path, false).points;
}

void write_table(const std::string& path, const PointSet& points,
                 std::span<const double> values) {
    if (static_cast<int>(values.size()) != points.size())
        throw InvalidArgument("write_table: values size != point count");
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path);
    if (!out) throw DataError("cannot write: " + path);

    const int d = points.dim();
    std::string buf;
    if (d == 1) {
        buf = "x,f\n";
    } else {
        for (int a = 0; a < d; ++a) buf += "x" + std::to_string(a + 1) + ",";
        buf += "f\n";
    }
    for (int i = 0; i < points.size(); ++i) {
        const auto p = points[i];
        for (int a = 0; a < d; ++a) {
            format_g17(buf, p[a]);
            buf += ',';
        }
        format_g17(buf, values[i]);
        buf += '\n';
    }
    out << buf;
    if (!out) throw DataError("write failed: " + path);
}

void emit_report(const std::vector<SmoothnessReport>& reports,
                 const std::string& out_dir, const EmitOptions& options) {
    if (reports.empty()) throw InvalidArgument("emit_report: no reports");
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create output directory: " + out_dir);

    const int d = static_cast<int>(reports.front().center.size());
    const char* status_names[] = {"ok", "degenerate", "failed"};

    {
        std::string buf;
        for (int a = 0; a < d; ++a) buf += "x" + std::to_string(a + 1) + ",";
        buf += "beta_l2,beta_native,r2_l2,r2_native,status\n";
        for (const auto& r : reports) {
            for (int a = 0; a < d; ++a) {
                format_g17(buf, a < static_cast<int>(r.center.size())
                                    ? r.center[a]
                                    : std::numeric_limits<double>::quiet_NaN());
                buf += ',';
            }
            append_opt(buf, r.beta_l2);
            buf += ',';
            append_opt(buf, r.beta_native);
            buf += ',';
            if (r.fit_l2.valid) append_opt(buf, r.fit_l2.r_squared);
            buf += ',';
            if (r.fit_native.valid) append_opt(buf, r.fit_native.r_squared);
            buf += ',';
            buf += status_names[static_cast<int>(r.status)];
            buf += '\n';
        }
        std::ofstream out(fs::path(out_dir) / "smoothness.csv");
        if (!out) throw DataError("cannot write smoothness.csv in " + out_dir);
        out << buf;
        if (!out) throw DataError("write failed: smoothness.csv");
    }

    if (options.raw) {
        fs::create_directories(fs::path(out_dir) / "raw", ec);
        if (ec) throw DataError("cannot create raw/ in " + out_dir);
        char name[40];
        for (size_t i = 0; i < reports.size(); ++i) {
            const auto& r = reports[i];
            std::snprintf(name, sizeof(name), "center_%06zu.csv", i);
            std::string buf = "m,h,c2,cN,flag_coarse,flag_fine\n";
            for (size_t m = 0; m < r.h.size(); ++m) {
                buf += std::to_string(m + 1);
                buf += ',';
                append_opt(buf, r.h[m]);
                buf += ',';
                append_opt(buf, r.c2[m]);
                buf += ',';
                append_opt(buf, r.cN[m]);
                buf += ',';
                buf += r.flagged[m] ? '1' : '0';
                buf += ',';
                buf += r.flagged[m + 1] ? '1' : '0';
                buf += '\n';
            }
            std::ofstream out(fs::path(out_dir) / "raw" / name);
            if (!out) throw DataError("cannot write raw dump in " + out_dir);
            out << buf;
        }
    }

    {
        int n_ok = 0, n_degen = 0, n_failed = 0;
        int b_jump = 0, b_corner = 0, b_mid = 0, b_smooth = 0;
        int flagged = 0, truncated = 0;
        for (const auto& r : reports) {
            switch (r.status) {
                case SmoothnessReport::Status::ok: ++n_ok; break;
                case SmoothnessReport::Status::degenerate: ++n_degen; break;
                case SmoothnessReport::Status::failed: ++n_failed; break;
            }
            if (r.has_beta_l2()) {
                const double b = r.beta_l2;
                if (b < 0.75)
                    ++b_jump;
                else if (b < 1.75)
                    ++b_corner;
                else if (b < options.tau - 0.25)
                    ++b_mid;
                else
                    ++b_smooth;
            }
            for (char fl : r.flagged)
                if (fl) {
                    ++flagged;
                    break;
                }
            if (r.truncated_hierarchy) ++truncated;
        }
        std::ostringstream os;
        if (!options.summary_header.empty()) {
            os << "# run parameters\n" << options.summary_header;
            if (options.summary_header.back() != '\n') os << "\n";
            os << "\n";
        }
        os << "centers: " << reports.size() << "\n";
        os << "status ok: " << n_ok << "\n";
        os << "status degenerate: " << n_degen << "\n";
        os << "status failed: " << n_failed << "\n";
        os << "class jump (beta_l2 < 0.75): " << b_jump << "\n";
        os << "class corner (0.75 <= beta_l2 < 1.75): " << b_corner << "\n";
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%g", options.tau - 0.25);
        os << "class intermediate (1.75 <= beta_l2 < " << buf
           << "): " << b_mid << "\n";
        os << "class smooth (beta_l2 >= " << buf << "): " << b_smooth << "\n";
        os << "centers with conditioning-flagged levels: " << flagged << "\n";
        os << "centers with truncated hierarchies: " << truncated << "\n";
        std::ofstream out(fs::path(out_dir) / "summary.txt");
        if (!out) throw DataError("cannot write summary.txt in " + out_dir);
        out << os.str();
    }
}

}  // namespace salsa
