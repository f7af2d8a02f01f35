#include "salsa/config.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "salsa/errors.hpp"

namespace salsa {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Matches name(inner) and returns inner.
std::optional<std::string> paren_arg(const std::string& value,
                                     const std::string& name) {
    if (value.size() < name.size() + 2) return std::nullopt;
    if (value.compare(0, name.size(), name) != 0) return std::nullopt;
    if (value[name.size()] != '(' || value.back() != ')') return std::nullopt;
    return trim(value.substr(name.size() + 1,
                             value.size() - name.size() - 2));
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": cannot parse real value '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": cannot parse integer '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

void apply_key(RunConfig& cfg, const std::string& key,
               const std::string& value) {
    if (key == "mode") {
        if (value == "analyze")
            cfg.mode = RunConfig::Mode::analyze;
        else if (value == "rates")
            cfg.mode = RunConfig::Mode::rates;
        else if (value == "synth")
            cfg.mode = RunConfig::Mode::synth;
        else
            throw ConfigError("mode: unknown value '" + value + "'");
    } else if (key == "kernel.tau") {
        cfg.kernel.tau = parse_real(key, value);
        if (!(cfg.kernel.tau > 0.0))
            throw ConfigError("kernel.tau: must be positive");
    } else if (key == "kernel.lengthscale_rule") {
        auto& rule = cfg.kernel.lengthscale_rule;
        if (value == "stencil_radius_x2")
            rule.kind = LengthscaleRule::Kind::stencil_radius_x2;
        else if (value == "neighbor_diam_x2")
            rule.kind = LengthscaleRule::Kind::neighbor_diam_x2;
        else if (value == "fill_times_diam")
            rule.kind = LengthscaleRule::Kind::fill_times_diam;
        else if (auto arg = paren_arg(value, "fixed")) {
            rule.kind = LengthscaleRule::Kind::fixed;
            rule.fixed_value = parse_real(key, *arg);
            if (!(rule.fixed_value > 0.0))
                throw ConfigError(
                    "kernel.lengthscale_rule: fixed value must be positive");
        } else {
            throw ConfigError("kernel.lengthscale_rule: unknown value '" +
                              value + "'");
        }
    } else if (key == "hierarchy.method") {
        if (value == "stencil")
            cfg.hierarchy.method = Hierarchy::Method::stencil;
        else if (value == "subsample")
            cfg.hierarchy.method = Hierarchy::Method::subsample;
        else
            throw ConfigError("hierarchy.method: unknown value '" + value +
                              "'");
    } else if (key == "hierarchy.levels") {
        cfg.hierarchy.levels = parse_int(key, value);
        if (cfg.hierarchy.levels < 3)
            throw ConfigError("hierarchy.levels: must be at least 3");
    } else if (key == "hierarchy.neighbors") {
        cfg.hierarchy.neighbors = parse_int(key, value);
        if (cfg.hierarchy.neighbors < 1)
            throw ConfigError("hierarchy.neighbors: must be at least 1");
    } else if (key == "hierarchy.stencil_radius_rule") {
        auto& rule = cfg.hierarchy.stencil_radius_rule;
        if (value == "fill") {
            rule.kind = StencilRadiusRule::Kind::fill;
        } else if (auto fx = paren_arg(value, "fixed")) {
            rule.kind = StencilRadiusRule::Kind::fixed;
            rule.value = parse_real(key, *fx);
            if (!(rule.value > 0.0))
                throw ConfigError(
                    "hierarchy.stencil_radius_rule: radius must be positive");
        } else if (auto mult = paren_arg(value, "fill_x")) {
            rule.kind = StencilRadiusRule::Kind::fill_x;
            rule.value = parse_real(key, *mult);
            if (!(rule.value > 0.0))
                throw ConfigError(
                    "hierarchy.stencil_radius_rule: multiplier must be "
                    "positive");
        } else {
            throw ConfigError("hierarchy.stencil_radius_rule: unknown value '" +
                              value + "'");
        }
    } else if (key == "fitting.drop_first") {
        cfg.fitting.drop_first = parse_bool(key, value);
    } else if (key == "fitting.floor") {
        cfg.fitting.floor = parse_real(key, value);
        if (!(cfg.fitting.floor > 0.0))
            throw ConfigError("fitting.floor: must be positive");
    } else if (key == "io.input") {
        cfg.io.input = value;
    } else if (key == "io.output") {
        cfg.io.output = value;
    } else if (key == "io.centers") {
        auto& c = cfg.io.centers;
        if (value == "all") {
            c.kind = CentersSpec::Kind::all;
        } else if (auto n = paren_arg(value, "grid")) {
            c.kind = CentersSpec::Kind::grid;
            c.grid_per_axis = parse_int(key, *n);
            if (c.grid_per_axis < 2)
                throw ConfigError("io.centers: grid needs at least 2 per axis");
        } else if (auto p = paren_arg(value, "file")) {
            c.kind = CentersSpec::Kind::file;
            c.path = *p;
            if (c.path.empty())
                throw ConfigError("io.centers: file path is empty");
        } else {
            throw ConfigError("io.centers: unknown value '" + value + "'");
        }
    } else if (key == "io.function") {
        cfg.io.function = value;
    } else if (key == "io.raw") {
        cfg.io.raw = parse_bool(key, value);
    } else if (key == "threads") {
        cfg.threads = parse_int(key, value);
        if (cfg.threads < 0) throw ConfigError("threads: must be >= 0");
    } else {
        throw ConfigError("unknown config key: " + key);
    }
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key=value");
        apply_key(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    if (cfg.hierarchy.neighbors < cfg.hierarchy.levels)
        throw ConfigError(
            "hierarchy.neighbors: fewer neighbors than subsample levels");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string config_to_text(const RunConfig& cfg) {
    std::ostringstream os;
    char buf[64];
    const auto real = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };

    os << "mode = "
       << (cfg.mode == RunConfig::Mode::analyze
               ? "analyze"
               : cfg.mode == RunConfig::Mode::rates ? "rates" : "synth")
       << "\n";
    os << "kernel.tau = " << real(cfg.kernel.tau) << "\n";
    os << "kernel.lengthscale_rule = ";
    switch (cfg.kernel.lengthscale_rule.kind) {
        case LengthscaleRule::Kind::stencil_radius_x2:
            os << "stencil_radius_x2";
            break;
        case LengthscaleRule::Kind::neighbor_diam_x2:
            os << "neighbor_diam_x2";
            break;
        case LengthscaleRule::Kind::fill_times_diam:
            os << "fill_times_diam";
            break;
        case LengthscaleRule::Kind::fixed:
            os << "fixed(" << real(cfg.kernel.lengthscale_rule.fixed_value)
               << ")";
            break;
    }
    os << "\n";
    os << "hierarchy.method = "
       << (cfg.hierarchy.method == Hierarchy::Method::stencil ? "stencil"
                                                              : "subsample")
       << "\n";
    os << "hierarchy.levels = " << cfg.hierarchy.levels << "\n";
    os << "hierarchy.neighbors = " << cfg.hierarchy.neighbors << "\n";
    os << "hierarchy.stencil_radius_rule = ";
    switch (cfg.hierarchy.stencil_radius_rule.kind) {
        case StencilRadiusRule::Kind::fixed:
            os << "fixed(" << real(cfg.hierarchy.stencil_radius_rule.value)
               << ")";
            break;
        case StencilRadiusRule::Kind::fill:
            os << "fill";
            break;
        case StencilRadiusRule::Kind::fill_x:
            os << "fill_x(" << real(cfg.hierarchy.stencil_radius_rule.value)
               << ")";
            break;
    }
    os << "\n";
    os << "fitting.drop_first = " << (cfg.fitting.drop_first ? "true" : "false")
       << "\n";
    os << "fitting.floor = " << real(cfg.fitting.floor) << "\n";
    if (!cfg.io.input.empty()) os << "io.input = " << cfg.io.input << "\n";
    if (!cfg.io.output.empty()) os << "io.output = " << cfg.io.output << "\n";
    os << "io.centers = ";
    switch (cfg.io.centers.kind) {
        case CentersSpec::Kind::all:
            os << "all";
            break;
        case CentersSpec::Kind::grid:
            os << "grid(" << cfg.io.centers.grid_per_axis << ")";
            break;
        case CentersSpec::Kind::file:
            os << "file(" << cfg.io.centers.path << ")";
            break;
    }
    os << "\n";
    if (!cfg.io.function.empty())
        os << "io.function = " << cfg.io.function << "\n";
    os << "io.raw = " << (cfg.io.raw ? "true" : "false") << "\n";
    os << "threads = " << cfg.threads << "\n";
    return os.str();
}

}  // namespace salsa
