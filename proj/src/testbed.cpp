#include "salsa/testbed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "salsa/errors.hpp"

namespace salsa {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

double piecewise_1d(double x) {
    if (x < -0.4) return 6.0;
    if (x < -0.35) return 0.1 * std::abs(-20.0 * x - 9.0) + 6.0;
    if (x < -0.15) return 0.1 * std::abs(-20.0 * x - 5.0) + 6.0;
    if (x < -0.05) return 0.1 * std::abs(-20.0 * x - 1.0) + 6.0;
    if (x < 0.55) return 6.0 + std::sin(20.0 * kPi * x);
    return 0.2 * std::sin(6.0 * kPi * x);
}

double composite_2d(double x, double y) {
    // Smooth global modulation.
    double v = 0.5 * std::sin(4.0 * kPi * x) * std::sin(4.0 * kPi * y);

    // Linear ramp on a rectangle: kink along its left edge, value jumps on
    // the other three edges.
    if (x >= 0.5 && x <= 2.5 && y >= 0.5 && y <= 1.5) v += x - 0.5;

    // Curved ridge: tent profile across a sinusoidal crest line.
    {
        const double crest = 3.2 + 0.4 * std::sin(kPi * x / 1.5);
        v += 0.8 * std::max(0.0, 1.0 - std::abs(y - crest) / 0.25);
    }

    // Truncated cone: flat top, conical flank, kink at the rim r = 0.8.
    {
        const double r = std::hypot(x - 1.5, y - 4.5);
        v += std::clamp(1.5 * (1.0 - r / 0.8), 0.0, 1.0);
    }

    // Exponential peak: infinitely steep only in derivatives at the center.
    v += std::exp(-std::hypot(x - 4.5, y - 2.0) / 0.4);

    // Damped oscillation: analytic (even powers of r only).
    {
        const double x0 = x - 4.8, y0 = y - 4.8;
        const double r2 = x0 * x0 + y0 * y0;
        v += 0.8 * std::exp(-2.0 * r2) * std::cos(8.0 * std::sqrt(r2));
    }

    // Unit-height block.
    if (x >= 3.2 && x <= 5.2 && y >= 0.4 && y <= 1.4) v += 1.0;

    return v;
}

double bunny_3d(std::span<const double> x, std::span<const double> c) {
    if (x.size() != 3 || c.size() != 3)
        throw InvalidArgument("bunny_3d: expects 3D point and center");
    const double dx = x[0] - c[0];
    const double dy = x[1] - c[1];
    const double dz = x[2] - c[2];
    if (x[2] > 0.5 * std::sin(5.0 * x[0] + 2.0 * x[1])) {
        const double r2 = dx * dx + dy * dy + dz * dz;
        if (r2 == 0.0)
            throw InvalidArgument("bunny_3d: evaluation at the excluded center");
        return 4.0 * dz / std::sqrt(r2);
    }
    return 1.0;
}

namespace {

std::map<std::string, TestFunction> build_registry() {
    using K = Annotation::Kind;
    std::map<std::string, TestFunction> reg;

    {
        TestFunction tf;
        tf.name = "piecewise1d";
        tf.dim = 1;
        tf.evaluator = [](std::span<const double> p) { return piecewise_1d(p[0]); };
        tf.domain = BoundingBox{{-1.0}, {1.0}};
        tf.annotations = {
            {"jump at x=-0.4", {-0.4}, 0.5, K::jump},
            {"jump at x=0.55", {0.55}, 0.5, K::jump},
            {"corner at x=-0.35", {-0.35}, 1.5, K::corner},
            {"corner at x=-0.25", {-0.25}, 1.5, K::corner},
            {"corner at x=-0.15", {-0.15}, 1.5, K::corner},
            {"corner at x=-0.05", {-0.05}, 1.5, K::corner},
            {"smooth sine region", {0.25}, kNaN, K::smooth},
            {"constant plateau", {-0.7}, kNaN, K::smooth},
        };
        reg.emplace(tf.name, std::move(tf));
    }
    {
        TestFunction tf;
        tf.name = "composite2d";
        tf.dim = 2;
        tf.evaluator = [](std::span<const double> p) {
            return composite_2d(p[0], p[1]);
        };
        tf.domain = BoundingBox{{0.0, 0.0}, {6.0, 6.0}};
        tf.annotations = {
            {"block edge", {4.2, 1.4}, 0.5, K::jump},
            {"cone rim", {2.3, 4.5}, 1.5, K::corner},
            {"exponential peak center", {4.5, 2.0}, 2.0, K::point_singularity},
            {"smooth background", {0.6, 5.6}, kNaN, K::smooth},
        };
        reg.emplace(tf.name, std::move(tf));
    }
    {
        TestFunction tf;
        tf.name = "bunny3d";
        tf.dim = 3;
        const std::vector<double> c = {0.5, 0.5, 0.5};
        tf.evaluator = [c](std::span<const double> p) {
            return bunny_3d(p, std::span<const double>(c.data(), 3));
        };
        tf.domain = BoundingBox{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}};
        // z = 0.5*sin(5*0.3 + 2*0.25) = 0.454648... puts the probe on the
        // jump surface.
        tf.annotations = {
            {"jump surface", {0.3, 0.25, 0.45464871341284085}, 0.5, K::jump},
            {"radial center", {0.5, 0.5, 0.5}, 1.5, K::point_singularity},
            {"smooth upper region", {0.8, 0.8, 0.9}, kNaN, K::smooth},
        };
        reg.emplace(tf.name, std::move(tf));
    }
    return reg;
}

const std::map<std::string, TestFunction>& registry() {
    static const std::map<std::string, TestFunction> reg = build_registry();
    return reg;
}

double radical_inverse(long long i, int base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

}  // namespace

const TestFunction& test_function(const std::string& name) {
    const auto& reg = registry();
    auto it = reg.find(name);
    if (it == reg.end())
        throw InvalidArgument("unknown test function: " + name);
    return it->second;
}

std::vector<std::string> test_function_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : registry()) names.push_back(k);
    return names;
}

PointSet halton(int n, int dim) {
    if (n < 1) throw InvalidArgument("halton: n must be >= 1");
    static constexpr int primes[6] = {2, 3, 5, 7, 11, 13};
    if (dim < 1 || dim > 6)
        throw InvalidArgument("halton: dim must be in [1, 6]");
    std::vector<double> coords;
    coords.reserve(static_cast<size_t>(n) * dim);
    for (long long i = 1; i <= n; ++i)
        for (int a = 0; a < dim; ++a)
            coords.push_back(radical_inverse(i, primes[a]));
    return PointSet(std::move(coords), dim);
}

PointSet sample_grid(const BoundingBox& box, int per_axis) {
    const int d = box.dim();
    if (per_axis < 2) throw InvalidArgument("sample_grid: need >= 2 per axis");
    long long total = 1;
    for (int a = 0; a < d; ++a) {
        total *= per_axis;
        if (total > 20'000'000)
            throw InvalidArgument("sample_grid: grid too large");
    }
    std::vector<double> coords;
    coords.reserve(static_cast<size_t>(total) * d);
    std::vector<int> idx(d, 0);
    for (long long lin = 0; lin < total; ++lin) {
        long long rem = lin;
        for (int a = d - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(rem % per_axis);
            rem /= per_axis;
        }
        for (int a = 0; a < d; ++a)
            coords.push_back(box.lower[a] +
                             box.extent(a) * idx[a] / (per_axis - 1.0));
    }
    return PointSet(std::move(coords), d);
}

PointSet map_to_box(const PointSet& unit_points, const BoundingBox& box) {
    if (unit_points.dim() != box.dim())
        throw InvalidArgument("map_to_box: dimension mismatch");
    const int d = box.dim();
    std::vector<double> coords;
    coords.reserve(static_cast<size_t>(unit_points.size()) * d);
    for (int i = 0; i < unit_points.size(); ++i) {
        const auto p = unit_points[i];
        for (int a = 0; a < d; ++a)
            coords.push_back(box.lower[a] + box.extent(a) * p[a]);
    }
    return PointSet(std::move(coords), d);
}

}  // namespace salsa
