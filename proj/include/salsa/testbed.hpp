#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "salsa/geometry.hpp"

namespace salsa {

// Closed-form benchmark fields with known local smoothness, plus the
// samplers used to materialize them as scattered datasets.

double piecewise_1d(double x);

double composite_2d(double x, double y);

// Radial jump field: 4(z-cz)/r above the surface z = 0.5*sin(5x+2y), 1 below.
// The center c itself is excluded (the formula divides by the distance to c).
double bunny_3d(std::span<const double> x, std::span<const double> c);

struct Annotation {
    enum class Kind { jump, corner, smooth, point_singularity };
    std::string where;          // human-readable location descriptor
    std::vector<double> probe;  // representative center exhibiting the feature
    double beta_expected;       // NaN for smooth (meaning: beta at least tau)
    Kind kind = Kind::smooth;
};

struct TestFunction {
    std::string name;
    int dim = 1;
    std::function<double(std::span<const double>)> evaluator;
    BoundingBox domain;
    std::vector<Annotation> annotations;
};

const TestFunction& test_function(const std::string& name);
std::vector<std::string> test_function_names();

// First n Halton points in (0,1)^d, bases = first d primes, index from 1.
PointSet halton(int n, int dim);

// Tensor grid with per_axis points per axis, endpoints included.
PointSet sample_grid(const BoundingBox& box, int per_axis);

// Affine image of unit-cube points in the given box.
PointSet map_to_box(const PointSet& unit_points, const BoundingBox& box);

}  // namespace salsa
