#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "beampinn/beam_problem.hpp"

namespace beampinn {

struct Point {
    double t = 0.0;
    double x = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

struct Rect {
    double t_lo = 0.0;
    double t_hi = 1.0;
    double x_lo = 0.0;
    double x_hi = 1.0;
};

/// Latin Hypercube sample: along each axis the n equal-width strata hold
/// exactly one point each. Throws std::invalid_argument for n = 0.
std::vector<Point> lhs_sample(std::size_t n, const Rect& bounds, std::uint64_t seed);
std::vector<double> lhs_sample_1d(std::size_t n, double lo, double hi, std::uint64_t seed);

struct PointCounts {
    std::size_t pde = 10000;
    std::size_t ic = 200;
    std::size_t bc = 200;
};

/// Collocation (t, x) pairs, initial-condition x values (t = 0) and boundary
/// t values (evaluated at x = 0 and x = L).
struct PointSets {
    std::vector<Point> pde;
    std::vector<double> ic;
    std::vector<double> bc;
    std::uint64_t seed = 0;
    PointCounts counts{};
};

PointSets build_point_sets(const BeamProblem& problem, PointCounts counts, std::uint64_t seed);

/// CSV dump with header `kind,t,x`.
void write_point_sets_csv(const PointSets& points, std::ostream& out);

/// Uniform tensor grid with both endpoints included, t-major.
struct Grid {
    int nt = 0;
    int nx = 0;
    double horizon = 0.0;
    double length = 0.0;
    std::vector<Point> points;

    double dt() const noexcept { return horizon / (nt - 1); }
    double dx() const noexcept { return length / (nx - 1); }
};

Grid validation_grid(const BeamProblem& problem, int nt = 100, int nx = 100);

}  // namespace beampinn
