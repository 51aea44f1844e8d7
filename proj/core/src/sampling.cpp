#include "beampinn/sampling.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <random>
#include <stdexcept>

namespace beampinn {

namespace {

// Offsets stay clear of stratum edges so rounding never moves a sample
// into a neighbouring stratum.
constexpr double kEdgeMargin = 1e-9;

std::vector<double> stratified_axis(std::size_t n, double lo, double hi, std::mt19937_64& rng) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> out(n);
    const double width = (hi - lo) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = kEdgeMargin + (1.0 - 2.0 * kEdgeMargin) * unit(rng);
        out[i] = lo + (static_cast<double>(perm[i]) + u) * width;
    }
    return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

}  // namespace

std::vector<Point> lhs_sample(std::size_t n, const Rect& bounds, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("lhs_sample needs n >= 1");
    if (!(bounds.t_hi > bounds.t_lo) || !(bounds.x_hi > bounds.x_lo)) {
        throw std::invalid_argument("lhs_sample bounds are empty");
    }
    std::mt19937_64 rng(seed);
    const auto ts = stratified_axis(n, bounds.t_lo, bounds.t_hi, rng);
    const auto xs = stratified_axis(n, bounds.x_lo, bounds.x_hi, rng);
    std::vector<Point> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = Point{ts[i], xs[i]};
    return out;
}

std::vector<double> lhs_sample_1d(std::size_t n, double lo, double hi, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("lhs_sample needs n >= 1");
    if (!(hi > lo)) throw std::invalid_argument("lhs_sample bounds are empty");
    std::mt19937_64 rng(seed);
    return stratified_axis(n, lo, hi, rng);
}

PointSets build_point_sets(const BeamProblem& problem, PointCounts counts, std::uint64_t seed) {
    if (counts.pde == 0 || counts.ic == 0 || counts.bc == 0) {
        throw std::invalid_argument("point counts must all be positive");
    }
    PointSets sets;
    sets.seed = seed;
    sets.counts = counts;
    sets.pde = lhs_sample(counts.pde, Rect{0.0, problem.horizon, 0.0, problem.length}, derive_seed(seed, 1));
    sets.ic = lhs_sample_1d(counts.ic, 0.0, problem.length, derive_seed(seed, 2));
    sets.bc = lhs_sample_1d(counts.bc, 0.0, problem.horizon, derive_seed(seed, 3));
    return sets;
}

void write_point_sets_csv(const PointSets& points, std::ostream& out) {
    out << "kind,t,x\n";
    out << std::setprecision(17);
    for (const Point& p : points.pde) out << "pde," << p.t << ',' << p.x << '\n';
    for (double x : points.ic) out << "ic," << 0.0 << ',' << x << '\n';
    for (double t : points.bc) out << "bc," << t << ",\n";
}

Grid validation_grid(const BeamProblem& problem, int nt, int nx) {
    if (nt < 2 || nx < 2) throw std::invalid_argument("validation grid needs at least 2 points per axis");
    Grid g;
    g.nt = nt;
    g.nx = nx;
    g.horizon = problem.horizon;
    g.length = problem.length;
    g.points.reserve(static_cast<std::size_t>(nt) * static_cast<std::size_t>(nx));
    for (int i = 0; i < nt; ++i) {
        const double t = (i == nt - 1) ? problem.horizon : problem.horizon * i / (nt - 1);
        for (int j = 0; j < nx; ++j) {
            const double x = (j == nx - 1) ? problem.length : problem.length * j / (nx - 1);
            g.points.push_back(Point{t, x});
        }
    }
    return g;
}

}  // namespace beampinn
