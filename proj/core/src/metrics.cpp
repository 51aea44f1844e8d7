#include "beampinn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace beampinn {

namespace {

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

double median_of(std::vector<double> v) {
    const std::size_t n = v.size();
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (n % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
}

}  // namespace

MetricsReport metrics_from_fields(std::span<const double> predicted, std::span<const double> exact,
                                  const Grid& grid) {
    const std::size_t n = grid.points.size();
    if (n == 0) throw std::invalid_argument("validation grid is empty");
    if (predicted.size() != n || exact.size() != n) {
        throw std::invalid_argument("field sizes do not match the grid");
    }
    double err2 = 0.0;
    double ref2 = 0.0;
    double sum_abs = 0.0;
    double max_abs = 0.0;
    std::vector<double> abs_err(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double e = predicted[i] - exact[i];
        err2 += e * e;
        ref2 += exact[i] * exact[i];
        abs_err[i] = std::fabs(e);
        sum_abs += abs_err[i];
        max_abs = std::max(max_abs, abs_err[i]);
    }
    if (ref2 == 0.0) throw std::invalid_argument("exact field is identically zero; relative L2 undefined");

    MetricsReport r;
    r.l2_rel = std::sqrt(err2) / std::sqrt(ref2);
    r.l2_abs = std::sqrt(err2 * grid.dt() * grid.dx());
    r.max_abs = max_abs;
    r.mean_abs = sum_abs / static_cast<double>(n);
    r.median_abs = median_of(std::move(abs_err));
    r.grid_nt = grid.nt;
    r.grid_nx = grid.nx;
    return r;
}

MetricsReport evaluate_metrics(const HybridModel& model, const BeamProblem& problem, const Grid& grid) {
    problem.validate();
    std::vector<double> pred(grid.points.size());
    std::vector<double> exact(grid.points.size());
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        const Point& p = grid.points[i];
        pred[i] = eval_model(model, p.t, p.x);
        exact[i] = exact_solution(problem, p.t, p.x);
    }
    MetricsReport r = metrics_from_fields(pred, exact, grid);
    r.problem_fingerprint = problem_fingerprint(problem);
    r.model_fingerprint = model_fingerprint(model);
    return r;
}

std::string problem_fingerprint(const BeamProblem& problem) {
    const std::string text = problem_to_json(problem);
    return hex64(fnv1a(text.data(), text.size()));
}

std::string model_fingerprint(const HybridModel& model) {
    const auto p = model.params();
    std::uint64_t h = fnv1a(model.config().layer_dims.data(), model.config().layer_dims.size() * sizeof(int));
    const double geom[2] = {model.length(), model.wave_speed()};
    h = fnv1a(geom, sizeof(geom), h);
    return hex64(fnv1a(p.data(), p.size_bytes(), h));
}

std::int64_t batch_size_estimate(std::int64_t mem_bytes, std::int64_t n_params) {
    if (mem_bytes <= 0 || n_params <= 0) {
        throw std::invalid_argument("batch_size_estimate: memory and parameter count must be positive");
    }
    // Integer form of floor(0.95 m / (16 p)) = floor(95 m / (1600 p)), free of rounding.
    const __int128 num = static_cast<__int128>(mem_bytes) * 95;
    const __int128 den = static_cast<__int128>(n_params) * 1600;
    const auto batch = static_cast<std::int64_t>(num / den);
    if (batch < 1) throw std::invalid_argument("batch_size_estimate: memory too small for one sample");
    return batch;
}

GradCheckReport grad_check(const HybridModel& model, const BeamProblem& problem, const PointSets& points,
                           double eps, const GradCheckOptions& options) {
    if (!(eps >= 1e-8 && eps <= 1e-4)) throw std::invalid_argument("grad_check: eps must lie in [1e-8, 1e-4]");
    const RegKind reg = options.lambda_reg > 0.0 ? RegKind::kWeightDecay : RegKind::kNone;

    const LossTerms terms = loss_terms_taped(model, problem, points, reg);
    const TotalLoss base = combine_terms(terms, model.harmonics(), options.lambda_reg, options.scale_const);
    const LossBreakdown& w = base.breakdown;
    auto frozen_total = [&](const HybridModel& m) {
        const LossBreakdown l = loss_components(m, problem, points, reg);
        return w.w_pde * l.l_pde + w.w_ic * l.l_ic + w.w_ic_t * l.l_ic_t + w.w_bc * l.l_bc +
               options.lambda_reg * l.l_reg;
    };

    // A few Fourier coefficients and lambda always; the rest drawn from the network.
    const std::size_t n = model.size();
    std::vector<std::size_t> ids;
    const std::size_t head = model.net_offset();
    std::mt19937_64 rng(options.seed);
    std::vector<std::size_t> fourier(head - 1);
    std::iota(fourier.begin(), fourier.end(), std::size_t{0});
    std::shuffle(fourier.begin(), fourier.end(), rng);
    const std::size_t take_fourier = std::min<std::size_t>(fourier.size(), std::max<std::size_t>(1, options.samples / 5));
    ids.assign(fourier.begin(), fourier.begin() + static_cast<std::ptrdiff_t>(take_fourier));
    if (ids.size() < options.samples) ids.push_back(model.lambda_index());
    std::vector<std::size_t> net(n - head);
    std::iota(net.begin(), net.end(), head);
    std::shuffle(net.begin(), net.end(), rng);
    for (std::size_t i = 0; i < net.size() && ids.size() < options.samples; ++i) ids.push_back(net[i]);
    std::sort(ids.begin(), ids.end());

    GradCheckReport report;
    report.eps = eps;
    HybridModel probe = model;
    const double floor = options.atol * std::max(1.0, std::fabs(w.weighted_sum()));
    for (std::size_t id : ids) {
        const double v = model.params()[id];
        probe.params()[id] = v + eps;
        const double fp = frozen_total(probe);
        probe.params()[id] = v - eps;
        const double fm = frozen_total(probe);
        probe.params()[id] = v;
        const double fd = (fp - fm) / (2.0 * eps);
        const double ad = base.gradient[id];
        const double denom = std::max({std::fabs(fd), std::fabs(ad), floor});
        const double rel = std::fabs(fd - ad) / denom;
        if (!(rel <= report.max_rel_error)) {
            report.max_rel_error = std::isnan(rel) ? std::numeric_limits<double>::infinity() : rel;
            report.worst_param = id;
        }
        ++report.checked;
    }
    return report;
}

}  // namespace beampinn
