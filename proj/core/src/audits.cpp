#include "beampinn/audits.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <random>
#include <string>

#include "beampinn/beam_problem.hpp"
#include "beampinn/hybrid_model.hpp"
#include "beampinn/loss.hpp"
#include "beampinn/metrics.hpp"
#include "beampinn/sampling.hpp"

namespace beampinn {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), f, a, b);
    return buf;
}

template <class Body>
AuditResult timed(const char* name, Body&& body) {
    const auto start = Clock::now();
    AuditResult r = body();
    r.name = name;
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return r;
}

// ---- random expression trees ----

enum class Op { kVar, kConst, kAdd, kSub, kMul, kScale, kTanh, kSin, kCos };

struct Node {
    Op op = Op::kVar;
    double c = 0.0;
    std::unique_ptr<Node> a;
    std::unique_ptr<Node> b;
};

std::unique_ptr<Node> random_tree(std::mt19937_64& rng, int depth) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto n = std::make_unique<Node>();
    if (depth <= 0) {
        n->op = (rng() % 4 == 0) ? Op::kConst : Op::kVar;
        n->c = unit(rng);
        return n;
    }
    static constexpr Op kInner[] = {Op::kAdd, Op::kSub, Op::kMul, Op::kScale, Op::kTanh, Op::kSin, Op::kCos};
    n->op = kInner[rng() % 7];
    n->c = 2.0 * unit(rng);
    n->a = random_tree(rng, depth - 1 - static_cast<int>(rng() % 2));
    if (n->op == Op::kAdd || n->op == Op::kSub || n->op == Op::kMul) {
        n->b = random_tree(rng, depth - 1 - static_cast<int>(rng() % 2));
    }
    return n;
}

bool uses_var(const Node& n) {
    if (n.op == Op::kVar) return true;
    return (n.a && uses_var(*n.a)) || (n.b && uses_var(*n.b));
}

long double eval_ld(const Node& n, long double u) {
    switch (n.op) {
        case Op::kVar: return u;
        case Op::kConst: return n.c;
        case Op::kAdd: return eval_ld(*n.a, u) + eval_ld(*n.b, u);
        case Op::kSub: return eval_ld(*n.a, u) - eval_ld(*n.b, u);
        case Op::kMul: return eval_ld(*n.a, u) * eval_ld(*n.b, u);
        case Op::kScale: return static_cast<long double>(n.c) * eval_ld(*n.a, u);
        case Op::kTanh: return std::tanh(eval_ld(*n.a, u));
        case Op::kSin: return std::sin(eval_ld(*n.a, u));
        case Op::kCos: return std::cos(eval_ld(*n.a, u));
    }
    return 0.0L;
}

Jet eval_jet(const Node& n, const Jet& u, const JetUnary& tanh_impl) {
    switch (n.op) {
        case Op::kVar: return u;
        case Op::kConst: return Jet::constant(n.c, u.order());
        case Op::kAdd: return eval_jet(*n.a, u, tanh_impl) + eval_jet(*n.b, u, tanh_impl);
        case Op::kSub: return eval_jet(*n.a, u, tanh_impl) - eval_jet(*n.b, u, tanh_impl);
        case Op::kMul: return eval_jet(*n.a, u, tanh_impl) * eval_jet(*n.b, u, tanh_impl);
        case Op::kScale: return n.c * eval_jet(*n.a, u, tanh_impl);
        case Op::kTanh: {
            const Jet inner = eval_jet(*n.a, u, tanh_impl);
            return tanh_impl ? tanh_impl(inner) : tanh(inner);
        }
        case Op::kSin: return sin(eval_jet(*n.a, u, tanh_impl));
        case Op::kCos: return cos(eval_jet(*n.a, u, tanh_impl));
    }
    return u;
}

// Central stencil for the k-th derivative with step h.
long double stencil(const Node& n, long double u, int k, long double h) {
    auto f = [&](long double s) { return eval_ld(n, u + s * h); };
    switch (k) {
        case 1: return (f(1) - f(-1)) / (2 * h);
        case 2: return (f(1) - 2 * f(0) + f(-1)) / (h * h);
        case 3: return (f(2) - 2 * f(1) + 2 * f(-1) - f(-2)) / (2 * h * h * h);
        default: return (f(2) - 4 * f(1) + 6 * f(0) - 4 * f(-1) + f(-2)) / (h * h * h * h);
    }
}

// Two Richardson levels on an O(h^2) stencil: O(h^6).
long double fd_derivative(const Node& n, long double u, int k) {
    const long double h = k <= 2 ? 1e-3L : 1e-2L;
    const long double d0 = stencil(n, u, k, h);
    const long double d1 = stencil(n, u, k, h / 2);
    const long double d2 = stencil(n, u, k, h / 4);
    const long double r0 = (4 * d1 - d0) / 3;
    const long double r1 = (4 * d2 - d1) / 3;
    return (16 * r1 - r0) / 15;
}

}  // namespace

AuditResult jet_audit(const JetAuditOptions& options) {
    return timed("jet", [&] {
        std::mt19937_64 rng(options.seed);
        std::uniform_real_distribution<double> where(-1.0, 1.0);
        AuditResult r;
        r.threshold = options.tolerance;
        int built = 0;
        int checks = 0;
        while (built < options.trees) {
            auto tree = random_tree(rng, 1 + static_cast<int>(rng() % static_cast<unsigned>(options.max_depth)));
            const double u0 = where(rng);
            if (!uses_var(*tree) || std::fabs(static_cast<double>(eval_ld(*tree, u0))) > 1e3) continue;
            ++built;
            for (int order : {1, 2, 4}) {
                const Jet j = eval_jet(*tree, Jet::seed(u0, order), options.tanh_impl);
                for (int k = 0; k <= order; ++k) {
                    const double exact = k == 0 ? static_cast<double>(eval_ld(*tree, u0))
                                                : static_cast<double>(fd_derivative(*tree, u0, k));
                    const double got = j.derivative(k);
                    const double err = std::fabs(got - exact) / std::max({std::fabs(got), std::fabs(exact), 1.0});
                    ++checks;
                    if (!(err <= r.metric)) {
                        r.metric = std::isnan(err) ? INFINITY : err;
                        r.detail = "worst at tree " + std::to_string(built) + ", order " + std::to_string(order) +
                                   ", derivative " + std::to_string(k);
                    }
                }
            }
        }
        r.passed = r.metric < options.tolerance;
        r.detail = std::to_string(built) + " trees, " + std::to_string(checks) + " derivatives; " + r.detail;
        return r;
    });
}

namespace {

HybridModel active_model(std::uint64_t seed) {
    ModelConfig cfg;
    cfg.xavier_gain = 1.0;
    cfg.initial_lambda = 0.5;
    return init_model(cfg, seed);
}

PointSets small_points(const BeamProblem& problem, std::uint64_t seed) {
    return build_point_sets(problem, PointCounts{48, 24, 24}, seed);
}

}  // namespace

AuditResult gradient_audit(double eps, std::uint64_t seed, double tolerance) {
    return timed("gradient", [&] {
        const BeamProblem problem = BeamProblem::single_mode();
        const HybridModel model = active_model(seed);
        const PointSets points = small_points(problem, seed);
        const GradCheckReport g = grad_check(model, problem, points, eps);
        AuditResult r;
        r.metric = g.max_rel_error;
        r.threshold = tolerance;
        r.passed = g.max_rel_error < tolerance && g.checked == 100;
        r.detail = std::to_string(g.checked) + " parameters, eps " + fmt("%g", eps) + ", worst id " +
                   std::to_string(g.worst_param);
        return r;
    });
}

AuditResult route_audit(std::uint64_t seed, double tolerance) {
    return timed("routes", [&] {
        const BeamProblem problem = BeamProblem::two_mode();
        const HybridModel model = active_model(seed);
        const PointSets points = small_points(problem, seed);
        const LossTerms a = loss_terms(model, problem, points, LossOptions{RegKind::kWeightDecay, true, 16});
        const LossTerms b = loss_terms_taped(model, problem, points, RegKind::kWeightDecay);
        auto rel = [](double x, double y) { return std::fabs(x - y) / std::max({std::fabs(x), std::fabs(y), 1e-20}); };
        auto vec_rel = [](const std::vector<double>& x, const std::vector<double>& y) {
            double num = 0.0;
            double den = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                num += (x[i] - y[i]) * (x[i] - y[i]);
                den += y[i] * y[i];
            }
            // Boundary terms vanish exactly on the batched route, not quite on the tape.
            return std::sqrt(num) / std::max(std::sqrt(den), 1e-8);
        };
        AuditResult r;
        r.threshold = tolerance;
        r.metric = std::max({rel(a.losses.l_pde, b.losses.l_pde), rel(a.losses.l_ic, b.losses.l_ic),
                             rel(a.losses.l_ic_t, b.losses.l_ic_t), rel(a.losses.l_bc, b.losses.l_bc),
                             rel(a.losses.l_reg, b.losses.l_reg), vec_rel(a.g_pde, b.g_pde), vec_rel(a.g_ic, b.g_ic),
                             vec_rel(a.g_ic_t, b.g_ic_t), vec_rel(a.g_bc, b.g_bc), vec_rel(a.g_reg, b.g_reg)});
        r.passed = r.metric < tolerance;
        r.detail = "batched vs taped, losses and per-term gradients";
        return r;
    });
}

AuditResult residual_audit(std::size_t points, std::uint64_t seed, double tolerance) {
    return timed("residual", [&] {
        const BeamProblem problem = BeamProblem::single_mode();
        ModelConfig cfg;
        cfg.length = problem.length;
        cfg.wave_speed = problem.wave_speed;
        HybridModel model = init_model(cfg, seed);
        model.clear();
        model.cos_coeffs()[0] = 1.0;
        const std::vector<Point> pts = lhs_sample(points, Rect{0.0, problem.horizon, 0.0, problem.length}, seed);
        AuditResult r;
        r.threshold = tolerance;
        double worst_exact = 0.0;
        for (const Point& p : pts) {
            r.metric = std::max(r.metric, std::fabs(pde_residual(model, problem, p.t, p.x)));
            worst_exact = std::max(worst_exact, std::fabs(eval_model(model, p.t, p.x) - exact_solution(problem, p.t, p.x)));
        }
        r.passed = r.metric < tolerance && worst_exact < 1e-14;
        r.detail = std::to_string(pts.size()) + " points, max |w - exact| " + fmt("%.3g", worst_exact);
        return r;
    });
}

AuditResult boundary_audit(std::size_t samples, std::uint64_t seed) {
    return timed("boundary", [&] {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        AuditResult r;
        r.threshold = 0.0;
        const std::size_t models = std::max<std::size_t>(1, samples / 100);
        std::size_t done = 0;
        for (std::size_t m = 0; m < models; ++m) {
            ModelConfig cfg;
            cfg.harmonics = 1 + static_cast<int>(rng() % 50);
            cfg.length = m % 2 == 0 ? 10.0 : 0.5 + 19.5 * unit(rng);
            cfg.wave_speed = 0.25 + 2.0 * unit(rng);
            cfg.xavier_gain = 1.0;
            cfg.initial_lambda = 20.0 * unit(rng) - 10.0;
            cfg.layer_dims = {2, 16, 16, 1};
            const HybridModel model = init_model(cfg, rng());
            const std::size_t per_model = (m + 1 == models) ? samples - done : samples / models;
            for (std::size_t i = 0; i < per_model; ++i, ++done) {
                const double t = 5.0 * unit(rng);
                for (double x : {0.0, cfg.length}) {
                    const double w = eval_model(model, t, x);
                    const DerivativeBundle d = eval_model_jets(model, t, x, DerivativeRequest{true, true, true});
                    r.metric = std::max({r.metric, std::fabs(w), std::fabs(d.w)});
                }
            }
        }
        r.passed = r.metric == 0.0;
        r.detail = std::to_string(done) + " (t, model) samples at both ends";
        return r;
    });
}

AuditResult lhs_audit(std::size_t max_n, int seeds) {
    return timed("lhs", [&] {
        AuditResult r;
        r.threshold = 0.0;
        std::size_t bad = 0;
        std::size_t runs = 0;
        const Rect box{0.0, 1.0, 0.0, 10.0};
        for (std::size_t n = 1; n <= max_n; ++n) {
            for (int s = 0; s < seeds; ++s, ++runs) {
                const auto pts = lhs_sample(n, box, static_cast<std::uint64_t>(s) * 1000003ULL + n);
                std::vector<int> t_hits(n, 0);
                std::vector<int> x_hits(n, 0);
                bool ok = pts.size() == n;
                for (const Point& p : pts) {
                    const auto ti = static_cast<long>(std::floor((p.t - box.t_lo) / (box.t_hi - box.t_lo) * n));
                    const auto xi = static_cast<long>(std::floor((p.x - box.x_lo) / (box.x_hi - box.x_lo) * n));
                    if (ti < 0 || xi < 0 || ti >= static_cast<long>(n) || xi >= static_cast<long>(n)) {
                        ok = false;
                        continue;
                    }
                    ++t_hits[static_cast<std::size_t>(ti)];
                    ++x_hits[static_cast<std::size_t>(xi)];
                }
                for (std::size_t i = 0; i < n; ++i) ok = ok && t_hits[i] == 1 && x_hits[i] == 1;
                if (!ok) ++bad;
            }
        }
        r.metric = static_cast<double>(bad);
        r.passed = bad == 0;
        r.detail = std::to_string(runs) + " designs, " + std::to_string(bad) + " with empty or doubled strata";
        return r;
    });
}

AuditResult adaptive_weight_audit(double tolerance) {
    return timed("adaptive-weight", [&] {
        AuditResult r;
        r.threshold = tolerance;
        bool ok = true;
        for (int n = 5; n <= 50; ++n) {
            const double scale = 1.0 + n / 130.0;
            r.metric = std::max(r.metric, std::fabs(adaptive_weight(1.0, n) - scale / 2.0));
            double prev = -1.0;
            for (int i = 0; i <= 2000; ++i) {
                const double loss = std::pow(10.0, -40.0 + 0.03 * i);
                const double w = adaptive_weight(loss, n);
                ok = ok && std::isfinite(w) && w > 0.0 && w <= scale && w >= prev;
                prev = w;
            }
            const double floor_w = adaptive_weight(1e-30, n);
            ok = ok && adaptive_weight(0.0, n) == floor_w && adaptive_weight(1e-300, n) == floor_w;
            ok = ok && adaptive_weight(1e-2, n) < adaptive_weight(1e-1, n);
        }
        r.passed = ok && r.metric <= tolerance;
        r.detail = ok ? "N = 5..50, 2001-point loss scan" : "monotonicity, bound or floor violated";
        return r;
    });
}

AuditResult param_count_audit() {
    return timed("param-count", [&] {
        const ParamCount c = param_count(ModelConfig{});
        AuditResult r;
        r.metric = static_cast<double>(c.total_reported);
        r.threshold = 27925.0;
        r.passed = c.net == 27905 && c.fourier == 20 && c.total_reported == 27925;
        r.detail = std::to_string(c.net) + " network + " + std::to_string(c.fourier) + " Fourier";
        return r;
    });
}

AuditResult batch_formula_audit() {
    return timed("batch-formula", [&] {
        AuditResult r;
        const std::int64_t b = batch_size_estimate(24'000'000'000LL, 27925);
        r.metric = static_cast<double>(b);
        r.threshold = 51029.0;
        r.passed = b == 51029;
        r.detail = "batch_size_estimate(24e9, 27925)";
        return r;
    });
}

std::vector<AuditResult> run_all_audits(const AuditSuiteOptions& options) {
    std::vector<AuditResult> out;
    out.push_back(jet_audit());
    out.push_back(gradient_audit(options.eps, options.seed));
    out.push_back(route_audit(options.seed + 1));
    out.push_back(residual_audit(10000, options.seed + 2));
    out.push_back(boundary_audit(10000, options.seed + 3));
    out.push_back(lhs_audit());
    out.push_back(adaptive_weight_audit());
    out.push_back(param_count_audit());
    out.push_back(batch_formula_audit());
    return out;
}

}  // namespace beampinn
