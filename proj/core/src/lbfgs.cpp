#include "beampinn/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "beampinn/adam.hpp"
#include "beampinn/error.hpp"

namespace beampinn {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

// Minimizer of the cubic matching values and slopes at a and b, kept inside
// the middle 80% of the bracket.
double cubic_step(double a, double fa, double ga, double b, double fb, double gb) {
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    const double margin = 0.1 * (hi - lo);
    const double d1 = ga + gb - 3.0 * (fa - fb) / (a - b);
    const double disc = d1 * d1 - ga * gb;
    double alpha = 0.5 * (a + b);
    if (disc >= 0.0) {
        const double d2 = std::copysign(std::sqrt(disc), b - a);
        const double denom = gb - ga + 2.0 * d2;
        if (denom != 0.0) {
            const double cand = b - (b - a) * (gb + d2 - d1) / denom;
            if (std::isfinite(cand)) alpha = cand;
        }
    }
    return std::clamp(alpha, lo + margin, hi - margin);
}

struct Sample {
    double alpha = 0.0;
    double f = 0.0;
    double slope = 0.0;
    std::vector<double> x;
    std::vector<double> g;
};

}  // namespace

const char* to_string(LbfgsStatus status) noexcept {
    switch (status) {
        case LbfgsStatus::kRunning: return "running";
        case LbfgsStatus::kConverged: return "converged";
        case LbfgsStatus::kLossIncreased: return "loss_increased";
        case LbfgsStatus::kLineSearchFailed: return "line_search_failed";
        case LbfgsStatus::kMaxIterations: return "max_iterations";
    }
    return "unknown";
}

Lbfgs::Lbfgs(Objective objective, std::vector<double> x0, LbfgsOptions options)
    : objective_(std::move(objective)), options_(options), x_(std::move(x0)), g_(x_.size(), 0.0) {
    if (options_.memory < 1) throw std::invalid_argument("L-BFGS memory must be >= 1");
    if (!(options_.c1 > 0.0 && options_.c1 < options_.c2 && options_.c2 < 1.0)) {
        throw std::invalid_argument("L-BFGS needs 0 < c1 < c2 < 1");
    }
    f_ = evaluate(x_, g_);
    if (!std::isfinite(f_)) throw DivergenceError("objective is not finite at the starting point");
    if (grad_norm() < options_.grad_tol) status_ = LbfgsStatus::kConverged;
}

double Lbfgs::evaluate(std::span<const double> x, std::span<double> grad) {
    ++evaluations_;
    return objective_(x, grad);
}

double Lbfgs::grad_norm() const noexcept { return l2_norm(g_); }

std::vector<double> Lbfgs::stored_curvatures() const {
    std::vector<double> out;
    for (const Pair& p : pairs_) out.push_back(dot(p.s, p.y));
    return out;
}

std::vector<double> Lbfgs::direction() const {
    const std::size_t n = x_.size();
    std::vector<double> q(g_);
    std::vector<double> alpha(pairs_.size());
    for (std::size_t i = pairs_.size(); i-- > 0;) {
        const Pair& p = pairs_[i];
        alpha[i] = p.rho * dot(p.s, q);
        for (std::size_t k = 0; k < n; ++k) q[k] -= alpha[i] * p.y[k];
    }
    double gamma = 1.0;
    if (!pairs_.empty()) {
        const Pair& last = pairs_.back();
        gamma = dot(last.s, last.y) / dot(last.y, last.y);
    }
    for (double& v : q) v *= gamma;
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
        const Pair& p = pairs_[i];
        const double beta = p.rho * dot(p.y, q);
        for (std::size_t k = 0; k < n; ++k) q[k] += (alpha[i] - beta) * p.s[k];
    }
    for (double& v : q) v = -v;
    return q;
}

LbfgsStepInfo Lbfgs::step() {
    LbfgsStepInfo info;
    info.iteration = iterations_;
    info.f = f_;
    info.grad_norm = grad_norm();
    if (status_ != LbfgsStatus::kRunning) {
        info.status = status_;
        return info;
    }
    if (iterations_ >= options_.max_iters) {
        status_ = LbfgsStatus::kMaxIterations;
        info.status = status_;
        return info;
    }

    const std::size_t n = x_.size();
    std::vector<double> d = direction();
    double slope0 = dot(g_, d);
    bool fresh = pairs_.empty();
    if (!(slope0 < 0.0)) {
        pairs_.clear();
        for (std::size_t k = 0; k < n; ++k) d[k] = -g_[k];
        slope0 = dot(g_, d);
        fresh = true;
    }
    const double alpha0 = fresh ? std::min(1.0, 1.0 / info.grad_norm) : 1.0;

    const int eval_start = evaluations_;
    const double f0 = f_;
    auto probe = [&](double alpha) {
        Sample s;
        s.alpha = alpha;
        s.x.resize(n);
        s.g.assign(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) s.x[k] = x_[k] + alpha * d[k];
        s.f = evaluate(s.x, s.g);
        s.slope = dot(s.g, d);
        return s;
    };
    auto budget_left = [&] { return evaluations_ - eval_start < options_.max_line_search; };
    auto armijo = [&](const Sample& s) { return s.f <= f0 + options_.c1 * s.alpha * slope0; };
    auto curvature = [&](const Sample& s) { return std::fabs(s.slope) <= -options_.c2 * slope0; };

    std::optional<Sample> accepted;
    std::optional<Sample> best_seen;
    auto remember = [&](const Sample& s) {
        if (std::isfinite(s.f) && s.f < f0 && armijo(s) && (!best_seen || s.f < best_seen->f)) best_seen = s;
    };

    auto zoom = [&](Sample lo, Sample hi) {
        while (budget_left()) {
            if (std::fabs(hi.alpha - lo.alpha) <= std::numeric_limits<double>::epsilon() * std::fabs(lo.alpha)) break;
            const double a = cubic_step(lo.alpha, lo.f, lo.slope, hi.alpha, hi.f, hi.slope);
            Sample s = probe(a);
            remember(s);
            if (!std::isfinite(s.f) || !armijo(s) || s.f >= lo.f) {
                hi = std::move(s);
            } else {
                if (curvature(s)) {
                    accepted = std::move(s);
                    return;
                }
                if (s.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
                lo = std::move(s);
            }
        }
    };

    Sample prev;
    prev.alpha = 0.0;
    prev.f = f0;
    prev.slope = slope0;
    prev.x = x_;
    prev.g = g_;
    double alpha = alpha0;
    for (int i = 0; budget_left() && !accepted; ++i) {
        Sample s = probe(alpha);
        remember(s);
        if (!std::isfinite(s.f) || !armijo(s) || (i > 0 && s.f >= prev.f)) {
            zoom(prev, s);
            break;
        }
        if (curvature(s)) {
            accepted = std::move(s);
            break;
        }
        if (s.slope >= 0.0) {
            zoom(s, prev);
            break;
        }
        prev = std::move(s);
        alpha *= 2.0;
    }

    ++iterations_;
    info.iteration = iterations_;
    info.evaluations = evaluations_ - eval_start;

    if (!accepted) {
        // Keep whatever sufficient-decrease point was found, then stop.
        if (best_seen) {
            x_ = best_seen->x;
            g_ = best_seen->g;
            f_ = best_seen->f;
            info.step = best_seen->alpha;
        }
        status_ = LbfgsStatus::kLineSearchFailed;
        info.status = status_;
        info.f = f_;
        info.grad_norm = grad_norm();
        return info;
    }

    const Sample& s = *accepted;
    info.step = s.alpha;
    info.armijo = armijo(s);
    if (s.f > f0) {
        status_ = LbfgsStatus::kLossIncreased;
        info.status = status_;
        return info;
    }

    Pair p;
    p.s.resize(n);
    p.y.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        p.s[k] = s.x[k] - x_[k];
        p.y[k] = s.g[k] - g_[k];
    }
    const double sy = dot(p.s, p.y);
    if (sy > 0.0 && dot(p.y, p.y) > 0.0) {
        p.rho = 1.0 / sy;
        pairs_.push_back(std::move(p));
        if (pairs_.size() > static_cast<std::size_t>(options_.memory)) pairs_.pop_front();
    }
    x_ = s.x;
    g_ = s.g;
    f_ = s.f;

    info.f = f_;
    info.grad_norm = grad_norm();
    if (info.grad_norm < options_.grad_tol) {
        status_ = LbfgsStatus::kConverged;
    } else if (iterations_ >= options_.max_iters) {
        status_ = LbfgsStatus::kMaxIterations;
    }
    info.status = status_;
    return info;
}

LbfgsResult lbfgs_minimize(Objective objective, std::vector<double> x0, const LbfgsOptions& options,
                           const std::function<void(const LbfgsStepInfo&)>& on_iteration) {
    Lbfgs solver(std::move(objective), std::move(x0), options);
    while (solver.status() == LbfgsStatus::kRunning) {
        const LbfgsStepInfo info = solver.step();
        if (on_iteration) on_iteration(info);
    }
    LbfgsResult r;
    r.x = solver.x();
    r.f = solver.f();
    r.grad_norm = solver.grad_norm();
    r.iterations = solver.iterations();
    r.evaluations = solver.evaluations();
    r.status = solver.status();
    return r;
}

}  // namespace beampinn
