#pragma once

#include <deque>
#include <functional>
#include <span>
#include <vector>

namespace beampinn {

/// Writes the gradient at x into grad and returns f(x).
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct LbfgsOptions {
    int memory = 20;
    double c1 = 1e-4;
    double c2 = 0.9;
    double grad_tol = 1e-9;
    int max_iters = 5000;
    /// Function evaluations allowed per line search.
    int max_line_search = 25;
};

enum class LbfgsStatus {
    kRunning,
    kConverged,         // gradient norm below tolerance
    kLossIncreased,     // accepted step raised the loss; best point restored
    kLineSearchFailed,  // no strong-Wolfe point within the trial budget
    kMaxIterations,
};

const char* to_string(LbfgsStatus status) noexcept;

struct LbfgsStepInfo {
    LbfgsStatus status = LbfgsStatus::kRunning;
    int iteration = 0;
    double f = 0.0;
    double grad_norm = 0.0;
    double step = 0.0;
    int evaluations = 0;
    /// f_new <= f_old + c1 * step * g'd for the accepted step.
    bool armijo = true;
};

/// Limited-memory BFGS with two-loop recursion and a strong-Wolfe line search.
///
/// The best point seen is tracked separately from the current iterate, so a
/// terminating iteration can always fall back to it.
class Lbfgs {
public:
    Lbfgs(Objective objective, std::vector<double> x0, LbfgsOptions options = {});

    /// Performs one iteration. Returns a terminal status once the run is over;
    /// further calls then do nothing.
    LbfgsStepInfo step();

    const std::vector<double>& x() const noexcept { return x_; }
    double f() const noexcept { return f_; }
    const std::vector<double>& gradient() const noexcept { return g_; }
    double grad_norm() const noexcept;
    int iterations() const noexcept { return iterations_; }
    int evaluations() const noexcept { return evaluations_; }
    std::size_t history_size() const noexcept { return pairs_.size(); }
    LbfgsStatus status() const noexcept { return status_; }

    /// Curvature s'y of every stored pair (all positive by construction).
    std::vector<double> stored_curvatures() const;

private:
    struct Pair {
        std::vector<double> s;
        std::vector<double> y;
        double rho = 0.0;
    };

    double evaluate(std::span<const double> x, std::span<double> grad);
    std::vector<double> direction() const;

    Objective objective_;
    LbfgsOptions options_;
    std::vector<double> x_;
    std::vector<double> g_;
    double f_ = 0.0;
    std::deque<Pair> pairs_;
    int iterations_ = 0;
    int evaluations_ = 0;
    LbfgsStatus status_ = LbfgsStatus::kRunning;
};

struct LbfgsResult {
    std::vector<double> x;
    double f = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    int evaluations = 0;
    LbfgsStatus status = LbfgsStatus::kRunning;
};

LbfgsResult lbfgs_minimize(Objective objective, std::vector<double> x0, const LbfgsOptions& options = {},
                           const std::function<void(const LbfgsStepInfo&)>& on_iteration = {});

}  // namespace beampinn
