#include "beampinn/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "beampinn/error.hpp"

namespace beampinn {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Cycles through seeded permutations of the collocation set.
class BatchSampler {
public:
    BatchSampler(const PointSets& points, std::size_t batch_size, std::uint64_t seed)
        : points_(points), rng_(seed ^ 0x9e3779b97f4a7c15ULL), order_(points.pde.size()) {
        full_ = batch_size == 0 || batch_size >= points.pde.size();
        batch_size_ = full_ ? points.pde.size() : batch_size;
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        cursor_ = order_.size();
        batch_.ic = points.ic;
        batch_.bc = points.bc;
        batch_.seed = points.seed;
        batch_.counts = points.counts;
    }

    const PointSets& next() {
        if (full_) return points_;
        batch_.pde.clear();
        while (batch_.pde.size() < batch_size_) {
            if (cursor_ == order_.size()) {
                std::shuffle(order_.begin(), order_.end(), rng_);
                cursor_ = 0;
            }
            batch_.pde.push_back(points_.pde[order_[cursor_++]]);
        }
        return batch_;
    }

private:
    const PointSets& points_;
    std::mt19937_64 rng_;
    std::vector<std::size_t> order_;
    std::size_t cursor_ = 0;
    std::size_t batch_size_ = 0;
    bool full_ = false;
    PointSets batch_;
};

}  // namespace

void TrainConfig::validate() const {
    if (phase1.max_epochs < 0) throw std::invalid_argument("phase1.max_epochs must be >= 0");
    if (phase1.plateau_patience < 1) throw std::invalid_argument("phase1.plateau_patience must be >= 1");
    if (!(phase1.lr > 0.0)) throw std::invalid_argument("phase1.lr must be > 0");
    if (!(phase1.clip_norm > 0.0)) throw std::invalid_argument("phase1.clip_norm must be > 0");
    if (!(phase1.scheduler.factor > 0.0 && phase1.scheduler.factor < 1.0)) {
        throw std::invalid_argument("scheduler factor must lie in (0, 1)");
    }
    if (phase1.scheduler.patience < 1) throw std::invalid_argument("scheduler patience must be >= 1");
    if (!(phase1.scheduler.min_lr > 0.0)) throw std::invalid_argument("scheduler min_lr must be > 0");
    if (phase2.max_iters < 0) throw std::invalid_argument("phase2.max_iters must be >= 0");
    if (!(phase2.grad_tol > 0.0)) throw std::invalid_argument("phase2.grad_tol must be > 0");
    if (phase2.memory < 1) throw std::invalid_argument("phase2.memory must be >= 1");
    if (!(lambda_reg >= 0.0)) throw std::invalid_argument("lambda_reg must be >= 0");
    if (!(scale_const > 0.0)) throw std::invalid_argument("scale_const must be > 0");
    if (chunk == 0) throw std::invalid_argument("chunk must be >= 1");
}

const char* to_string(Phase phase) noexcept {
    switch (phase) {
        case Phase::kAdam: return "adam";
        case Phase::kTransition: return "transition";
        case Phase::kLbfgs: return "lbfgs";
    }
    return "unknown";
}

TrainResult train(const HybridModel& initial, const BeamProblem& problem, const PointSets& points,
                  const TrainConfig& config, const TrainProgress& progress) {
    config.validate();
    problem.validate();
    const auto start = Clock::now();
    TotalLossOptions loss_opts;
    loss_opts.lambda_reg = config.lambda_reg;
    loss_opts.scale_const = config.scale_const;
    loss_opts.chunk = config.chunk;

    TrainResult result{initial, {}, {}, 0, 0, LbfgsStatus::kRunning, false, {}};
    auto emit = [&](TrainRecord rec) {
        rec.wall_ms = elapsed_ms(start);
        result.history.records.push_back(rec);
        if (progress) progress(rec);
    };

    HybridModel work = initial;
    std::vector<double> best(initial.params().begin(), initial.params().end());

    // Phase 1: Adam.
    if (config.phase1.enabled && config.phase1.max_epochs > 0) {
        Adam adam(work.size(), AdamOptions{config.phase1.lr, 0.9, 0.999, 1e-8});
        PlateauScheduler scheduler(config.phase1.scheduler);
        BatchSampler sampler(points, config.phase1.batch_size, config.seed);
        double best_total = std::numeric_limits<double>::infinity();
        double plateau_ref = std::numeric_limits<double>::infinity();
        int since_improvement = 0;
        try {
            for (int epoch = 1; epoch <= config.phase1.max_epochs; ++epoch) {
                TotalLoss tl = total_loss(work, problem, sampler.next(), loss_opts);
                const double total = tl.breakdown.total;
                if (total < best_total) {
                    best_total = total;
                    best.assign(work.params().begin(), work.params().end());
                }
                const double norm = clip_global_norm(tl.gradient, config.phase1.clip_norm);
                emit(TrainRecord{Phase::kAdam, epoch, adam.lr(), tl.breakdown, norm, 0.0});
                result.phase1_epochs = epoch;

                adam.step(work.params(), tl.gradient);
                adam.set_lr(scheduler.step(total, adam.lr()));

                if (total < plateau_ref * (1.0 - config.phase1.scheduler.threshold)) {
                    plateau_ref = total;
                    since_improvement = 0;
                } else if (++since_improvement >= config.phase1.plateau_patience) {
                    break;
                }
            }
        } catch (const DivergenceError& e) {
            result.diverged = true;
            result.message = std::string("phase 1 diverged: ") + e.what();
        }
    }

    // Hand-over: full-batch evaluation of the selected Phase 1 parameters.
    std::copy(best.begin(), best.end(), work.params().begin());
    TotalLoss seed_eval;
    try {
        seed_eval = total_loss(work, problem, points, loss_opts);
    } catch (const DivergenceError& e) {
        result.diverged = true;
        result.message = std::string("non-finite loss at the phase 1 selection: ") + e.what();
        result.model = work;
        return result;
    }
    emit(TrainRecord{Phase::kTransition, 0, 0.0, seed_eval.breakdown, l2_norm(seed_eval.gradient), 0.0});
    result.final_losses = seed_eval.breakdown;

    if (result.diverged || !config.phase2.enabled || config.phase2.max_iters == 0) {
        result.model = work;
        return result;
    }

    // Phase 2: full-batch L-BFGS.
    struct Cached {
        std::vector<double> x;
        LossBreakdown losses;
    };
    std::deque<Cached> cache;
    HybridModel probe = work;
    Objective objective = [&](std::span<const double> x, std::span<double> grad) -> double {
        std::copy(x.begin(), x.end(), probe.params().begin());
        try {
            TotalLoss tl = total_loss(probe, problem, points, loss_opts);
            std::copy(tl.gradient.begin(), tl.gradient.end(), grad.begin());
            cache.push_back(Cached{std::vector<double>(x.begin(), x.end()), tl.breakdown});
            if (cache.size() > 32) cache.pop_front();
            return tl.breakdown.total;
        } catch (const DivergenceError&) {
            std::fill(grad.begin(), grad.end(), 0.0);
            return std::numeric_limits<double>::infinity();
        }
    };

    LbfgsOptions lo;
    lo.memory = config.phase2.memory;
    lo.grad_tol = config.phase2.grad_tol;
    lo.max_iters = config.phase2.max_iters;
    Lbfgs solver(objective, best, lo);
    while (solver.status() == LbfgsStatus::kRunning) {
        const LbfgsStepInfo info = solver.step();
        LossBreakdown at_x = result.final_losses;
        for (auto it = cache.rbegin(); it != cache.rend(); ++it) {
            if (it->x == solver.x()) {
                at_x = it->losses;
                break;
            }
        }
        result.final_losses = at_x;
        result.phase2_iters = info.iteration;
        emit(TrainRecord{Phase::kLbfgs, info.iteration, info.step, at_x, info.grad_norm, 0.0});
    }
    result.phase2_status = solver.status();
    std::copy(solver.x().begin(), solver.x().end(), work.params().begin());
    result.model = work;
    return result;
}

void write_history_csv(const TrainHistory& history, std::ostream& out) {
    out << "phase,step,lr,l_pde,l_ic,l_ic_t,l_bc,w_pde,w_ic,w_ic_t,w_bc,total,grad_norm,wall_ms\n";
    char buf[640];
    for (const TrainRecord& r : history.records) {
        const LossBreakdown& l = r.losses;
        std::snprintf(buf, sizeof(buf),
                      "%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.3f\n",
                      to_string(r.phase), r.step, r.lr, l.l_pde, l.l_ic, l.l_ic_t, l.l_bc, l.w_pde, l.w_ic, l.w_ic_t,
                      l.w_bc, l.total, r.grad_norm, r.wall_ms);
        out << buf;
    }
}

}  // namespace beampinn
