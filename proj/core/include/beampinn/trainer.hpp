#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "beampinn/adam.hpp"
#include "beampinn/beam_problem.hpp"
#include "beampinn/hybrid_model.hpp"
#include "beampinn/lbfgs.hpp"
#include "beampinn/loss.hpp"
#include "beampinn/sampling.hpp"

namespace beampinn {

struct Phase1Config {
    bool enabled = true;
    int max_epochs = 2000;
    /// Early stop after this many epochs without relative improvement.
    int plateau_patience = 200;
    double lr = 0.01;
    double clip_norm = 1.0;
    PlateauOptions scheduler{};
    /// Collocation points per epoch; 0 or >= the set size means the full set.
    std::size_t batch_size = 1024;
};

struct Phase2Config {
    bool enabled = true;
    int max_iters = 5000;
    double grad_tol = 1e-9;
    int memory = 20;
};

struct TrainConfig {
    Phase1Config phase1{};
    Phase2Config phase2{};
    double lambda_reg = 0.0;
    double scale_const = kDefaultScaleConst;
    std::uint64_t seed = 42;
    std::size_t chunk = 256;

    void validate() const;
};

enum class Phase { kAdam, kTransition, kLbfgs };

const char* to_string(Phase phase) noexcept;

struct TrainRecord {
    Phase phase = Phase::kAdam;
    int step = 0;
    /// Adam learning rate, or the accepted line-search step in the L-BFGS phase.
    double lr = 0.0;
    LossBreakdown losses{};
    double grad_norm = 0.0;
    double wall_ms = 0.0;
};

struct TrainHistory {
    std::vector<TrainRecord> records;
};

struct TrainResult {
    HybridModel model;
    TrainHistory history;
    LossBreakdown final_losses{};  // full point sets, at the returned parameters
    int phase1_epochs = 0;
    int phase2_iters = 0;
    LbfgsStatus phase2_status = LbfgsStatus::kRunning;
    bool diverged = false;
    std::string message;
};

using TrainProgress = std::function<void(const TrainRecord&)>;

/// Two-phase training: mini-batch Adam with clipping, plateau scheduling and
/// early stopping, then full-batch L-BFGS seeded with the best Adam
/// parameters. Returns the best parameters seen. Divergence is reported in
/// the result rather than thrown; the history up to that point is kept.
TrainResult train(const HybridModel& initial, const BeamProblem& problem, const PointSets& points,
                  const TrainConfig& config, const TrainProgress& progress = {});

/// `phase,step,lr,l_pde,l_ic,l_ic_t,l_bc,w_pde,w_ic,w_ic_t,w_bc,total,grad_norm,wall_ms`
void write_history_csv(const TrainHistory& history, std::ostream& out);

}  // namespace beampinn
