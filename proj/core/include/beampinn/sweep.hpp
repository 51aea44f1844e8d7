#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "beampinn/beam_problem.hpp"
#include "beampinn/hybrid_model.hpp"
#include "beampinn/loss.hpp"
#include "beampinn/metrics.hpp"
#include "beampinn/sampling.hpp"
#include "beampinn/trainer.hpp"

namespace beampinn {

struct SweepConfig {
    std::vector<int> harmonics{5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
    /// Template for every run; harmonics, length and wave speed are overwritten per row.
    ModelConfig model{};
    TrainConfig train{};
    PointCounts counts{};
    int grid_nt = 100;
    int grid_nx = 100;
    std::uint64_t seed = 42;
    int jobs = 1;
};

struct SweepRow {
    int harmonics = 0;
    MetricsReport metrics{};
    LossBreakdown final_losses{};
    int phase1_epochs = 0;
    int phase2_iters = 0;
    double wall_s = 0.0;
    std::uint64_t seed = 0;
    bool diverged = false;
    std::string message;
    std::optional<double> l2_reference;
};

struct SweepReport {
    std::vector<SweepRow> rows;  // sorted by harmonics

    bool any_diverged() const noexcept;
};

/// Published L2 errors for N = 5, 10, ..., 50; empty for other N.
std::optional<double> reference_l2(int harmonics);

/// Seed used for the row with N harmonics: seed + N.
std::uint64_t sweep_row_seed(std::uint64_t seed, int harmonics) noexcept;

/// Called once per finished row with the trained model. Calls are serialized.
using SweepRowSink = std::function<void(const SweepRow&, const HybridModel&)>;

/// One independent initialise / train / evaluate run per N, up to `jobs` at a
/// time. A diverged run is recorded in its row and does not stop the sweep.
SweepReport harmonic_sweep(const BeamProblem& problem, const SweepConfig& config, const SweepRowSink& sink = {});

/// The single run behind one sweep row.
SweepRow run_single(const BeamProblem& problem, const SweepConfig& config, int harmonics,
                    HybridModel* trained = nullptr);

}  // namespace beampinn
