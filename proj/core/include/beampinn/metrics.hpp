#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "beampinn/beam_problem.hpp"
#include "beampinn/hybrid_model.hpp"
#include "beampinn/loss.hpp"
#include "beampinn/sampling.hpp"

namespace beampinn {

struct MetricsReport {
    double l2_rel = 0.0;
    /// sqrt(sum e^2 dt dx)
    double l2_abs = 0.0;
    double max_abs = 0.0;
    double mean_abs = 0.0;
    double median_abs = 0.0;
    int grid_nt = 0;
    int grid_nx = 0;
    std::string problem_fingerprint;
    std::string model_fingerprint;
};

/// Error of the model against the closed-form solution on the grid. Throws
/// std::invalid_argument for an empty grid or an identically zero exact field.
MetricsReport evaluate_metrics(const HybridModel& model, const BeamProblem& problem, const Grid& grid);

/// Same reduction for precomputed fields laid out like grid.points.
MetricsReport metrics_from_fields(std::span<const double> predicted, std::span<const double> exact,
                                  const Grid& grid);

/// 16-hex-digit FNV-1a digest of the canonical problem JSON / raw parameter bytes.
std::string problem_fingerprint(const BeamProblem& problem);
std::string model_fingerprint(const HybridModel& model);

/// floor(0.95 mem / (4 n_params 4)). Throws std::invalid_argument for
/// nonpositive inputs or when the result would be below one.
std::int64_t batch_size_estimate(std::int64_t mem_bytes, std::int64_t n_params);

struct GradCheckOptions {
    std::size_t samples = 100;
    std::uint64_t seed = 1234;
    /// Errors are measured relative to max(|fd|, |ad|, atol * max(1, |f|)).
    double atol = 1e-6;
    double lambda_reg = 0.0;
    double scale_const = kDefaultScaleConst;
};

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::size_t worst_param = 0;
    std::size_t checked = 0;
    double eps = 0.0;
};

/// Reverse-mode gradients of the weighted total loss (recorded on the tape,
/// adaptive weights frozen at the current point) against central differences
/// on a seeded random subset of parameters. The subset always includes some
/// Fourier coefficients and lambda. eps must lie in [1e-8, 1e-4].
GradCheckReport grad_check(const HybridModel& model, const BeamProblem& problem, const PointSets& points,
                           double eps, const GradCheckOptions& options = {});

}  // namespace beampinn
