#pragma once

#include <vector>

#include "beampinn/beam_problem.hpp"
#include "beampinn/hybrid_model.hpp"
#include "beampinn/sampling.hpp"

namespace beampinn {

enum class RegKind {
    kNone,
    kWeightDecay,  // mean of squared MLP weights (biases excluded)
};

struct LossBreakdown {
    double l_pde = 0.0;
    double l_ic = 0.0;
    double l_ic_t = 0.0;
    double l_bc = 0.0;
    double l_reg = 0.0;
    double w_pde = 0.0;
    double w_ic = 0.0;
    double w_ic_t = 0.0;
    double w_bc = 0.0;
    double lambda_reg = 0.0;
    double total = 0.0;

    double weighted_sum() const noexcept {
        return w_pde * l_pde + w_ic * l_ic + w_ic_t * l_ic_t + w_bc * l_bc + lambda_reg * l_reg;
    }
};

/// Unweighted loss terms with one gradient vector per term (each sized like
/// model.params(); empty when gradients were not requested).
struct LossTerms {
    LossBreakdown losses;
    std::vector<double> g_pde;
    std::vector<double> g_ic;
    std::vector<double> g_ic_t;
    std::vector<double> g_bc;
    std::vector<double> g_reg;
};

struct LossOptions {
    RegKind reg = RegKind::kNone;
    bool gradients = true;
    /// Collocation points per batched network pass.
    std::size_t chunk = 256;
};

/// w_tt + c^2 w_xxxx. Throws std::invalid_argument if the model and problem disagree on c.
double pde_residual(const HybridModel& model, const BeamProblem& problem, double t, double x);

/// Mean-square residual, initial displacement, initial velocity and boundary
/// terms over the point sets, through the batched network kernel.
LossTerms loss_terms(const HybridModel& model, const BeamProblem& problem, const PointSets& points,
                     const LossOptions& options = {});

/// Same quantities through the recording tape, one tape per point. Slow;
/// exists as an independent route for audits.
LossTerms loss_terms_taped(const HybridModel& model, const BeamProblem& problem, const PointSets& points,
                           RegKind reg = RegKind::kNone);

/// Loss values only, weights left at zero.
LossBreakdown loss_components(const HybridModel& model, const BeamProblem& problem, const PointSets& points,
                              RegKind reg = RegKind::kNone);

inline constexpr double kDefaultScaleConst = 130.0;
inline constexpr double kLossFloor = 1e-30;

/// scale / (1 + exp(-log10(max(loss, 1e-30)))), scale = 1 + N / scale_const.
double adaptive_weight(double loss, int harmonics, double scale_const = kDefaultScaleConst);

/// Fills w_pde, w_ic, w_ic_t and w_bc from the current losses and recomputes total.
LossBreakdown adaptive_weights(LossBreakdown losses, int harmonics, double scale_const = kDefaultScaleConst);

struct TotalLoss {
    LossBreakdown breakdown;
    std::vector<double> gradient;
};

struct TotalLossOptions {
    double lambda_reg = 0.0;
    double scale_const = kDefaultScaleConst;
    std::size_t chunk = 256;
};

/// Weighted total and its gradient. The adaptive weights are treated as
/// constants: gradient = sum_a w_a grad(L_a) + lambda_reg grad(L_reg).
/// Throws DivergenceError when the total or gradient is not finite.
TotalLoss combine_terms(const LossTerms& terms, int harmonics, double lambda_reg,
                        double scale_const = kDefaultScaleConst);

TotalLoss total_loss(const HybridModel& model, const BeamProblem& problem, const PointSets& points,
                     const TotalLossOptions& options = {});

}  // namespace beampinn
