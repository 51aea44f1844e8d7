#include "beampinn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "beampinn/error.hpp"
#include "beampinn/mlp_jets.hpp"
#include "beampinn/model_tape.hpp"
#include "beampinn/tape.hpp"

namespace beampinn {

namespace {

void require_matching_speed(const HybridModel& model, const BeamProblem& problem) {
    if (model.wave_speed() != problem.wave_speed) {
        throw std::invalid_argument("model wave speed " + std::to_string(model.wave_speed()) +
                                    " does not match problem wave speed " + std::to_string(problem.wave_speed));
    }
    if (model.length() != problem.length) {
        throw std::invalid_argument("model beam length " + std::to_string(model.length()) +
                                    " does not match problem length " + std::to_string(problem.length));
    }
}

// Per-harmonic quantities that do not depend on the evaluation point.
struct ModalTable {
    std::vector<double> omega;
    std::vector<double> k4;

    explicit ModalTable(const FourierHead& f) {
        for (int n = 1; n <= f.harmonics(); ++n) {
            omega.push_back(f.angular_frequency(n));
            const double k = f.wave_number(n);
            k4.push_back((k * k) * (k * k));
        }
    }
};

void weight_decay(const HybridModel& model, LossTerms& out, bool gradients) {
    const auto net = model.net_params();
    const std::size_t count = model.mlp().weight_count();
    double acc = 0.0;
    for (const LayerView& v : model.mlp().layers) {
        const std::size_t n = static_cast<std::size_t>(v.in) * v.out;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = net[v.weight_offset + i];
            acc += w * w;
            if (gradients) out.g_reg[model.net_offset() + v.weight_offset + i] += 2.0 * w / static_cast<double>(count);
        }
    }
    out.losses.l_reg = acc / static_cast<double>(count);
}

void check_points(const PointSets& points) {
    if (points.pde.empty()) throw std::invalid_argument("empty collocation point set");
    if (points.ic.empty()) throw std::invalid_argument("empty initial-condition point set");
    if (points.bc.empty()) throw std::invalid_argument("empty boundary point set");
}

}  // namespace

double pde_residual(const HybridModel& model, const BeamProblem& problem, double t, double x) {
    if (model.wave_speed() != problem.wave_speed) {
        throw std::invalid_argument("model wave speed does not match problem wave speed");
    }
    const DerivativeBundle d = eval_model_jets(model, t, x, DerivativeRequest{false, true, true});
    const double c = problem.wave_speed;
    return d.w_tt + c * c * d.w_xxxx;
}

LossTerms loss_terms(const HybridModel& model, const BeamProblem& problem, const PointSets& points,
                     const LossOptions& options) {
    require_matching_speed(model, problem);
    check_points(points);

    const std::size_t n_params = model.size();
    const bool grads = options.gradients;
    LossTerms out;
    if (grads) {
        out.g_pde.assign(n_params, 0.0);
        out.g_ic.assign(n_params, 0.0);
        out.g_ic_t.assign(n_params, 0.0);
        out.g_bc.assign(n_params, 0.0);
        out.g_reg.assign(n_params, 0.0);
    }

    const FourierHead f = model.fourier();
    const ModalTable modal(f);
    const int n_harm = f.harmonics();
    const std::size_t lam_idx = model.lambda_index();
    const std::size_t net_off = model.net_offset();
    const std::size_t n_net = model.mlp().param_count;
    const double lambda = model.lambda();
    const double c2 = problem.wave_speed * problem.wave_speed;
    const std::size_t chunk = std::max<std::size_t>(1, options.chunk);

    MlpJetBatch batch(model);
    std::vector<double> ts;
    std::vector<double> xs;
    std::vector<double> adjoint;
    std::vector<double> shape(static_cast<std::size_t>(n_harm));
    std::vector<double> cos_t(static_cast<std::size_t>(n_harm));
    std::vector<double> sin_t(static_cast<std::size_t>(n_harm));

    auto fill_modes = [&](double t, double x) {
        for (int n = 0; n < n_harm; ++n) {
            const auto i = static_cast<std::size_t>(n);
            shape[i] = f.mode_shape(n + 1, x);
            cos_t[i] = std::cos(modal.omega[i] * t);
            sin_t[i] = std::sin(modal.omega[i] * t);
        }
    };

    // Residual term.
    {
        const double inv_n = 1.0 / static_cast<double>(points.pde.size());
        const JetLayout layout{2, 4};
        double sum = 0.0;
        for (std::size_t start = 0; start < points.pde.size(); start += chunk) {
            const std::size_t m = std::min(chunk, points.pde.size() - start);
            ts.resize(m);
            xs.resize(m);
            for (std::size_t i = 0; i < m; ++i) {
                ts[i] = points.pde[start + i].t;
                xs[i] = points.pde[start + i].x;
            }
            batch.forward(ts, xs, layout);
            if (grads) adjoint.assign(static_cast<std::size_t>(layout.blocks()) * m, 0.0);

            for (std::size_t i = 0; i < m; ++i) {
                fill_modes(ts[i], xs[i]);
                double f_tt = 0.0;
                double f_xxxx = 0.0;
                for (int n = 0; n < n_harm; ++n) {
                    const auto k = static_cast<std::size_t>(n);
                    const double temporal = (f.a[k] * cos_t[k] + f.b[k] * sin_t[k]) * shape[k];
                    f_tt -= modal.omega[k] * modal.omega[k] * temporal;
                    f_xxxx += modal.k4[k] * temporal;
                }
                const auto mod = model.modulation_series(xs[i]);
                const double n_tt = batch.output(layout.t_block(2), i);
                double p4 = 0.0;
                for (int j = 0; j <= 4; ++j) {
                    p4 += batch.output(layout.x_block(j), i) * mod[static_cast<std::size_t>(4 - j)];
                }
                const double neural = 2.0 * mod[0] * n_tt + 24.0 * c2 * p4;
                const double r = f_tt + c2 * f_xxxx + lambda * neural;
                sum += r * r;

                if (!grads) continue;
                const double dr = 2.0 * r * inv_n;
                for (int n = 0; n < n_harm; ++n) {
                    const auto k = static_cast<std::size_t>(n);
                    const double factor = (-modal.omega[k] * modal.omega[k] + c2 * modal.k4[k]) * shape[k];
                    out.g_pde[k] += dr * factor * cos_t[k];
                    out.g_pde[static_cast<std::size_t>(n_harm) + k] += dr * factor * sin_t[k];
                }
                out.g_pde[lam_idx] += dr * neural;
                const double dn = dr * lambda;
                adjoint[static_cast<std::size_t>(layout.t_block(2)) * m + i] += dn * 2.0 * mod[0];
                for (int j = 0; j <= 4; ++j) {
                    adjoint[static_cast<std::size_t>(layout.x_block(j)) * m + i] +=
                        dn * 24.0 * c2 * mod[static_cast<std::size_t>(4 - j)];
                }
            }
            if (grads) batch.backward(adjoint, std::span<double>(out.g_pde).subspan(net_off, n_net));
        }
        out.losses.l_pde = sum * inv_n;
    }

    // Initial displacement and velocity terms.
    {
        const std::size_t m = points.ic.size();
        const double inv_n = 1.0 / static_cast<double>(m);
        const JetLayout layout{1, 0};
        ts.assign(m, 0.0);
        xs.assign(points.ic.begin(), points.ic.end());
        batch.forward(ts, xs, layout);
        std::vector<double> adj_ic;
        std::vector<double> adj_ic_t;
        if (grads) {
            adj_ic.assign(static_cast<std::size_t>(layout.blocks()) * m, 0.0);
            adj_ic_t.assign(static_cast<std::size_t>(layout.blocks()) * m, 0.0);
        }
        double sum_ic = 0.0;
        double sum_ic_t = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double x = xs[i];
            fill_modes(0.0, x);
            double w = 0.0;
            double w_t = 0.0;
            for (int n = 0; n < n_harm; ++n) {
                const auto k = static_cast<std::size_t>(n);
                w += (f.a[k] * cos_t[k] + f.b[k] * sin_t[k]) * shape[k];
                w_t += modal.omega[k] * (f.b[k] * cos_t[k] - f.a[k] * sin_t[k]) * shape[k];
            }
            const double s = model.modulation(x);
            const double n0 = batch.output(0, i);
            const double n1 = batch.output(layout.t_block(1), i);
            w += lambda * s * n0;
            w_t += lambda * s * n1;
            const double e = w - problem.initial_displacement(x);
            const double ev = w_t - problem.initial_velocity(x);
            sum_ic += e * e;
            sum_ic_t += ev * ev;

            if (!grads) continue;
            const double de = 2.0 * e * inv_n;
            const double dv = 2.0 * ev * inv_n;
            for (int n = 0; n < n_harm; ++n) {
                const auto k = static_cast<std::size_t>(n);
                const auto kb = static_cast<std::size_t>(n_harm) + k;
                out.g_ic[k] += de * cos_t[k] * shape[k];
                out.g_ic[kb] += de * sin_t[k] * shape[k];
                out.g_ic_t[k] += dv * (-modal.omega[k] * sin_t[k]) * shape[k];
                out.g_ic_t[kb] += dv * modal.omega[k] * cos_t[k] * shape[k];
            }
            out.g_ic[lam_idx] += de * s * n0;
            out.g_ic_t[lam_idx] += dv * s * n1;
            adj_ic[i] = de * lambda * s;
            adj_ic_t[static_cast<std::size_t>(layout.t_block(1)) * m + i] = dv * lambda * s;
        }
        if (grads) {
            batch.backward(adj_ic, std::span<double>(out.g_ic).subspan(net_off, n_net));
            batch.backward(adj_ic_t, std::span<double>(out.g_ic_t).subspan(net_off, n_net));
        }
        out.losses.l_ic = sum_ic * inv_n;
        out.losses.l_ic_t = sum_ic_t * inv_n;
    }

    // Boundary term: both ends for every sampled time.
    {
        const std::size_t nb = points.bc.size();
        const std::size_t m = 2 * nb;
        const double inv_n = 1.0 / static_cast<double>(nb);
        ts.resize(m);
        xs.resize(m);
        for (std::size_t i = 0; i < nb; ++i) {
            ts[2 * i] = points.bc[i];
            xs[2 * i] = 0.0;
            ts[2 * i + 1] = points.bc[i];
            xs[2 * i + 1] = problem.length;
        }
        const JetLayout layout{0, 0};
        batch.forward(ts, xs, layout);
        if (grads) adjoint.assign(m, 0.0);
        double sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            fill_modes(ts[i], xs[i]);
            double w = 0.0;
            for (int n = 0; n < n_harm; ++n) {
                const auto k = static_cast<std::size_t>(n);
                w += (f.a[k] * cos_t[k] + f.b[k] * sin_t[k]) * shape[k];
            }
            const double s = model.modulation(xs[i]);
            const double n0 = batch.output(0, i);
            w += lambda * s * n0;
            sum += w * w;
            if (!grads) continue;
            const double dw = 2.0 * w * inv_n;
            for (int n = 0; n < n_harm; ++n) {
                const auto k = static_cast<std::size_t>(n);
                out.g_bc[k] += dw * cos_t[k] * shape[k];
                out.g_bc[static_cast<std::size_t>(n_harm) + k] += dw * sin_t[k] * shape[k];
            }
            out.g_bc[lam_idx] += dw * s * n0;
            adjoint[i] = dw * lambda * s;
        }
        if (grads) batch.backward(adjoint, std::span<double>(out.g_bc).subspan(net_off, n_net));
        out.losses.l_bc = sum * inv_n;
    }

    if (options.reg == RegKind::kWeightDecay) weight_decay(model, out, grads);
    return out;
}

LossTerms loss_terms_taped(const HybridModel& model, const BeamProblem& problem, const PointSets& points,
                           RegKind reg) {
    require_matching_speed(model, problem);
    check_points(points);
    const std::size_t n_params = model.size();
    LossTerms out;
    out.g_pde.assign(n_params, 0.0);
    out.g_ic.assign(n_params, 0.0);
    out.g_ic_t.assign(n_params, 0.0);
    out.g_bc.assign(n_params, 0.0);
    out.g_reg.assign(n_params, 0.0);
    const double c2 = problem.wave_speed * problem.wave_speed;

    {
        const double inv_n = 1.0 / static_cast<double>(points.pde.size());
        double sum = 0.0;
        for (const Point& p : points.pde) {
            Tape tt(2);
            const NodeId wt = record_model(tt, model, p.t, p.x, Direction::kTime);
            Tape tx(4);
            const NodeId wx = record_model(tx, model, p.t, p.x, Direction::kSpace);
            const double r = tt.value(wt).derivative(2) + c2 * tx.value(wx).derivative(4);
            sum += r * r;
            const double dr = 2.0 * r * inv_n;
            const ObjectiveTerm ot[] = {{wt, 2, dr * 2.0}};
            const ObjectiveTerm ox[] = {{wx, 4, dr * 24.0 * c2}};
            tt.backward(ot, out.g_pde);
            tx.backward(ox, out.g_pde);
        }
        out.losses.l_pde = sum * inv_n;
    }
    {
        const double inv_n = 1.0 / static_cast<double>(points.ic.size());
        double sum_ic = 0.0;
        double sum_ic_t = 0.0;
        for (double x : points.ic) {
            Tape tape(1);
            const NodeId w = record_model(tape, model, 0.0, x, Direction::kTime);
            const double e = tape.value(w)[0] - problem.initial_displacement(x);
            const double ev = tape.value(w)[1] - problem.initial_velocity(x);
            sum_ic += e * e;
            sum_ic_t += ev * ev;
            const ObjectiveTerm oi[] = {{w, 0, 2.0 * e * inv_n}};
            const ObjectiveTerm ov[] = {{w, 1, 2.0 * ev * inv_n}};
            tape.backward(oi, out.g_ic);
            tape.backward(ov, out.g_ic_t);
        }
        out.losses.l_ic = sum_ic * inv_n;
        out.losses.l_ic_t = sum_ic_t * inv_n;
    }
    {
        const double inv_n = 1.0 / static_cast<double>(points.bc.size());
        double sum = 0.0;
        for (double t : points.bc) {
            for (double x : {0.0, problem.length}) {
                Tape tape(0);
                const NodeId w = record_model(tape, model, t, x, Direction::kTime);
                const double v = tape.value(w)[0];
                sum += v * v;
                const ObjectiveTerm o[] = {{w, 0, 2.0 * v * inv_n}};
                tape.backward(o, out.g_bc);
            }
        }
        out.losses.l_bc = sum * inv_n;
    }
    if (reg == RegKind::kWeightDecay) weight_decay(model, out, true);
    return out;
}

LossBreakdown loss_components(const HybridModel& model, const BeamProblem& problem, const PointSets& points,
                              RegKind reg) {
    LossOptions opts;
    opts.reg = reg;
    opts.gradients = false;
    return loss_terms(model, problem, points, opts).losses;
}

double adaptive_weight(double loss, int harmonics, double scale_const) {
    const double scale = 1.0 + harmonics / scale_const;
    return scale / (1.0 + std::exp(-std::log10(std::max(loss, kLossFloor))));
}

LossBreakdown adaptive_weights(LossBreakdown losses, int harmonics, double scale_const) {
    losses.w_pde = adaptive_weight(losses.l_pde, harmonics, scale_const);
    losses.w_ic = adaptive_weight(losses.l_ic, harmonics, scale_const);
    losses.w_ic_t = adaptive_weight(losses.l_ic_t, harmonics, scale_const);
    losses.w_bc = adaptive_weight(losses.l_bc, harmonics, scale_const);
    losses.total = losses.weighted_sum();
    return losses;
}

TotalLoss combine_terms(const LossTerms& terms, int harmonics, double lambda_reg, double scale_const) {
    TotalLoss out;
    LossBreakdown b = terms.losses;
    b.lambda_reg = lambda_reg;
    out.breakdown = adaptive_weights(b, harmonics, scale_const);
    if (!std::isfinite(out.breakdown.total)) {
        throw DivergenceError("total loss is not finite");
    }
    const std::size_t n = terms.g_pde.size();
    out.gradient.assign(n, 0.0);
    const LossBreakdown& w = out.breakdown;
    for (std::size_t i = 0; i < n; ++i) {
        double g = w.w_pde * terms.g_pde[i] + w.w_ic * terms.g_ic[i] + w.w_ic_t * terms.g_ic_t[i] +
                   w.w_bc * terms.g_bc[i];
        if (lambda_reg != 0.0) g += lambda_reg * terms.g_reg[i];
        if (!std::isfinite(g)) throw DivergenceError("gradient is not finite");
        out.gradient[i] = g;
    }
    return out;
}

TotalLoss total_loss(const HybridModel& model, const BeamProblem& problem, const PointSets& points,
                     const TotalLossOptions& options) {
    LossOptions lo;
    lo.reg = options.lambda_reg > 0.0 ? RegKind::kWeightDecay : RegKind::kNone;
    lo.chunk = options.chunk;
    return combine_terms(loss_terms(model, problem, points, lo), model.harmonics(), options.lambda_reg,
                         options.scale_const);
}

}  // namespace beampinn
