#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "beampinn/hybrid_model.hpp"
#include "beampinn/model_tape.hpp"
#include "beampinn/tape.hpp"

using namespace beampinn;

namespace {

HybridModel mode_one(double length, double c) {
    ModelConfig cfg;
    cfg.length = length;
    cfg.wave_speed = c;
    HybridModel m = init_model(cfg, 1);
    m.clear();
    m.cos_coeffs()[0] = 1.0;
    return m;
}

HybridModel active(std::uint64_t seed, int harmonics = 10) {
    ModelConfig cfg;
    cfg.harmonics = harmonics;
    cfg.layer_dims = {2, 12, 10, 1};
    cfg.xavier_gain = 1.0;
    cfg.initial_lambda = 0.7;
    return init_model(cfg, seed);
}

}  // namespace

TEST(ParamCount, DefaultArchitecture) {
    const ParamCount c = param_count(init_model(ModelConfig{}, 42));
    EXPECT_EQ(c.net, 27905u);
    EXPECT_EQ(c.fourier, 20u);
    EXPECT_EQ(c.total_reported, 27925u);
    EXPECT_EQ(c.trainable, 27926u);
}

TEST(ParamCount, SmallAndWide) {
    ModelConfig tiny;
    tiny.harmonics = 1;
    tiny.layer_dims = {2, 1};
    const ParamCount a = param_count(tiny);
    EXPECT_EQ(a.net, 3u);
    EXPECT_EQ(a.fourier, 2u);
    EXPECT_EQ(a.total_reported, 5u);
    ModelConfig wide;
    wide.harmonics = 50;
    const ParamCount b = param_count(wide);
    EXPECT_EQ(b.net, 27905u);
    EXPECT_EQ(b.fourier, 100u);
    EXPECT_EQ(b.total_reported, 28005u);
}

TEST(InitModel, DeterministicWithExactLambda) {
    const HybridModel a = init_model(ModelConfig{}, 42);
    const HybridModel b = init_model(ModelConfig{}, 42);
    const HybridModel c = init_model(ModelConfig{}, 43);
    EXPECT_TRUE(std::equal(a.params().begin(), a.params().end(), b.params().begin()));
    EXPECT_FALSE(std::equal(a.params().begin(), a.params().end(), c.params().begin()));
    EXPECT_EQ(a.lambda(), 1e-8);
    EXPECT_EQ(c.lambda(), 1e-8);
}

TEST(InitModel, StatisticsOfTheDraws) {
    // Over many seeds: std(a_n) ~ 0.1/(n+1); Xavier bound respected; biases zero.
    const int seeds = 400;
    std::vector<double> sum2(10, 0.0);
    for (int s = 0; s < seeds; ++s) {
        const HybridModel m = init_model(ModelConfig{}, static_cast<std::uint64_t>(s));
        for (int n = 0; n < 10; ++n) sum2[n] += m.cos_coeffs()[n] * m.cos_coeffs()[n];
        if (s == 0) {
            for (const LayerView& v : m.mlp().layers) {
                const double bound = 0.01 * std::sqrt(6.0 / (v.in + v.out));
                for (int i = 0; i < v.in * v.out; ++i) {
                    EXPECT_LE(std::fabs(m.net_params()[v.weight_offset + i]), bound);
                }
                for (int i = 0; i < v.out; ++i) EXPECT_EQ(m.net_params()[v.bias_offset + i], 0.0);
            }
        }
    }
    for (int n = 0; n < 10; ++n) {
        const double want = 0.1 / (n + 2);
        EXPECT_NEAR(std::sqrt(sum2[n] / seeds), want, 0.15 * want) << "n=" << n + 1;
    }
}

TEST(InitModel, OneOverNVariant) {
    ModelConfig cfg;
    cfg.fourier_init = FourierInit::kScaledByN;
    double s2 = 0.0;
    for (int s = 0; s < 400; ++s) s2 += std::pow(init_model(cfg, s).cos_coeffs()[0], 2);
    EXPECT_NEAR(std::sqrt(s2 / 400), 0.1, 0.015);
}

TEST(InitModel, RejectsBadDims) {
    ModelConfig cfg;
    cfg.layer_dims = {3, 8, 1};
    EXPECT_THROW(init_model(cfg, 1), std::invalid_argument);
    cfg.layer_dims = {2, 8, 2};
    EXPECT_THROW(init_model(cfg, 1), std::invalid_argument);
    cfg.layer_dims = {2, 8, 1};
    cfg.harmonics = 0;
    EXPECT_THROW(init_model(cfg, 1), std::invalid_argument);
}

TEST(EvalModel, SingleModeValues) {
    const HybridModel m = mode_one(1.0, 1.0);
    EXPECT_DOUBLE_EQ(eval_model(m, 0.0, 0.5), 1.0);
    EXPECT_NEAR(eval_model(m, 0.1, 0.5), std::cos(0.1 * std::numbers::pi * std::numbers::pi), 1e-15);
    EXPECT_NEAR(eval_model(m, 0.1, 0.5), 0.551228, 1e-6);
}

TEST(EvalModel, ExactZerosOnTheBoundary) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const HybridModel m = active(rng(), 1 + i % 30);
        const double t = u(rng);
        EXPECT_EQ(eval_model(m, t, 0.0), 0.0);
        EXPECT_EQ(eval_model(m, t, m.length()), 0.0);
    }
}

TEST(EvalModelJets, ModalAnnihilation) {
    const HybridModel m = mode_one(1.0, 1.0);
    const DerivativeBundle d = eval_model_jets(m, 0.0, 0.5);
    const double pi4 = std::pow(std::numbers::pi, 4);
    EXPECT_NEAR(d.w_xxxx, pi4, 1e-12);
    EXPECT_NEAR(d.w_tt, -pi4, 1e-12);
    EXPECT_NEAR(d.w_tt + d.w_xxxx, 0.0, 1e-12);
    EXPECT_NEAR(pi4, 97.409, 1e-3);
}

TEST(EvalModelJets, MatchesFiniteDifferences) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ut(0.05, 0.95), ux(0.5, 9.5);
    for (int trial = 0; trial < 20; ++trial) {
        const HybridModel m = active(rng());
        const double t = ut(rng), x = ux(rng);
        const DerivativeBundle d = eval_model_jets(m, t, x, DerivativeRequest{true, true, true});
        auto f = [&](double tt, double xx) { return eval_model(m, tt, xx); };
        const double ht = 1e-4, hx = 1e-2;
        const double wt = (f(t + ht, x) - f(t - ht, x)) / (2 * ht);
        const double wtt = (f(t + ht, x) - 2 * f(t, x) + f(t - ht, x)) / (ht * ht);
        const double wxxxx =
            (f(t, x + 2 * hx) - 4 * f(t, x + hx) + 6 * f(t, x) - 4 * f(t, x - hx) + f(t, x - 2 * hx)) / std::pow(hx, 4);
        EXPECT_NEAR(d.w, f(t, x), 1e-14);
        EXPECT_NEAR(d.w_t, wt, 1e-5 * std::max(1.0, std::fabs(wt)));
        EXPECT_NEAR(d.w_tt, wtt, 1e-4 * std::max(1.0, std::fabs(wtt)));
        EXPECT_NEAR(d.w_xxxx, wxxxx, 1e-3 * std::max(1.0, std::fabs(wxxxx)));
    }
}

TEST(ModelTape, AgreesWithClosedFormAndBatchedJets) {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> ut(0.0, 1.0), ux(0.0, 10.0);
    for (int trial = 0; trial < 10; ++trial) {
        const HybridModel m = active(rng());
        const double t = ut(rng), x = ux(rng);
        const DerivativeBundle d = eval_model_jets(m, t, x, DerivativeRequest{true, true, true});
        Tape tt(2);
        const Jet jt = tt.value(record_model(tt, m, t, x, Direction::kTime));
        Tape tx(4);
        const Jet jx = tx.value(record_model(tx, m, t, x, Direction::kSpace));
        auto close = [](double a, double b) { return std::fabs(a - b) <= 1e-11 * std::max(1.0, std::fabs(b)); };
        EXPECT_TRUE(close(jt.value(), d.w));
        EXPECT_TRUE(close(jt.derivative(1), d.w_t));
        EXPECT_TRUE(close(jt.derivative(2), d.w_tt));
        EXPECT_TRUE(close(jx.derivative(4), d.w_xxxx)) << jx.derivative(4) << " vs " << d.w_xxxx;
    }
}

TEST(ModelTape, PureFourierJetPathMatchesClosedForm) {
    ModelConfig cfg;
    cfg.harmonics = 7;
    HybridModel m = init_model(cfg, 4);
    m.set_lambda(0.0);
    for (double t : {0.0, 0.3, 0.9}) {
        for (double x : {0.7, 3.3, 8.1}) {
            const DerivativeBundle d = eval_model_jets(m, t, x);
            Tape tt(2);
            const Jet jt = tt.value(record_model(tt, m, t, x, Direction::kTime));
            Tape tx(4);
            const Jet jx = tx.value(record_model(tx, m, t, x, Direction::kSpace));
            EXPECT_NEAR(jt.value(), d.w, 1e-12 * std::max(1e-3, std::fabs(d.w)));
            EXPECT_NEAR(jt.derivative(2), d.w_tt, 1e-12 * std::max(1e-3, std::fabs(d.w_tt)));
            EXPECT_NEAR(jx.derivative(4), d.w_xxxx, 1e-12 * std::max(1e-3, std::fabs(d.w_xxxx)));
        }
    }
}

TEST(Representability, ModalFieldsAreExact) {
    ModelConfig cfg;
    cfg.harmonics = 5;
    HybridModel m = init_model(cfg, 2);
    m.clear();
    const double alpha[] = {0.9, 0.0, -0.25, 0.1, 0.03};
    for (int n = 0; n < 5; ++n) m.cos_coeffs()[n] = alpha[n];
    const FourierHead f = m.fourier();
    for (double t : {0.0, 0.4, 1.0}) {
        for (double x : {0.1, 2.5, 7.7}) {
            double want = 0.0;
            for (int n = 1; n <= 5; ++n) want += alpha[n - 1] * std::cos(f.angular_frequency(n) * t) * std::sin(n * std::numbers::pi * x / 10.0);
            EXPECT_NEAR(eval_model(m, t, x), want, 1e-15);
        }
    }
    EXPECT_DOUBLE_EQ(f.wave_number(3), 3 * std::numbers::pi / 10.0);
    EXPECT_DOUBLE_EQ(f.angular_frequency(3), f.wave_number(3) * f.wave_number(3) * 1.0);
}
