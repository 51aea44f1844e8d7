#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "beampinn/audits.hpp"
#include "beampinn/error.hpp"
#include "beampinn/metrics.hpp"
#include "beampinn/report.hpp"
#include "beampinn/sweep.hpp"

using namespace beampinn;

namespace {

HybridModel exact_model(const BeamProblem& p) {
    ModelConfig cfg;
    cfg.length = p.length;
    cfg.wave_speed = p.wave_speed;
    HybridModel m = init_model(cfg, 1);
    m.clear();
    m.cos_coeffs()[0] = 1.0;
    return m;
}

SweepConfig tiny_sweep() {
    SweepConfig c;
    c.model.layer_dims = {2, 8, 6, 1};
    c.train.phase1.max_epochs = 20;
    c.train.phase1.batch_size = 64;
    c.train.phase2.max_iters = 15;
    c.counts = PointCounts{150, 30, 20};
    c.grid_nt = 20;
    c.grid_nx = 20;
    return c;
}

}  // namespace

TEST(Metrics, ExactModelHasZeroError) {
    const BeamProblem p = BeamProblem::single_mode();
    const MetricsReport m = evaluate_metrics(exact_model(p), p, validation_grid(p));
    EXPECT_EQ(m.l2_rel, 0.0);
    EXPECT_EQ(m.l2_abs, 0.0);
    EXPECT_EQ(m.max_abs, 0.0);
    EXPECT_EQ(m.mean_abs, 0.0);
    EXPECT_EQ(m.median_abs, 0.0);
    EXPECT_EQ(m.grid_nt, 100);
    EXPECT_EQ(m.problem_fingerprint.size(), 16u);
}

TEST(Metrics, ConstantOffsetAgainstBruteForce) {
    const BeamProblem p = BeamProblem::single_mode();
    const Grid g = validation_grid(p);
    std::vector<double> exact, pred;
    double sum_w2 = 0.0;
    for (int i = 0; i < 100; ++i) {
        for (int j = 0; j < 100; ++j) {
            const double t = p.horizon * i / 99.0, x = p.length * j / 99.0;
            const double w = exact_solution(p, t, x);
            sum_w2 += w * w;
        }
    }
    for (const Point& q : g.points) {
        exact.push_back(exact_solution(p, q.t, q.x));
        pred.push_back(exact.back() + 1e-3);
    }
    const MetricsReport m = metrics_from_fields(pred, exact, g);
    EXPECT_NEAR(m.l2_rel, 1e-3 * std::sqrt(1e4) / std::sqrt(sum_w2), 1e-12 * m.l2_rel);
    EXPECT_NEAR(m.max_abs, 1e-3, 1e-15);
    EXPECT_NEAR(m.median_abs, 1e-3, 1e-15);
    EXPECT_NEAR(m.l2_abs, 1e-3 * std::sqrt(1e4 * g.dt() * g.dx()), 1e-15);
}

TEST(Metrics, RandomFieldsMatchDoubleLoopOracle) {
    const BeamProblem p = BeamProblem::two_mode();
    std::mt19937_64 rng(6);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 10; ++trial) {
        const int nt = 5 + trial * 7, nx = 9 + trial * 3;
        const Grid g = validation_grid(p, nt, nx);
        std::vector<double> pred(g.points.size()), exact(g.points.size());
        for (std::size_t i = 0; i < pred.size(); ++i) {
            pred[i] = n01(rng);
            exact[i] = n01(rng);
        }
        double e2 = 0, w2 = 0, mx = 0, sum = 0;
        std::vector<double> abs_e;
        for (int i = 0; i < nt; ++i) {
            for (int j = 0; j < nx; ++j) {
                const std::size_t k = static_cast<std::size_t>(i) * nx + j;
                const double e = pred[k] - exact[k];
                e2 += e * e;
                w2 += exact[k] * exact[k];
                mx = std::max(mx, std::fabs(e));
                sum += std::fabs(e);
                abs_e.push_back(std::fabs(e));
            }
        }
        std::sort(abs_e.begin(), abs_e.end());
        const std::size_t n = abs_e.size();
        const double med = n % 2 ? abs_e[n / 2] : 0.5 * (abs_e[n / 2 - 1] + abs_e[n / 2]);
        const MetricsReport m = metrics_from_fields(pred, exact, g);
        EXPECT_NEAR(m.l2_rel, std::sqrt(e2) / std::sqrt(w2), 1e-12 * m.l2_rel);
        EXPECT_NEAR(m.l2_abs, std::sqrt(e2 * (p.horizon / (nt - 1)) * (p.length / (nx - 1))), 1e-12 * m.l2_abs);
        EXPECT_EQ(m.max_abs, mx);
        EXPECT_NEAR(m.mean_abs, sum / n, 1e-12 * m.mean_abs);
        EXPECT_EQ(m.median_abs, med);
        EXPECT_LE(m.median_abs, m.max_abs);
        EXPECT_LE(m.mean_abs, m.max_abs);
    }
}

TEST(Metrics, ZeroExactFieldIsAnError) {
    const BeamProblem p = BeamProblem::single_mode();
    const Grid g = validation_grid(p, 3, 3);
    const std::vector<double> zeros(9, 0.0), pred(9, 1.0);
    EXPECT_THROW(metrics_from_fields(pred, zeros, g), std::invalid_argument);
    EXPECT_THROW(metrics_from_fields(pred, std::vector<double>(4, 1.0), g), std::invalid_argument);
}

TEST(BatchSize, Formula) {
    EXPECT_EQ(batch_size_estimate(24'000'000'000LL, 27925), 51029);
    const std::int64_t edge = static_cast<std::int64_t>(std::ceil(4.0 * 27925 * 4 / 0.95));
    EXPECT_EQ(batch_size_estimate(edge, 27925), 1);
    EXPECT_THROW(batch_size_estimate(edge - 1, 27925), std::invalid_argument);
    EXPECT_THROW(batch_size_estimate(0, 27925), std::invalid_argument);
    EXPECT_THROW(batch_size_estimate(1000, -1), std::invalid_argument);
    EXPECT_EQ(param_count(ModelConfig{}).total_reported, 27925u);
}

TEST(GradCheck, RandomModelPasses) {
    const BeamProblem p = BeamProblem::two_mode();
    ModelConfig cfg;
    cfg.layer_dims = {2, 16, 16, 1};
    cfg.xavier_gain = 1.0;
    cfg.initial_lambda = 0.4;
    const HybridModel m = init_model(cfg, 8);
    const PointSets pts = build_point_sets(p, PointCounts{60, 30, 30}, 8);
    const GradCheckReport r = grad_check(m, p, pts, 1e-6);
    EXPECT_EQ(r.checked, 100u);
    EXPECT_LT(r.max_rel_error, 1e-4);
}

TEST(GradCheck, FreshDefaultModelPasses) {
    const BeamProblem p = BeamProblem::single_mode();
    const HybridModel m = init_model(ModelConfig{}, 42);
    const PointSets pts = build_point_sets(p, PointCounts{24, 16, 16}, 42);
    EXPECT_LT(grad_check(m, p, pts, 1e-6).max_rel_error, 1e-4);
}

TEST(GradCheck, EpsRange) {
    const BeamProblem p = BeamProblem::single_mode();
    const HybridModel m = init_model(ModelConfig{}, 1);
    const PointSets pts = build_point_sets(p, PointCounts{4, 4, 4}, 1);
    EXPECT_THROW(grad_check(m, p, pts, 0.0), std::invalid_argument);
    EXPECT_THROW(grad_check(m, p, pts, 1e-3), std::invalid_argument);
    EXPECT_THROW(grad_check(m, p, pts, 1e-9), std::invalid_argument);
}

TEST(ReferenceColumn, KnownValues) {
    EXPECT_EQ(reference_l2(10).value(), 1.94e-7);
    EXPECT_EQ(reference_l2(15).value(), 4.02e-1);
    EXPECT_EQ(reference_l2(5).value(), 5.12e-7);
    EXPECT_EQ(reference_l2(45).value(), 2.00e-1);
    EXPECT_FALSE(reference_l2(12).has_value());
}

TEST(Sweep, SingleRowMatchesStandaloneRun) {
    const BeamProblem p = BeamProblem::single_mode();
    SweepConfig c = tiny_sweep();
    c.harmonics = {10};
    const SweepReport rep = harmonic_sweep(p, c);
    ASSERT_EQ(rep.rows.size(), 1u);
    const SweepRow& row = rep.rows[0];
    EXPECT_EQ(row.seed, 52u);

    ModelConfig mc = c.model;
    mc.harmonics = 10;
    TrainConfig tc = c.train;
    tc.seed = 52;
    const TrainResult tr = train(init_model(mc, 52), p, build_point_sets(p, c.counts, 52), tc);
    const MetricsReport m = evaluate_metrics(tr.model, p, validation_grid(p, 20, 20));
    EXPECT_EQ(row.metrics.l2_rel, m.l2_rel);
    EXPECT_EQ(row.metrics.max_abs, m.max_abs);
    EXPECT_EQ(row.final_losses.total, tr.final_losses.total);
    EXPECT_EQ(row.l2_reference.value(), 1.94e-7);
}

TEST(Sweep, RowsSortedParallelEqualsSerial) {
    const BeamProblem p = BeamProblem::single_mode();
    SweepConfig c = tiny_sweep();
    c.harmonics = {15, 5, 10};
    const SweepReport serial = harmonic_sweep(p, c);
    c.jobs = 3;
    const SweepReport parallel = harmonic_sweep(p, c);
    ASSERT_EQ(serial.rows.size(), 3u);
    EXPECT_EQ(serial.rows[0].harmonics, 5);
    EXPECT_EQ(serial.rows[2].harmonics, 15);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(serial.rows[i].metrics.l2_rel, parallel.rows[i].metrics.l2_rel);
        EXPECT_EQ(serial.rows[i].final_losses.total, parallel.rows[i].final_losses.total);
    }
    c.harmonics = {};
    EXPECT_THROW(harmonic_sweep(p, c), std::invalid_argument);
}

TEST(Report, CsvSchemaAndDeterminism) {
    const BeamProblem p = BeamProblem::single_mode();
    SweepConfig c = tiny_sweep();
    c.harmonics = {5, 10};
    SweepReport a = harmonic_sweep(p, c);
    SweepReport b = harmonic_sweep(p, c);
    for (SweepReport* r : {&a, &b})
        for (SweepRow& row : r->rows) row.wall_s = 0.0;
    std::ostringstream sa, sb;
    write_sweep_csv(a, sa);
    write_sweep_csv(b, sb);
    EXPECT_EQ(sa.str(), sb.str());
    std::istringstream lines(sa.str());
    std::string header, r1, r2, extra;
    std::getline(lines, header);
    std::getline(lines, r1);
    std::getline(lines, r2);
    EXPECT_FALSE(std::getline(lines, extra));
    EXPECT_EQ(header,
              "harmonics,l2_rel,l2_abs,max_abs,mean_abs,median_abs,final_total_loss,phase1_epochs,phase2_iters,wall_s,"
              "seed,paper_l2_ref");
    EXPECT_EQ(std::count(r1.begin(), r1.end(), ','), 11);
    EXPECT_EQ(r2.substr(0, 3), "10,");
    EXPECT_EQ(std::stod(r2.substr(r2.rfind(',') + 1)), 1.94e-7);
}

TEST(Report, JsonRoundTripIsExact) {
    SweepReport rep;
    SweepRow row;
    row.harmonics = 10;
    row.metrics.l2_rel = 0.1 + 0.2;
    row.metrics.l2_abs = 1.0 / 3.0;
    row.metrics.max_abs = 5e-324;
    row.metrics.mean_abs = 2.5e-7;
    row.metrics.median_abs = std::nan("");
    row.metrics.grid_nt = 100;
    row.metrics.grid_nx = 100;
    row.metrics.problem_fingerprint = "abc";
    row.final_losses.total = 1.2345678901234567e-15;
    row.final_losses.w_ic = 0.53846153846153844;
    row.phase1_epochs = 606;
    row.phase2_iters = 51;
    row.wall_s = 12.5;
    row.seed = 52;
    row.diverged = true;
    row.message = "x";
    row.l2_reference = 1.94e-7;
    rep.rows.push_back(row);
    const SweepReport back = sweep_from_json(sweep_to_json(rep));
    ASSERT_EQ(back.rows.size(), 1u);
    const SweepRow& r = back.rows[0];
    EXPECT_EQ(r.metrics.l2_rel, row.metrics.l2_rel);
    EXPECT_EQ(r.metrics.l2_abs, row.metrics.l2_abs);
    EXPECT_EQ(r.metrics.max_abs, row.metrics.max_abs);
    EXPECT_TRUE(std::isnan(r.metrics.median_abs));
    EXPECT_EQ(r.final_losses.total, row.final_losses.total);
    EXPECT_EQ(r.final_losses.w_ic, row.final_losses.w_ic);
    EXPECT_EQ(r.seed, 52u);
    EXPECT_TRUE(r.diverged);
    EXPECT_EQ(r.l2_reference.value(), 1.94e-7);
    EXPECT_EQ(sweep_to_json(back), sweep_to_json(rep));

    const MetricsReport m = metrics_from_json(metrics_to_json(row.metrics));
    EXPECT_EQ(m.l2_abs, row.metrics.l2_abs);
    EXPECT_THROW(sweep_from_json("[]"), IoError);
}

TEST(Report, WriteFailsOnBadPath) {
    SweepReport rep;
    EXPECT_THROW(write_report(rep, "/nonexistent-dir/x/sweep.csv", ReportFormat::kCsv), IoError);
}

TEST(Audits, JetAuditPassesAndCatchesCorruptedTanh) {
    const AuditResult good = jet_audit();
    EXPECT_TRUE(good.passed) << good.metric << " " << good.detail;
    EXPECT_LT(good.seconds, 10.0);

    JetAuditOptions bad;
    // Wrong recurrence: slope series taken as 1 + u^2 instead of 1 - u^2.
    bad.tanh_impl = [](const Jet& a) {
        const int order = a.order();
        Jet u = Jet::constant(std::tanh(a[0]), order);
        Jet v = Jet::constant(1.0 + u[0] * u[0], order);
        for (int k = 1; k <= order; ++k) {
            double s = 0.0;
            for (int j = 1; j <= k; ++j) s += j * a[j] * v[k - j];
            u[k] = s / k;
            double q = 0.0;
            for (int j = 0; j <= k; ++j) q += u[j] * u[k - j];
            v[k] = q;
        }
        return u;
    };
    const AuditResult caught = jet_audit(bad);
    EXPECT_FALSE(caught.passed);
}

TEST(Audits, CheapAuditsPass) {
    for (const AuditResult& r : {residual_audit(2000), boundary_audit(2000), lhs_audit(16, 20),
                                 adaptive_weight_audit(), param_count_audit(), batch_formula_audit(), route_audit()}) {
        EXPECT_TRUE(r.passed) << r.name << ": " << r.metric << " " << r.detail;
    }
}

TEST(Sweep, RepeatIsBitIdenticalAtDefaultWidth) {
    // A wide row followed by a narrow one moves the narrow model's parameters
    // to a different heap address on the repeat.
    const BeamProblem p = BeamProblem::single_mode();
    SweepConfig c;
    c.harmonics = {5, 50};
    c.counts = PointCounts{1000, 100, 100};
    c.train.phase1.max_epochs = 20;
    c.train.phase1.batch_size = 256;
    c.train.phase2.max_iters = 5;
    c.grid_nt = 30;
    c.grid_nx = 30;
    const SweepReport a = harmonic_sweep(p, c);
    const SweepReport b = harmonic_sweep(p, c);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].metrics.l2_rel, b.rows[i].metrics.l2_rel) << "N=" << a.rows[i].harmonics;
        EXPECT_EQ(a.rows[i].final_losses.total, b.rows[i].final_losses.total) << "N=" << a.rows[i].harmonics;
    }
}
