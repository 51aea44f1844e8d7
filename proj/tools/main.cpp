#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beampinn/audits.hpp"
#include "beampinn/checkpoint.hpp"
#include "beampinn/error.hpp"
#include "beampinn/metrics.hpp"
#include "beampinn/report.hpp"
#include "beampinn/sweep.hpp"
#include "beampinn/trainer.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace beampinn;

namespace {

constexpr int kExitInvalid = 1;
constexpr int kExitIo = 2;
constexpr int kExitFailed = 3;

struct Flags {
    std::optional<std::string> config;
    std::optional<std::string> problem;
    std::optional<int> harmonics;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> jobs;
    std::optional<int> epochs;
    std::optional<int> lbfgs_iters;
    std::optional<std::size_t> points;
    std::optional<std::size_t> batch;
    std::vector<int> harmonics_list;
    std::optional<std::string> checkpoint;
    std::optional<std::string> grid;
    std::optional<double> eps;
    bool quiet = false;
};

void add_shared(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "JSON run configuration; flags override its values");
    cmd->add_option("--problem", f.problem, "JSON beam problem (L, T, c, ic_disp, ic_vel, material)");
    cmd->add_option("--harmonics", f.harmonics, "Number of Fourier harmonics N");
    cmd->add_option("--seed", f.seed, "Random seed (default 42)");
    cmd->add_option("--out", f.out, "Output directory");
    cmd->add_option("--jobs", f.jobs, "Parallel sweep runs");
    cmd->add_flag("--quiet", f.quiet, "No progress output");
}

void add_training(CLI::App* cmd, Flags& f) {
    cmd->add_option("--epochs", f.epochs, "Adam epochs (phase 1)");
    cmd->add_option("--lbfgs-iters", f.lbfgs_iters, "L-BFGS iteration cap (phase 2)");
    cmd->add_option("--points", f.points, "Collocation points");
    cmd->add_option("--batch-size", f.batch, "Collocation points per Adam epoch (0 = all)");
}

cli::RunConfig resolve(const Flags& f) {
    cli::RunConfig c;
    if (f.config) c = cli::load_run_config(*f.config);
    if (f.problem) {
        c.problem_path = *f.problem;
        c.problem = load_problem(*f.problem);
    }
    if (f.harmonics) c.model.harmonics = *f.harmonics;
    if (f.seed) c.seed = *f.seed;
    if (f.out) c.out = *f.out;
    if (f.jobs) c.jobs = *f.jobs;
    if (f.epochs) c.train.phase1.max_epochs = *f.epochs;
    if (f.lbfgs_iters) c.train.phase2.max_iters = *f.lbfgs_iters;
    if (f.points) c.points.pde = *f.points;
    if (f.batch) c.train.phase1.batch_size = *f.batch;
    if (!f.harmonics_list.empty()) c.harmonics_list = f.harmonics_list;
    if (f.checkpoint) c.checkpoint = *f.checkpoint;
    if (f.grid) std::tie(c.grid_nt, c.grid_nx) = cli::parse_grid(*f.grid);
    if (f.eps) c.eps = *f.eps;
    c.train.seed = c.seed;
    c.validate();
    return c;
}

void prepare_out(const cli::RunConfig& c) {
    std::error_code ec;
    fs::create_directories(c.out, ec);
    if (ec) throw IoError("cannot create output directory '" + c.out + "': " + ec.message());
    write_text_file(fs::path(c.out) / "config.json", cli::to_json(c).dump(1) + "\n");
}

ModelConfig model_for(const cli::RunConfig& c, int harmonics) {
    ModelConfig m = c.model;
    m.harmonics = harmonics;
    m.length = c.problem.length;
    m.wave_speed = c.problem.wave_speed;
    return m;
}

void print_metrics(const MetricsReport& m) {
    std::printf("l2_rel %.6e  l2_abs %.6e  max %.6e  mean %.6e  median %.6e\n", m.l2_rel, m.l2_abs, m.max_abs,
                m.mean_abs, m.median_abs);
}

int cmd_train(const Flags& f) {
    const cli::RunConfig c = resolve(f);
    prepare_out(c);
    const HybridModel init = init_model(model_for(c, c.model.harmonics), c.seed);
    const PointSets points = build_point_sets(c.problem, c.points, c.seed);
    TrainProgress progress;
    if (!f.quiet) {
        progress = [](const TrainRecord& r) {
            if (r.phase == Phase::kTransition || r.step % 100 == 0) {
                std::fprintf(stderr, "%-10s %5d  total %.6e  grad %.3e  %.1fs\n", to_string(r.phase), r.step,
                             r.losses.total, r.grad_norm, r.wall_ms / 1000.0);
            }
        };
    }
    const TrainResult result = train(init, c.problem, points, c.train, progress);
    const fs::path out(c.out);
    save_checkpoint(result.model, out / "checkpoint.json");
    {
        std::ostringstream csv;
        write_history_csv(result.history, csv);
        write_text_file(out / "history.csv", csv.str());
    }
    const MetricsReport m = evaluate_metrics(result.model, c.problem, validation_grid(c.problem, c.grid_nt, c.grid_nx));
    write_report(m, out / "metrics.json", ReportFormat::kJson);
    std::printf("phase1 epochs %d, phase2 iterations %d (%s), final total loss %.6e\n", result.phase1_epochs,
                result.phase2_iters, to_string(result.phase2_status), result.final_losses.total);
    print_metrics(m);
    if (result.diverged) {
        std::fprintf(stderr, "error: %s\n", result.message.c_str());
        return kExitFailed;
    }
    return 0;
}

int cmd_sweep(const Flags& f) {
    const cli::RunConfig c = resolve(f);
    prepare_out(c);
    const fs::path out(c.out);
    fs::create_directories(out / "checkpoints");
    SweepConfig sc;
    sc.harmonics = c.harmonics_list;
    sc.model = c.model;
    sc.train = c.train;
    sc.counts = c.points;
    sc.grid_nt = c.grid_nt;
    sc.grid_nx = c.grid_nx;
    sc.seed = c.seed;
    sc.jobs = c.jobs;
    const bool quiet = f.quiet;
    const SweepReport report = harmonic_sweep(c.problem, sc, [&](const SweepRow& row, const HybridModel& model) {
        save_checkpoint(model, out / "checkpoints" / ("h" + std::to_string(row.harmonics) + ".json"));
        if (!quiet) {
            std::fprintf(stderr, "N=%-3d l2_rel %.3e  %.1fs%s\n", row.harmonics, row.metrics.l2_rel, row.wall_s,
                         row.diverged ? "  DIVERGED" : "");
        }
    });
    write_report(report, out / "sweep.csv", ReportFormat::kCsv);
    write_report(report, out / "sweep.json", ReportFormat::kJson);
    write_sweep_csv(report, std::cout);
    return report.any_diverged() ? kExitFailed : 0;
}

int cmd_eval(const Flags& f) {
    const cli::RunConfig c = resolve(f);
    if (c.checkpoint.empty()) throw std::invalid_argument("eval needs --checkpoint");
    const HybridModel model = load_checkpoint(c.checkpoint);
    if (model.length() != c.problem.length) {
        throw std::invalid_argument("checkpoint beam length " + std::to_string(model.length()) +
                                    " does not match problem length " + std::to_string(c.problem.length));
    }
    if (model.wave_speed() != c.problem.wave_speed) {
        throw std::invalid_argument("checkpoint wave speed " + std::to_string(model.wave_speed()) +
                                    " does not match problem wave speed " + std::to_string(c.problem.wave_speed));
    }
    if (f.harmonics && *f.harmonics != model.harmonics()) {
        throw std::invalid_argument("checkpoint has " + std::to_string(model.harmonics()) +
                                    " harmonics, --harmonics asks for " + std::to_string(*f.harmonics));
    }
    prepare_out(c);
    const Grid grid = validation_grid(c.problem, c.grid_nt, c.grid_nx);
    const MetricsReport m = evaluate_metrics(model, c.problem, grid);
    const fs::path out(c.out);
    write_report(m, out / "metrics.json", ReportFormat::kJson);
    std::ofstream err(out / "errors.csv", std::ios::binary | std::ios::trunc);
    if (!err) throw IoError("cannot write errors.csv");
    err << "t,x,w_pred,w_exact,abs_err\n";
    char line[160];
    for (const Point& p : grid.points) {
        const double pred = eval_model(model, p.t, p.x);
        const double exact = exact_solution(c.problem, p.t, p.x);
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g,%.17g\n", p.t, p.x, pred, exact,
                      std::fabs(pred - exact));
        err << line;
    }
    if (!err.flush()) throw IoError("failed writing errors.csv");
    print_metrics(m);
    return 0;
}

int cmd_check(const Flags& f) {
    const cli::RunConfig c = resolve(f);
    const auto results = run_all_audits(AuditSuiteOptions{c.eps, c.seed});
    bool ok = true;
    std::printf("%-16s %-5s %12s %12s %8s  %s\n", "audit", "", "metric", "threshold", "time", "detail");
    for (const AuditResult& r : results) {
        std::printf("%-16s %-5s %12.4g %12.4g %7.2fs  %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL", r.metric,
                    r.threshold, r.seconds, r.detail.c_str());
        ok = ok && r.passed;
    }
    return ok ? 0 : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid Fourier / neural solver for the Euler-Bernoulli beam equation"};
    app.require_subcommand(1);
    Flags f;

    auto* train_cmd = app.add_subcommand("train", "Two-phase training of one model");
    add_shared(train_cmd, f);
    add_training(train_cmd, f);
    train_cmd->add_option("--grid", f.grid, "Validation grid, e.g. 100x100");

    auto* sweep_cmd = app.add_subcommand("sweep", "Independent runs over several harmonic counts");
    add_shared(sweep_cmd, f);
    add_training(sweep_cmd, f);
    sweep_cmd->add_option("--harmonics-list", f.harmonics_list, "Comma-separated N values (default 5,10,...,50)")
        ->delimiter(',');
    sweep_cmd->add_option("--grid", f.grid, "Validation grid, e.g. 100x100");

    auto* eval_cmd = app.add_subcommand("eval", "Validation metrics and per-point errors of a checkpoint");
    add_shared(eval_cmd, f);
    eval_cmd->add_option("--checkpoint", f.checkpoint, "Checkpoint JSON")->required();
    eval_cmd->add_option("--grid", f.grid, "Validation grid, e.g. 50x50");

    auto* check_cmd = app.add_subcommand("check", "Run the jet, gradient, residual, boundary and sampling audits");
    add_shared(check_cmd, f);
    check_cmd->add_option("--eps", f.eps, "Finite-difference step for the gradient audit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitInvalid;
    }

    try {
        if (train_cmd->parsed()) return cmd_train(f);
        if (sweep_cmd->parsed()) return cmd_sweep(f);
        if (eval_cmd->parsed()) return cmd_eval(f);
        if (check_cmd->parsed()) return cmd_check(f);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInvalid;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const DivergenceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailed;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailed;
    }
    return kExitInvalid;
}
