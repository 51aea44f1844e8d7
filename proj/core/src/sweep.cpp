#include "beampinn/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include "beampinn/error.hpp"

namespace beampinn {

bool SweepReport::any_diverged() const noexcept {
    return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.diverged; });
}

std::optional<double> reference_l2(int harmonics) {
    static const std::map<int, double> kTable = {
        {5, 5.12e-7},  {10, 1.94e-7}, {15, 4.02e-1}, {20, 4.80e-1}, {25, 4.82e-1},
        {30, 4.92e-1}, {35, 4.89e-1}, {40, 4.75e-1}, {45, 2.00e-1}, {50, 4.90e-1},
    };
    const auto it = kTable.find(harmonics);
    if (it == kTable.end()) return std::nullopt;
    return it->second;
}

std::uint64_t sweep_row_seed(std::uint64_t seed, int harmonics) noexcept {
    return seed + static_cast<std::uint64_t>(harmonics);
}

SweepRow run_single(const BeamProblem& problem, const SweepConfig& config, int harmonics, HybridModel* trained) {
    const auto start = std::chrono::steady_clock::now();
    SweepRow row;
    row.harmonics = harmonics;
    row.seed = sweep_row_seed(config.seed, harmonics);
    row.l2_reference = reference_l2(harmonics);

    ModelConfig mc = config.model;
    mc.harmonics = harmonics;
    mc.length = problem.length;
    mc.wave_speed = problem.wave_speed;
    TrainConfig tc = config.train;
    tc.seed = row.seed;

    const HybridModel init = init_model(mc, row.seed);
    const PointSets points = build_point_sets(problem, config.counts, row.seed);
    TrainResult result = train(init, problem, points, tc);
    row.final_losses = result.final_losses;
    row.phase1_epochs = result.phase1_epochs;
    row.phase2_iters = result.phase2_iters;
    row.diverged = result.diverged;
    row.message = result.message;
    try {
        row.metrics = evaluate_metrics(result.model, problem, validation_grid(problem, config.grid_nt, config.grid_nx));
    } catch (const std::invalid_argument& e) {
        row.diverged = true;
        row.message = e.what();
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.metrics.l2_rel = row.metrics.l2_abs = row.metrics.max_abs = nan;
        row.metrics.mean_abs = row.metrics.median_abs = nan;
    }
    if (!std::isfinite(row.metrics.l2_rel) && !row.diverged) {
        row.diverged = true;
        row.message = "non-finite validation error";
    }
    row.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (trained != nullptr) *trained = std::move(result.model);
    return row;
}

SweepReport harmonic_sweep(const BeamProblem& problem, const SweepConfig& config, const SweepRowSink& sink) {
    if (config.harmonics.empty()) throw std::invalid_argument("sweep needs at least one harmonic count");
    if (config.jobs < 1) throw std::invalid_argument("jobs must be >= 1");
    problem.validate();
    config.train.validate();
    std::vector<int> ns = config.harmonics;
    std::sort(ns.begin(), ns.end());
    if (std::adjacent_find(ns.begin(), ns.end()) != ns.end()) {
        throw std::invalid_argument("sweep harmonic counts must be distinct");
    }
    for (int n : ns) {
        ModelConfig mc = config.model;
        mc.harmonics = n;
        mc.validate();
    }

    SweepReport report;
    report.rows.resize(ns.size());
    std::atomic<std::size_t> next{0};
    std::mutex sink_mutex;
    std::exception_ptr failure;
    auto worker = [&] {
        for (std::size_t i = next++; i < ns.size(); i = next++) {
            try {
                HybridModel trained(ModelConfig{}, 0);
                SweepRow row = run_single(problem, config, ns[i], &trained);
                std::lock_guard<std::mutex> lock(sink_mutex);
                if (sink) sink(row, trained);
                report.rows[i] = std::move(row);
            } catch (...) {
                std::lock_guard<std::mutex> lock(sink_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int jobs = std::min<int>(config.jobs, static_cast<int>(ns.size()));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return report;
}

}  // namespace beampinn
