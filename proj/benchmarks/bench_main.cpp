#include <benchmark/benchmark.h>

#include <random>

#include "beampinn/jet.hpp"
#include "beampinn/loss.hpp"
#include "beampinn/model_tape.hpp"
#include "beampinn/sampling.hpp"

using namespace beampinn;

static void BM_JetTanh(benchmark::State& state) {
    const int order = static_cast<int>(state.range(0));
    Jet x = Jet::seed(0.3, order);
    for (auto _ : state) {
        x = tanh(x * 1.0001);
        benchmark::DoNotOptimize(x);
    }
}
BENCHMARK(BM_JetTanh)->Arg(1)->Arg(2)->Arg(4);

static void BM_JetMul(benchmark::State& state) {
    Jet a = Jet::seed(0.7, 4), b = sin(Jet::seed(0.2, 4));
    for (auto _ : state) {
        a = a * b;
        benchmark::DoNotOptimize(a);
    }
}
BENCHMARK(BM_JetMul);

static void BM_LossGradientBatched(benchmark::State& state) {
    const BeamProblem p = BeamProblem::single_mode();
    const HybridModel m = init_model(ModelConfig{}, 1);
    const auto n = static_cast<std::size_t>(state.range(0));
    const PointSets pts = build_point_sets(p, PointCounts{n, 200, 200}, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(total_loss(m, p, pts));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_LossGradientBatched)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_LossGradientTaped(benchmark::State& state) {
    const BeamProblem p = BeamProblem::single_mode();
    ModelConfig cfg;
    cfg.layer_dims = {2, 16, 16, 1};
    const HybridModel m = init_model(cfg, 1);
    const PointSets pts = build_point_sets(p, PointCounts{64, 16, 16}, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(loss_terms_taped(m, p, pts, RegKind::kNone));
    }
}
BENCHMARK(BM_LossGradientTaped)->Unit(benchmark::kMillisecond);

static void BM_RecordModel(benchmark::State& state) {
    const HybridModel m = init_model(ModelConfig{}, 1);
    for (auto _ : state) {
        Tape tape(4);
        benchmark::DoNotOptimize(record_model(tape, m, 0.4, 3.0, Direction::kSpace));
    }
}
BENCHMARK(BM_RecordModel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
