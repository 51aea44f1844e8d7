#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "beampinn/beam_problem.hpp"
#include "beampinn/hybrid_model.hpp"
#include "beampinn/sampling.hpp"
#include "beampinn/trainer.hpp"

namespace beampinn::cli {

/// Everything a command needs, after defaults, the --config file and the
/// command-line flags have been applied in that order.
struct RunConfig {
    std::string problem_path;  // empty: built-in single-mode problem
    BeamProblem problem = BeamProblem::single_mode();
    ModelConfig model{};
    TrainConfig train{};
    PointCounts points{};
    int grid_nt = 100;
    int grid_nx = 100;
    std::uint64_t seed = 42;
    std::string out = "runs/out";
    int jobs = 1;
    std::vector<int> harmonics_list{5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
    std::string checkpoint;
    double eps = 1e-6;

    /// Throws std::invalid_argument on any inconsistent setting.
    void validate() const;
};

nlohmann::ordered_json to_json(const RunConfig& config);
/// Overlays the keys present in j onto config. Unknown keys are rejected.
void apply_json(RunConfig& config, const nlohmann::ordered_json& j);
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

/// "50x50" -> {50, 50}. Throws std::invalid_argument.
std::pair<int, int> parse_grid(const std::string& text);

}  // namespace beampinn::cli
