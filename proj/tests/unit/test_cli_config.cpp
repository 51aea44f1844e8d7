#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "run_config.hpp"

using namespace beampinn;
using namespace beampinn::cli;

TEST(ParseGrid, Formats) {
    EXPECT_EQ(parse_grid("50x50"), (std::pair<int, int>{50, 50}));
    EXPECT_EQ(parse_grid("100X7"), (std::pair<int, int>{100, 7}));
    EXPECT_THROW(parse_grid("50"), std::invalid_argument);
    EXPECT_THROW(parse_grid("1x5"), std::invalid_argument);
    EXPECT_THROW(parse_grid("5x5x"), std::invalid_argument);
}

TEST(RunConfig, JsonRoundTrip) {
    RunConfig c;
    c.model.harmonics = 17;
    c.train.phase1.lr = 0.003;
    c.train.phase2.enabled = false;
    c.points.pde = 123;
    c.seed = 7;
    c.harmonics_list = {5, 10};
    RunConfig d;
    apply_json(d, to_json(c));
    EXPECT_EQ(to_json(d).dump(), to_json(c).dump());
    EXPECT_EQ(d.model.harmonics, 17);
    EXPECT_FALSE(d.train.phase2.enabled);
}

TEST(RunConfig, PartialOverlayAndUnknownKeys) {
    RunConfig c;
    apply_json(c, nlohmann::ordered_json::parse(R"({"model": {"harmonics": 20}, "train": {"phase1": {"max_epochs": 5}}})"));
    EXPECT_EQ(c.model.harmonics, 20);
    EXPECT_EQ(c.train.phase1.max_epochs, 5);
    EXPECT_EQ(c.train.phase1.lr, 0.01);
    EXPECT_THROW(apply_json(c, nlohmann::ordered_json::parse(R"({"modle": {}})")), std::invalid_argument);
    EXPECT_THROW(apply_json(c, nlohmann::ordered_json::parse(R"({"train": {"phase3": {}}})")), std::invalid_argument);
}

TEST(RunConfig, Validation) {
    RunConfig c;
    EXPECT_NO_THROW(c.validate());
    c.model.harmonics = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = RunConfig{};
    c.eps = 0.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = RunConfig{};
    c.jobs = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(RunConfig, LoadFromFile) {
    const auto path = std::filesystem::temp_directory_path() / "beampinn_cfg_test.json";
    {
        std::ofstream out(path);
        out << R"({"seed": 9, "problem": {"L": 5.0, "T": 2.0, "c": 1.0, "ic_disp": [0.0, 1.0], "ic_vel": []}})";
    }
    const RunConfig c = load_run_config(path);
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(c.problem.length, 5.0);
    EXPECT_EQ(c.problem.ic_disp, (std::vector<double>{0.0, 1.0}));
    std::filesystem::remove(path);
    EXPECT_ANY_THROW(load_run_config(path));
}
