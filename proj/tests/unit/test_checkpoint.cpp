#include <gtest/gtest.h>

#include <filesystem>

#include "beampinn/checkpoint.hpp"
#include "beampinn/error.hpp"

using namespace beampinn;

TEST(Checkpoint, RoundTripIsValueExact) {
    ModelConfig cfg;
    cfg.harmonics = 7;
    cfg.layer_dims = {2, 9, 5, 1};
    cfg.length = 3.25;
    cfg.wave_speed = 0.7;
    cfg.fourier_init = FourierInit::kScaledByN;
    cfg.xavier_gain = 0.37;
    HybridModel m = init_model(cfg, 99);
    m.set_lambda(-1.0 / 3.0);
    m.params()[m.net_offset() + 3] = 1e-300;
    m.params()[m.net_offset() + 4] = 0.1 + 0.2;
    const HybridModel back = checkpoint_from_json(checkpoint_to_json(m));
    EXPECT_EQ(back.seed(), 99u);
    EXPECT_EQ(back.harmonics(), 7);
    EXPECT_EQ(back.config().layer_dims, cfg.layer_dims);
    EXPECT_EQ(back.length(), 3.25);
    EXPECT_EQ(back.wave_speed(), 0.7);
    EXPECT_EQ(back.config().fourier_init, FourierInit::kScaledByN);
    ASSERT_EQ(back.size(), m.size());
    for (std::size_t i = 0; i < m.size(); ++i) EXPECT_EQ(back.params()[i], m.params()[i]) << i;
    EXPECT_EQ(checkpoint_to_json(back), checkpoint_to_json(m));
}

TEST(Checkpoint, FileRoundTripAndErrors) {
    const auto dir = std::filesystem::temp_directory_path() / "beampinn_ckpt_test";
    std::filesystem::create_directories(dir);
    const HybridModel m = init_model(ModelConfig{}, 5);
    save_checkpoint(m, dir / "m.json");
    const HybridModel back = load_checkpoint(dir / "m.json");
    EXPECT_TRUE(std::equal(m.params().begin(), m.params().end(), back.params().begin()));
    EXPECT_THROW(load_checkpoint(dir / "missing.json"), IoError);
    EXPECT_THROW(checkpoint_from_json("{}"), IoError);
    EXPECT_THROW(checkpoint_from_json("not json"), IoError);
    std::string text = checkpoint_to_json(m);
    text.replace(text.find("\"format_version\": 1"), 19, "\"format_version\": 9");
    EXPECT_THROW(checkpoint_from_json(text), IoError);
    std::filesystem::remove_all(dir);
}
