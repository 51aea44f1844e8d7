#pragma once

#include <filesystem>
#include <string>

#include "beampinn/hybrid_model.hpp"

namespace beampinn {

inline constexpr int kCheckpointFormatVersion = 1;

/// {format_version, seed, config, fourier: {a, b}, lambda, layers: [{w, b}]}.
/// Doubles are written in shortest round-trip form, so load(save(m)) is value-exact.
std::string checkpoint_to_json(const HybridModel& model);
HybridModel checkpoint_from_json(const std::string& text);

void save_checkpoint(const HybridModel& model, const std::filesystem::path& path);
HybridModel load_checkpoint(const std::filesystem::path& path);

}  // namespace beampinn
