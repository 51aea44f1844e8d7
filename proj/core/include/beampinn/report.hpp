#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "beampinn/metrics.hpp"
#include "beampinn/sweep.hpp"

namespace beampinn {

enum class ReportFormat { kCsv, kJson };

/// `harmonics,l2_rel,l2_abs,max_abs,mean_abs,median_abs,final_total_loss,phase1_epochs,phase2_iters,wall_s,seed,paper_l2_ref`
void write_sweep_csv(const SweepReport& report, std::ostream& out);
std::string sweep_to_json(const SweepReport& report);
SweepReport sweep_from_json(const std::string& text);

std::string metrics_to_json(const MetricsReport& metrics);
MetricsReport metrics_from_json(const std::string& text);
void write_metrics_csv(const MetricsReport& metrics, std::ostream& out);

/// Throws IoError when the file cannot be written.
void write_report(const SweepReport& report, const std::filesystem::path& path, ReportFormat format);
void write_report(const MetricsReport& metrics, const std::filesystem::path& path, ReportFormat format);

/// Writes text to a file, replacing it. Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace beampinn
