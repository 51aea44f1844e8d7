#include "beampinn/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "beampinn/error.hpp"

namespace beampinn {

using nlohmann::ordered_json;

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string shortest(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// JSON has no NaN; it is stored as null.
ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

double read_num(const ordered_json& j, const char* key) {
    const auto& v = j.at(key);
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

ordered_json metrics_json(const MetricsReport& m) {
    return ordered_json{
        {"l2_rel", num(m.l2_rel)},
        {"l2_abs", num(m.l2_abs)},
        {"max_abs", num(m.max_abs)},
        {"mean_abs", num(m.mean_abs)},
        {"median_abs", num(m.median_abs)},
        {"grid_nt", m.grid_nt},
        {"grid_nx", m.grid_nx},
        {"problem_fingerprint", m.problem_fingerprint},
        {"model_fingerprint", m.model_fingerprint},
    };
}

MetricsReport metrics_parse(const ordered_json& j) {
    MetricsReport m;
    m.l2_rel = read_num(j, "l2_rel");
    m.l2_abs = read_num(j, "l2_abs");
    m.max_abs = read_num(j, "max_abs");
    m.mean_abs = read_num(j, "mean_abs");
    m.median_abs = read_num(j, "median_abs");
    m.grid_nt = j.at("grid_nt").get<int>();
    m.grid_nx = j.at("grid_nx").get<int>();
    m.problem_fingerprint = j.at("problem_fingerprint").get<std::string>();
    m.model_fingerprint = j.at("model_fingerprint").get<std::string>();
    return m;
}

ordered_json losses_json(const LossBreakdown& l) {
    return ordered_json{
        {"l_pde", num(l.l_pde)},   {"l_ic", num(l.l_ic)},     {"l_ic_t", num(l.l_ic_t)}, {"l_bc", num(l.l_bc)},
        {"l_reg", num(l.l_reg)},   {"w_pde", num(l.w_pde)},   {"w_ic", num(l.w_ic)},     {"w_ic_t", num(l.w_ic_t)},
        {"w_bc", num(l.w_bc)},     {"lambda_reg", num(l.lambda_reg)}, {"total", num(l.total)},
    };
}

LossBreakdown losses_parse(const ordered_json& j) {
    LossBreakdown l;
    l.l_pde = read_num(j, "l_pde");
    l.l_ic = read_num(j, "l_ic");
    l.l_ic_t = read_num(j, "l_ic_t");
    l.l_bc = read_num(j, "l_bc");
    l.l_reg = read_num(j, "l_reg");
    l.w_pde = read_num(j, "w_pde");
    l.w_ic = read_num(j, "w_ic");
    l.w_ic_t = read_num(j, "w_ic_t");
    l.w_bc = read_num(j, "w_bc");
    l.lambda_reg = read_num(j, "lambda_reg");
    l.total = read_num(j, "total");
    return l;
}

template <class Fn>
void write_with(const std::filesystem::path& path, Fn&& fn) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    fn(out);
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

void write_sweep_csv(const SweepReport& report, std::ostream& out) {
    out << "harmonics,l2_rel,l2_abs,max_abs,mean_abs,median_abs,final_total_loss,phase1_epochs,phase2_iters,wall_s,"
           "seed,paper_l2_ref\n";
    for (const SweepRow& r : report.rows) {
        char wall[32];
        std::snprintf(wall, sizeof(wall), "%.3f", r.wall_s);
        out << r.harmonics << ',' << g17(r.metrics.l2_rel) << ',' << g17(r.metrics.l2_abs) << ','
            << g17(r.metrics.max_abs) << ',' << g17(r.metrics.mean_abs) << ',' << g17(r.metrics.median_abs) << ','
            << g17(r.final_losses.total) << ',' << r.phase1_epochs << ',' << r.phase2_iters << ',' << wall << ','
            << r.seed << ',' << (r.l2_reference ? shortest(*r.l2_reference) : std::string()) << '\n';
    }
}

std::string sweep_to_json(const SweepReport& report) {
    ordered_json rows = ordered_json::array();
    for (const SweepRow& r : report.rows) {
        rows.push_back(ordered_json{
            {"harmonics", r.harmonics},
            {"metrics", metrics_json(r.metrics)},
            {"final_losses", losses_json(r.final_losses)},
            {"final_total_loss", num(r.final_losses.total)},
            {"phase1_epochs", r.phase1_epochs},
            {"phase2_iters", r.phase2_iters},
            {"wall_s", r.wall_s},
            {"seed", r.seed},
            {"diverged", r.diverged},
            {"message", r.message},
            {"paper_l2_ref", r.l2_reference ? ordered_json(*r.l2_reference) : ordered_json(nullptr)},
        });
    }
    return ordered_json{{"rows", rows}}.dump(1) + "\n";
}

SweepReport sweep_from_json(const std::string& text) {
    try {
        const ordered_json j = ordered_json::parse(text);
        SweepReport report;
        for (const auto& r : j.at("rows")) {
            SweepRow row;
            row.harmonics = r.at("harmonics").get<int>();
            row.metrics = metrics_parse(r.at("metrics"));
            row.final_losses = losses_parse(r.at("final_losses"));
            row.phase1_epochs = r.at("phase1_epochs").get<int>();
            row.phase2_iters = r.at("phase2_iters").get<int>();
            row.wall_s = r.at("wall_s").get<double>();
            row.seed = r.at("seed").get<std::uint64_t>();
            row.diverged = r.at("diverged").get<bool>();
            row.message = r.at("message").get<std::string>();
            if (!r.at("paper_l2_ref").is_null()) row.l2_reference = r.at("paper_l2_ref").get<double>();
            report.rows.push_back(std::move(row));
        }
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed sweep report: ") + e.what());
    }
}

std::string metrics_to_json(const MetricsReport& metrics) { return metrics_json(metrics).dump(1) + "\n"; }

MetricsReport metrics_from_json(const std::string& text) {
    try {
        return metrics_parse(ordered_json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed metrics report: ") + e.what());
    }
}

void write_metrics_csv(const MetricsReport& m, std::ostream& out) {
    out << "l2_rel,l2_abs,max_abs,mean_abs,median_abs,grid_nt,grid_nx,problem_fingerprint,model_fingerprint\n";
    out << g17(m.l2_rel) << ',' << g17(m.l2_abs) << ',' << g17(m.max_abs) << ',' << g17(m.mean_abs) << ','
        << g17(m.median_abs) << ',' << m.grid_nt << ',' << m.grid_nx << ',' << m.problem_fingerprint << ','
        << m.model_fingerprint << '\n';
}

void write_report(const SweepReport& report, const std::filesystem::path& path, ReportFormat format) {
    write_with(path, [&](std::ostream& out) {
        if (format == ReportFormat::kCsv) {
            write_sweep_csv(report, out);
        } else {
            out << sweep_to_json(report);
        }
    });
}

void write_report(const MetricsReport& metrics, const std::filesystem::path& path, ReportFormat format) {
    write_with(path, [&](std::ostream& out) {
        if (format == ReportFormat::kCsv) {
            write_metrics_csv(metrics, out);
        } else {
            out << metrics_to_json(metrics);
        }
    });
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    write_with(path, [&](std::ostream& out) { out << text; });
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
    return ss.str();
}

}  // namespace beampinn
