#include "run_config.hpp"

#include <set>
#include <stdexcept>

#include "beampinn/error.hpp"
#include "beampinn/report.hpp"

namespace beampinn::cli {

using nlohmann::ordered_json;

namespace {

void reject_unknown(const ordered_json& j, std::initializer_list<const char*> keys, const std::string& where) {
    if (!j.is_object()) throw std::invalid_argument(where + " must be a JSON object");
    std::set<std::string> known(keys.begin(), keys.end());
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw std::invalid_argument("unknown key '" + key + "' in " + where);
    }
}

template <class T>
void take(const ordered_json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void RunConfig::validate() const {
    problem.validate();
    ModelConfig m = model;
    m.length = problem.length;
    m.wave_speed = problem.wave_speed;
    m.validate();
    train.validate();
    if (points.pde == 0 || points.ic == 0 || points.bc == 0) {
        throw std::invalid_argument("point counts must be positive");
    }
    if (grid_nt < 2 || grid_nx < 2) throw std::invalid_argument("validation grid needs at least 2x2 points");
    if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
    if (harmonics_list.empty()) throw std::invalid_argument("harmonics list is empty");
    for (int n : harmonics_list) {
        if (n < 1) throw std::invalid_argument("harmonics list entries must be >= 1");
    }
    if (!(eps >= 1e-8 && eps <= 1e-4)) throw std::invalid_argument("eps must lie in [1e-8, 1e-4]");
}

ordered_json to_json(const RunConfig& c) {
    const auto& p1 = c.train.phase1;
    const auto& p2 = c.train.phase2;
    return ordered_json{
        {"problem_path", c.problem_path},
        {"problem", ordered_json::parse(problem_to_json(c.problem))},
        {"model",
         {{"harmonics", c.model.harmonics},
          {"layer_dims", c.model.layer_dims},
          {"fourier_init", c.model.fourier_init == FourierInit::kScaledByNPlusOne ? "n_plus_one" : "n"},
          {"xavier_gain", c.model.xavier_gain},
          {"initial_lambda", c.model.initial_lambda}}},
        {"train",
         {{"phase1",
           {{"enabled", p1.enabled},
            {"max_epochs", p1.max_epochs},
            {"plateau_patience", p1.plateau_patience},
            {"lr", p1.lr},
            {"clip_norm", p1.clip_norm},
            {"batch_size", p1.batch_size},
            {"scheduler",
             {{"factor", p1.scheduler.factor},
              {"patience", p1.scheduler.patience},
              {"min_lr", p1.scheduler.min_lr},
              {"threshold", p1.scheduler.threshold}}}}},
          {"phase2",
           {{"enabled", p2.enabled}, {"max_iters", p2.max_iters}, {"grad_tol", p2.grad_tol}, {"memory", p2.memory}}},
          {"lambda_reg", c.train.lambda_reg},
          {"scale_const", c.train.scale_const},
          {"chunk", c.train.chunk}}},
        {"points", {{"pde", c.points.pde}, {"ic", c.points.ic}, {"bc", c.points.bc}}},
        {"grid", {{"nt", c.grid_nt}, {"nx", c.grid_nx}}},
        {"seed", c.seed},
        {"out", c.out},
        {"jobs", c.jobs},
        {"harmonics_list", c.harmonics_list},
        {"checkpoint", c.checkpoint},
        {"eps", c.eps},
    };
}

void apply_json(RunConfig& c, const ordered_json& j) {
    reject_unknown(j,
                   {"problem_path", "problem", "model", "train", "points", "grid", "seed", "out", "jobs",
                    "harmonics_list", "checkpoint", "eps"},
                   "config");
    if (j.contains("problem_path") && !j.at("problem_path").get<std::string>().empty()) {
        c.problem_path = j.at("problem_path").get<std::string>();
        c.problem = load_problem(c.problem_path);
    }
    if (j.contains("problem")) c.problem = problem_from_json(j.at("problem").dump());
    if (j.contains("model")) {
        const auto& m = j.at("model");
        reject_unknown(m, {"harmonics", "layer_dims", "fourier_init", "xavier_gain", "initial_lambda"}, "model");
        take(m, "harmonics", c.model.harmonics);
        take(m, "layer_dims", c.model.layer_dims);
        take(m, "xavier_gain", c.model.xavier_gain);
        take(m, "initial_lambda", c.model.initial_lambda);
        if (m.contains("fourier_init")) {
            const auto s = m.at("fourier_init").get<std::string>();
            if (s == "n_plus_one") {
                c.model.fourier_init = FourierInit::kScaledByNPlusOne;
            } else if (s == "n") {
                c.model.fourier_init = FourierInit::kScaledByN;
            } else {
                throw std::invalid_argument("fourier_init must be 'n_plus_one' or 'n'");
            }
        }
    }
    if (j.contains("train")) {
        const auto& t = j.at("train");
        reject_unknown(t, {"phase1", "phase2", "lambda_reg", "scale_const", "chunk"}, "train");
        if (t.contains("phase1")) {
            const auto& p = t.at("phase1");
            auto& p1 = c.train.phase1;
            reject_unknown(p, {"enabled", "max_epochs", "plateau_patience", "lr", "clip_norm", "batch_size", "scheduler"},
                           "train.phase1");
            take(p, "enabled", p1.enabled);
            take(p, "max_epochs", p1.max_epochs);
            take(p, "plateau_patience", p1.plateau_patience);
            take(p, "lr", p1.lr);
            take(p, "clip_norm", p1.clip_norm);
            take(p, "batch_size", p1.batch_size);
            if (p.contains("scheduler")) {
                const auto& s = p.at("scheduler");
                reject_unknown(s, {"factor", "patience", "min_lr", "threshold"}, "train.phase1.scheduler");
                take(s, "factor", p1.scheduler.factor);
                take(s, "patience", p1.scheduler.patience);
                take(s, "min_lr", p1.scheduler.min_lr);
                take(s, "threshold", p1.scheduler.threshold);
            }
        }
        if (t.contains("phase2")) {
            const auto& p = t.at("phase2");
            reject_unknown(p, {"enabled", "max_iters", "grad_tol", "memory"}, "train.phase2");
            take(p, "enabled", c.train.phase2.enabled);
            take(p, "max_iters", c.train.phase2.max_iters);
            take(p, "grad_tol", c.train.phase2.grad_tol);
            take(p, "memory", c.train.phase2.memory);
        }
        take(t, "lambda_reg", c.train.lambda_reg);
        take(t, "scale_const", c.train.scale_const);
        take(t, "chunk", c.train.chunk);
    }
    if (j.contains("points")) {
        const auto& p = j.at("points");
        reject_unknown(p, {"pde", "ic", "bc"}, "points");
        take(p, "pde", c.points.pde);
        take(p, "ic", c.points.ic);
        take(p, "bc", c.points.bc);
    }
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        reject_unknown(g, {"nt", "nx"}, "grid");
        take(g, "nt", c.grid_nt);
        take(g, "nx", c.grid_nx);
    }
    take(j, "seed", c.seed);
    take(j, "out", c.out);
    take(j, "jobs", c.jobs);
    take(j, "harmonics_list", c.harmonics_list);
    take(j, "checkpoint", c.checkpoint);
    take(j, "eps", c.eps);
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
    ordered_json j;
    try {
        j = ordered_json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    try {
        apply_json(base, j);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config '" + path.string() + "': " + e.what());
    }
    return base;
}

std::pair<int, int> parse_grid(const std::string& text) {
    const auto pos = text.find_first_of("xX");
    if (pos == std::string::npos) throw std::invalid_argument("grid must look like 100x100, got '" + text + "'");
    try {
        std::size_t used_a = 0;
        std::size_t used_b = 0;
        const std::string a = text.substr(0, pos);
        const std::string b = text.substr(pos + 1);
        const int nt = std::stoi(a, &used_a);
        const int nx = std::stoi(b, &used_b);
        if (used_a != a.size() || used_b != b.size() || nt < 2 || nx < 2) throw std::invalid_argument("bad grid");
        return {nt, nx};
    } catch (const std::exception&) {
        throw std::invalid_argument("grid must look like 100x100 with both sides >= 2, got '" + text + "'");
    }
}

}  // namespace beampinn::cli
