#include "beampinn/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "beampinn/error.hpp"

namespace beampinn {

using nlohmann::ordered_json;

namespace {

const char* init_name(FourierInit init) {
    return init == FourierInit::kScaledByNPlusOne ? "n_plus_one" : "n";
}

FourierInit parse_init(const std::string& s) {
    if (s == "n_plus_one") return FourierInit::kScaledByNPlusOne;
    if (s == "n") return FourierInit::kScaledByN;
    throw IoError("unknown fourier_init '" + s + "'");
}

}  // namespace

std::string checkpoint_to_json(const HybridModel& model) {
    const ModelConfig& cfg = model.config();
    ordered_json j;
    j["format_version"] = kCheckpointFormatVersion;
    j["seed"] = model.seed();
    j["config"] = {
        {"harmonics", cfg.harmonics},
        {"layer_dims", cfg.layer_dims},
        {"length", cfg.length},
        {"wave_speed", cfg.wave_speed},
        {"fourier_init", init_name(cfg.fourier_init)},
        {"xavier_gain", cfg.xavier_gain},
        {"initial_lambda", cfg.initial_lambda},
    };
    const auto a = model.cos_coeffs();
    const auto b = model.sin_coeffs();
    j["fourier"] = {{"a", std::vector<double>(a.begin(), a.end())}, {"b", std::vector<double>(b.begin(), b.end())}};
    j["lambda"] = model.lambda();

    const auto net = model.net_params();
    ordered_json layers = ordered_json::array();
    for (const LayerView& v : model.mlp().layers) {
        ordered_json w = ordered_json::array();
        for (int o = 0; o < v.out; ++o) {
            const auto row = net.subspan(v.weight_offset + static_cast<std::size_t>(o) * v.in, static_cast<std::size_t>(v.in));
            w.push_back(std::vector<double>(row.begin(), row.end()));
        }
        const auto bias = net.subspan(v.bias_offset, static_cast<std::size_t>(v.out));
        layers.push_back({{"w", w}, {"b", std::vector<double>(bias.begin(), bias.end())}});
    }
    j["layers"] = layers;
    return j.dump(1) + "\n";
}

HybridModel checkpoint_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw IoError(std::string("checkpoint is not valid JSON: ") + e.what());
    }
    try {
        const int version = j.at("format_version").get<int>();
        if (version != kCheckpointFormatVersion) {
            throw IoError("unsupported checkpoint format_version " + std::to_string(version));
        }
        const auto& c = j.at("config");
        ModelConfig cfg;
        cfg.harmonics = c.at("harmonics").get<int>();
        cfg.layer_dims = c.at("layer_dims").get<std::vector<int>>();
        cfg.length = c.at("length").get<double>();
        cfg.wave_speed = c.at("wave_speed").get<double>();
        cfg.fourier_init = parse_init(c.value("fourier_init", std::string("n_plus_one")));
        cfg.xavier_gain = c.value("xavier_gain", cfg.xavier_gain);
        cfg.initial_lambda = c.value("initial_lambda", cfg.initial_lambda);

        HybridModel model(cfg, j.at("seed").get<std::uint64_t>());
        const auto a = j.at("fourier").at("a").get<std::vector<double>>();
        const auto b = j.at("fourier").at("b").get<std::vector<double>>();
        if (a.size() != static_cast<std::size_t>(cfg.harmonics) || b.size() != a.size()) {
            throw IoError("fourier coefficient arrays do not match harmonics");
        }
        std::copy(a.begin(), a.end(), model.cos_coeffs().begin());
        std::copy(b.begin(), b.end(), model.sin_coeffs().begin());
        model.set_lambda(j.at("lambda").get<double>());

        const auto& layers = j.at("layers");
        const auto& shape = model.mlp().layers;
        if (layers.size() != shape.size()) throw IoError("layer count does not match layer_dims");
        auto net = model.net_params();
        for (std::size_t l = 0; l < shape.size(); ++l) {
            const LayerView& v = shape[l];
            const auto w = layers[l].at("w").get<std::vector<std::vector<double>>>();
            const auto bias = layers[l].at("b").get<std::vector<double>>();
            if (w.size() != static_cast<std::size_t>(v.out) || bias.size() != static_cast<std::size_t>(v.out)) {
                throw IoError("layer " + std::to_string(l) + " has the wrong shape");
            }
            for (int o = 0; o < v.out; ++o) {
                const auto& row = w[static_cast<std::size_t>(o)];
                if (row.size() != static_cast<std::size_t>(v.in)) {
                    throw IoError("layer " + std::to_string(l) + " has the wrong shape");
                }
                std::copy(row.begin(), row.end(), net.begin() + static_cast<std::ptrdiff_t>(v.weight_offset + static_cast<std::size_t>(o) * v.in));
            }
            std::copy(bias.begin(), bias.end(), net.begin() + static_cast<std::ptrdiff_t>(v.bias_offset));
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed checkpoint: ") + e.what());
    }
}

void save_checkpoint(const HybridModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << checkpoint_to_json(model);
    if (!out) throw IoError("failed writing " + path.string());
}

HybridModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return checkpoint_from_json(ss.str());
}

}  // namespace beampinn
