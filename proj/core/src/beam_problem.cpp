#include "beampinn/beam_problem.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "beampinn/error.hpp"
#include "beampinn/jet.hpp"

namespace beampinn {

namespace {

double modal_sum(const std::vector<double>& coeffs, double x, double length) {
    double acc = 0.0;
    for (std::size_t m = 0; m < coeffs.size(); ++m) {
        if (coeffs[m] == 0.0) continue;
        acc += coeffs[m] * sin_pi(static_cast<double>(m + 1) * (x / length));
    }
    return acc;
}

bool any_nonzero(const std::vector<double>& v) {
    for (double c : v) {
        if (c != 0.0) return true;
    }
    return false;
}

}  // namespace

void BeamProblem::validate() const {
    if (!(length > 0.0) || !std::isfinite(length)) throw std::invalid_argument("beam length L must be > 0");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("time horizon T must be > 0");
    if (!(wave_speed > 0.0) || !std::isfinite(wave_speed)) throw std::invalid_argument("wave speed c must be > 0");
    for (double c : ic_disp) {
        if (!std::isfinite(c)) throw std::invalid_argument("ic_disp contains a non-finite value");
    }
    for (double c : ic_vel) {
        if (!std::isfinite(c)) throw std::invalid_argument("ic_vel contains a non-finite value");
    }
    if (!any_nonzero(ic_disp) && !any_nonzero(ic_vel)) {
        throw std::invalid_argument("initial conditions are identically zero");
    }
    if (material) {
        const Material& m = *material;
        if (!(m.density > 0.0) || !(m.area > 0.0) || !(m.youngs_modulus > 0.0) || !(m.second_moment > 0.0)) {
            throw std::invalid_argument("material parameters must be positive");
        }
        const double c2 = wave_speed * wave_speed;
        const double implied = m.youngs_modulus * m.second_moment / (m.density * m.area);
        if (std::fabs(c2 - implied) > 1e-12 * c2) {
            throw std::invalid_argument("material parameters give c^2 = " + std::to_string(implied) +
                                        ", inconsistent with wave_speed^2 = " + std::to_string(c2));
        }
    }
}

double BeamProblem::initial_displacement(double x) const noexcept { return modal_sum(ic_disp, x, length); }

double BeamProblem::initial_velocity(double x) const noexcept { return modal_sum(ic_vel, x, length); }

BeamProblem BeamProblem::single_mode() { return BeamProblem{}; }

BeamProblem BeamProblem::two_mode() {
    BeamProblem p;
    p.ic_disp = {1.0, 0.0, 0.3};
    return p;
}

double exact_solution(const BeamProblem& problem, double t, double x) {
    const std::size_t modes = std::max(problem.ic_disp.size(), problem.ic_vel.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < modes; ++i) {
        const double alpha = i < problem.ic_disp.size() ? problem.ic_disp[i] : 0.0;
        const double beta = i < problem.ic_vel.size() ? problem.ic_vel[i] : 0.0;
        if (alpha == 0.0 && beta == 0.0) continue;
        const double m = static_cast<double>(i + 1);
        const double k = m * std::numbers::pi / problem.length;
        const double omega = k * k * problem.wave_speed;
        const double temporal = alpha * std::cos(omega * t) + (beta / omega) * std::sin(omega * t);
        acc += temporal * sin_pi(m * (x / problem.length));
    }
    return acc;
}

std::string problem_to_json(const BeamProblem& p) {
    nlohmann::ordered_json j;
    j["L"] = p.length;
    j["T"] = p.horizon;
    j["c"] = p.wave_speed;
    j["ic_disp"] = p.ic_disp;
    j["ic_vel"] = p.ic_vel;
    if (p.material) {
        j["material"] = {{"E", p.material->youngs_modulus},
                         {"I", p.material->second_moment},
                         {"rho", p.material->density},
                         {"A", p.material->area}};
    }
    return j.dump(1) + "\n";
}

BeamProblem problem_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        BeamProblem p;
        p.length = j.value("L", p.length);
        p.horizon = j.value("T", p.horizon);
        p.wave_speed = j.value("c", p.wave_speed);
        p.ic_disp = j.value("ic_disp", p.ic_disp);
        p.ic_vel = j.value("ic_vel", p.ic_vel);
        if (j.contains("material")) {
            const auto& m = j.at("material");
            p.material = Material{m.at("E").get<double>(), m.at("I").get<double>(), m.at("rho").get<double>(),
                                  m.at("A").get<double>()};
        }
        p.validate();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed problem file: ") + e.what());
    }
}

BeamProblem load_problem(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open problem file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return problem_from_json(ss.str());
}

}  // namespace beampinn
