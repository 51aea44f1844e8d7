#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace beampinn {

struct Material {
    double youngs_modulus = 0.0;  // E
    double second_moment = 0.0;   // I
    double density = 0.0;         // rho
    double area = 0.0;            // A
};

/// Simply supported (pinned-end) beam w_tt + c^2 w_xxxx = 0 on [0, T] x [0, L] with
/// modal initial data w(0, x) = sum_m alpha_m sin(m pi x / L) and
/// w_t(0, x) = sum_m beta_m sin(m pi x / L).
struct BeamProblem {
    double length = 10.0;
    double horizon = 1.0;
    double wave_speed = 1.0;
    std::vector<double> ic_disp{1.0};
    std::vector<double> ic_vel;
    std::optional<Material> material;

    /// Throws std::invalid_argument if the problem is ill-posed or the
    /// material parameters disagree with c^2 = EI / (rho A).
    void validate() const;

    double initial_displacement(double x) const noexcept;
    double initial_velocity(double x) const noexcept;

    /// alpha_1 = 1, everything else zero.
    static BeamProblem single_mode();
    /// alpha_1 = 1, alpha_3 = 0.3.
    static BeamProblem two_mode();
};

/// Modal superposition sum_m [alpha_m cos(w_m t) + (beta_m / w_m) sin(w_m t)] sin(k_m x).
double exact_solution(const BeamProblem& problem, double t, double x);

std::string problem_to_json(const BeamProblem& problem);
BeamProblem problem_from_json(const std::string& text);
BeamProblem load_problem(const std::filesystem::path& path);

}  // namespace beampinn
