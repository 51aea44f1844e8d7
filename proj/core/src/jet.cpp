#include "beampinn/jet.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace beampinn {

namespace {

void require_order(int order) {
    if (!Jet::supported_order(order)) {
        throw std::invalid_argument("jet order " + std::to_string(order) + " is not one of {0, 1, 2, 4}");
    }
}

void require_same_order(const Jet& a, const Jet& b) {
    if (a.order() != b.order()) {
        throw std::invalid_argument("jet order mismatch: " + std::to_string(a.order()) + " vs " +
                                    std::to_string(b.order()));
    }
}

constexpr double kFactorial[] = {1.0, 1.0, 2.0, 6.0, 24.0};

}  // namespace

bool Jet::supported_order(int order) noexcept {
    return order == 0 || order == 1 || order == 2 || order == 4;
}

Jet Jet::constant(double value, int order) {
    require_order(order);
    Jet j;
    j.order_ = order;
    j.c_[0] = value;
    return j;
}

Jet Jet::seed(double value, int order) {
    require_order(order);
    if (order == 0) {
        throw std::invalid_argument("cannot seed an order-0 jet");
    }
    Jet j = constant(value, order);
    j.c_[1] = 1.0;
    return j;
}

Jet Jet::from_coeffs(std::span<const double> coeffs) {
    if (coeffs.empty()) {
        throw std::invalid_argument("empty coefficient list");
    }
    const int order = static_cast<int>(coeffs.size()) - 1;
    Jet j = constant(0.0, order);
    for (int k = 0; k <= order; ++k) {
        j.c_[k] = coeffs[k];
    }
    return j;
}

double Jet::derivative(int k) const {
    if (k < 0 || k > order_) {
        throw std::out_of_range("derivative index " + std::to_string(k) + " exceeds jet order " +
                                std::to_string(order_));
    }
    return kFactorial[k] * c_[k];
}

bool Jet::all_finite() const noexcept {
    for (int k = 0; k <= order_; ++k) {
        if (!std::isfinite(c_[k])) return false;
    }
    return true;
}

Jet& Jet::operator+=(const Jet& rhs) {
    require_same_order(*this, rhs);
    for (int k = 0; k <= order_; ++k) c_[k] += rhs.c_[k];
    return *this;
}

Jet& Jet::operator-=(const Jet& rhs) {
    require_same_order(*this, rhs);
    for (int k = 0; k <= order_; ++k) c_[k] -= rhs.c_[k];
    return *this;
}

Jet& Jet::operator*=(double s) noexcept {
    for (int k = 0; k <= order_; ++k) c_[k] *= s;
    return *this;
}

Jet operator+(const Jet& a, const Jet& b) {
    Jet r = a;
    r += b;
    return r;
}

Jet operator-(const Jet& a, const Jet& b) {
    Jet r = a;
    r -= b;
    return r;
}

Jet operator-(const Jet& a) {
    Jet r = a;
    r *= -1.0;
    return r;
}

Jet operator*(const Jet& a, const Jet& b) {
    require_same_order(a, b);
    Jet r = Jet::constant(0.0, a.order());
    for (int k = 0; k <= a.order(); ++k) {
        double acc = 0.0;
        for (int i = 0; i <= k; ++i) acc += a[i] * b[k - i];
        r[k] = acc;
    }
    return r;
}

Jet operator*(const Jet& a, double s) {
    Jet r = a;
    r *= s;
    return r;
}

Jet operator*(double s, const Jet& a) { return a * s; }

TanhSeries tanh_series(const Jet& a) {
    const int n = a.order();
    TanhSeries out{Jet::constant(0.0, n), Jet::constant(0.0, n)};
    Jet& u = out.value;
    Jet& v = out.slope;
    u[0] = std::tanh(a[0]);
    v[0] = 1.0 - u[0] * u[0];
    for (int k = 1; k <= n; ++k) {
        // k u_k = sum_j j a_j v_{k-j}
        double acc = 0.0;
        for (int j = 1; j <= k; ++j) acc += j * a[j] * v[k - j];
        u[k] = acc / k;
        // v = 1 - u^2
        double sq = 0.0;
        for (int j = 0; j <= k; ++j) sq += u[j] * u[k - j];
        v[k] = -sq;
    }
    return out;
}

SinCosSeries sin_cos_series(const Jet& a) {
    const int n = a.order();
    SinCosSeries out{Jet::constant(0.0, n), Jet::constant(0.0, n)};
    Jet& s = out.sin;
    Jet& c = out.cos;
    s[0] = std::sin(a[0]);
    c[0] = std::cos(a[0]);
    for (int k = 1; k <= n; ++k) {
        double ds = 0.0;
        double dc = 0.0;
        for (int j = 1; j <= k; ++j) {
            ds += j * a[j] * c[k - j];
            dc -= j * a[j] * s[k - j];
        }
        s[k] = ds / k;
        c[k] = dc / k;
    }
    return out;
}

Jet tanh(const Jet& a) { return tanh_series(a).value; }
Jet sin(const Jet& a) { return sin_cos_series(a).sin; }
Jet cos(const Jet& a) { return sin_cos_series(a).cos; }

namespace {

// Reduces u to r in [0, 1] with sin(pi u) = sign * sin(pi r). Every step is exact.
double reduce_half_period(double u, double& sign) noexcept {
    sign = 1.0;
    if (u < 0.0) {
        u = -u;
        sign = -1.0;
    }
    double r = std::fmod(u, 2.0);
    if (r > 1.0) {
        r -= 1.0;
        sign = -sign;
    }
    return r;
}

}  // namespace

double sin_pi(double u) noexcept {
    double sign = 1.0;
    const double r = reduce_half_period(u, sign);
    constexpr double pi = std::numbers::pi;
    double v = 0.0;
    if (r <= 0.25) {
        v = std::sin(pi * r);
    } else if (r <= 0.75) {
        v = std::cos(pi * (0.5 - r));
    } else {
        v = std::sin(pi * (1.0 - r));
    }
    return sign * v;
}

double cos_pi(double u) noexcept {
    double r = std::fmod(std::fabs(u), 2.0);
    if (r > 1.0) r = 2.0 - r;
    constexpr double pi = std::numbers::pi;
    if (r <= 0.25) return std::cos(pi * r);
    if (r <= 0.75) return std::sin(pi * (0.5 - r));
    return -std::cos(pi * (1.0 - r));
}

}  // namespace beampinn
