#pragma once

#include <array>
#include <span>

namespace beampinn {

/// Truncated univariate Taylor expansion.
///
/// Coefficients are stored in Taylor normalization, coeff[k] = f^(k)(x0) / k!,
/// so multiplication is a plain truncated Cauchy product. Supported orders are
/// 0, 1, 2 and 4: the beam residual needs second derivatives in time and
/// fourth derivatives in space, nothing else.
class Jet {
public:
    static constexpr int kMaxOrder = 4;

    Jet() = default;

    /// c(t) = v. Throws std::invalid_argument for unsupported orders.
    static Jet constant(double value, int order);
    /// c(t) = v + t, the expansion of the independent variable.
    static Jet seed(double value, int order);
    /// Builds a jet from raw Taylor coefficients (size must be a supported order + 1).
    static Jet from_coeffs(std::span<const double> coeffs);

    static bool supported_order(int order) noexcept;

    int order() const noexcept { return order_; }
    double operator[](int k) const noexcept { return c_[k]; }
    double& operator[](int k) noexcept { return c_[k]; }
    std::span<const double> coeffs() const noexcept { return {c_.data(), static_cast<std::size_t>(order_ + 1)}; }

    double value() const noexcept { return c_[0]; }
    /// k-th derivative, k! * coeff[k].
    double derivative(int k) const;

    bool all_finite() const noexcept;

    Jet& operator+=(const Jet& rhs);
    Jet& operator-=(const Jet& rhs);
    Jet& operator*=(double s) noexcept;

    friend bool operator==(const Jet&, const Jet&) = default;

private:
    std::array<double, kMaxOrder + 1> c_{};
    int order_ = 0;
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator-(const Jet& a);
/// Truncated Cauchy product.
Jet operator*(const Jet& a, const Jet& b);
Jet operator*(const Jet& a, double s);
Jet operator*(double s, const Jet& a);

Jet tanh(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);

/// tanh(a) together with the series of its derivative 1 - tanh(a)^2.
struct TanhSeries {
    Jet value;
    Jet slope;
};
TanhSeries tanh_series(const Jet& a);

/// sin(a) and cos(a) from the coupled recurrence s' = c a', c' = -s a'.
struct SinCosSeries {
    Jet sin;
    Jet cos;
};
SinCosSeries sin_cos_series(const Jet& a);

/// sin(pi * u) with exact zeros at integer u.
double sin_pi(double u) noexcept;
/// cos(pi * u) with exact zeros at half-integer u.
double cos_pi(double u) noexcept;

}  // namespace beampinn
