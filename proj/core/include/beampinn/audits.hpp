#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "beampinn/jet.hpp"

namespace beampinn {

struct AuditResult {
    std::string name;
    bool passed = false;
    /// Worst observed value of the audited quantity.
    double metric = 0.0;
    double threshold = 0.0;
    std::string detail;
    double seconds = 0.0;
};

/// Replacement for the jet tanh used by the jet audit (negative controls).
using JetUnary = std::function<Jet(const Jet&)>;

struct JetAuditOptions {
    int trees = 1000;
    int max_depth = 4;
    std::uint64_t seed = 20240601;
    double tolerance = 1e-5;
    JetUnary tanh_impl;
};

/// Random expression trees over {+, -, *, scale, tanh, sin, cos}. Every
/// derivative of order-1, order-2 and order-4 jets is compared with
/// Richardson-extrapolated central differences evaluated in long double.
/// Error is |jet - fd| / max(|jet|, |fd|, 1).
AuditResult jet_audit(const JetAuditOptions& options = {});

/// Tape gradient of the total loss against central differences on a model
/// whose network path is switched on (Xavier gain 1, lambda 0.5).
AuditResult gradient_audit(double eps = 1e-6, std::uint64_t seed = 7, double tolerance = 1e-4);

/// Batched and taped loss routes agree on values and gradients.
AuditResult route_audit(std::uint64_t seed = 11, double tolerance = 1e-10);

/// A pure Fourier model holding the exact single-mode solution has
/// |w_tt + c^2 w_xxxx| below the tolerance at random points.
AuditResult residual_audit(std::size_t points = 10000, std::uint64_t seed = 3, double tolerance = 1e-10);

/// Model output and its jet value are exactly zero at x = 0 and x = L for
/// random models, lengths and times.
AuditResult boundary_audit(std::size_t samples = 10000, std::uint64_t seed = 5);

/// One sample per stratum per axis for n in [1, max_n] and the given number of seeds.
AuditResult lhs_audit(std::size_t max_n = 64, int seeds = 100);

/// w(1) = (1 + N/130)/2 for N in 5..50, monotone in the loss, bounded by the
/// scale, and flat below the 1e-30 floor.
AuditResult adaptive_weight_audit(double tolerance = 1e-12);

/// Default architecture reports 27905 network + 20 Fourier parameters.
AuditResult param_count_audit();

/// batch_size_estimate(24e9, 27925) = 51029.
AuditResult batch_formula_audit();

struct AuditSuiteOptions {
    double eps = 1e-6;
    std::uint64_t seed = 42;
};

std::vector<AuditResult> run_all_audits(const AuditSuiteOptions& options = {});

}  // namespace beampinn
