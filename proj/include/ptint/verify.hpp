#pragma once
// Post-processing of computed profiles: the charge two ways, the
// alpha relation, the weak-regime profile of f, and a combined report.

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ptint/model.hpp"
#include "ptint/radial_ode.hpp"
#include "ptint/shooting.hpp"

namespace ptint {

struct ChargeFit {
    double q = 0.0;
    double a = 0.0;
    double q_stderr = 0.0;
    double a_stderr = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    double condition = 0.0;
    bool ill_conditioned = false;
};

struct FitOptions {
    /// The window is [r_w, decade * r_w]; r_w is the smallest start (stepping
    /// by `decade`) whose normalized design has condition number <= max_condition.
    double decade = 10.0;
    double max_condition = 1e4;
    /// Start of the first window; 0 selects the first profile radius.
    double r_start = 0.0;
    /// Subtracted from u before fitting (e.g. the A s(r) term of the local expansion).
    std::function<double(double)> correction;
};

/// Least squares u(r) ~ q G(r) + a on the innermost acceptable decade.
ChargeFit fit_charge(const RadialProfile& profile, double lambda, int d, const FitOptions& opts = {});

/// fit_charge with regular_term(q, a, r) subtracted and refitted `passes` times (strong
/// regime); weak regime and q = 0 fall back to the A s(r) term.
ChargeFit fit_charge_corrected(const RadialProfile& profile, const Params& params, int passes = 3);

struct FluxCharge {
    double q = 0.0;
    double stderr_ = 0.0;
    std::vector<double> radii;
    std::vector<double> values;
    bool converged = true;
};

/// q(r) = -|S| r^{d-1} u'(r) - int_{B_r} (sigma |u|^{p-1} u - lambda u) dx at
/// several small radii, Richardson-extrapolated to r -> 0.
FluxCharge charge_from_flux(const RadialProfile& profile, const Params& params, double r_first = 0.0);

struct WeakFit {
    bool log_flag = false;
    double exponent = std::numeric_limits<double>::quiet_NaN();  ///< free-exponent fit (power case)
    double coefficient = 0.0;  ///< A with the exponent fixed to 2 - p (or the log)
    double constant = 0.0;
    double predicted_coefficient = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
};

/// Fits f = u - q G against A r^{2-p} + a (p > 2) or A ln r + a (p = 2) on the
/// innermost decade. Rejects strong-regime input.
WeakFit weak_singularity_fit(const RadialProfile& profile, const Params& params, double q, double r_start = 0.0);

/// Same fit on explicit samples of f.
WeakFit weak_fit_samples(const std::vector<double>& r, const std::vector<double>& f, double p);

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double tolerance = 0.0;
};

struct VerificationReport {
    std::string label;
    Regime regime = Regime::Strong;
    ChargeFit fit;
    FluxCharge flux;
    double q_agreement = 0.0;  ///< |q_fit - q_flux| / max(1, |q_fit|)
    std::optional<double> f0;
    AlphaKind alpha_kind = AlphaKind::Free;
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double relation_residual = std::numeric_limits<double>::quiet_NaN();
    std::optional<WeakFit> weak;
    double decay_rate = 0.0;     ///< -d ln|u| / dr on the outer half of the grid
    double bound_const = 0.0;    ///< max |u| / (G + 1)
    std::vector<CheckResult> checks;
    bool pass = false;

    /// "PASS label: check=value ..." or "FAIL ..."
    std::string summary_line() const;
};

struct VerifyTolerances {
    double q_agreement = 1e-3;
    double relation = 1e-6;     ///< relative to max(1, |f0|)
    double weak_exponent = 0.05;
    double weak_coefficient = 0.05;  ///< relative
    double decay_fraction = 0.9;     ///< rate >= fraction * sqrt(lambda)
};

VerificationReport equivalence_report(const BranchPoint& point, const Params& params, const std::string& label = "",
                                      const VerifyTolerances& tol = {});

}  // namespace ptint
