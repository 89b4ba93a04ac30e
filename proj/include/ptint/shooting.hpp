#pragma once
// Decaying solutions by shooting: classify trajectories by their zero count,
// bisect every change of class, and splice the linear decaying tail onto the
// certified separator.

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ptint/model.hpp"
#include "ptint/radial_ode.hpp"

namespace ptint {

enum class AlphaKind { Finite, Free, Unconstrained };
const char* to_string(AlphaKind k);

struct PointResiduals {
    double ode = std::numeric_limits<double>::quiet_NaN();
    double relation = std::numeric_limits<double>::quiet_NaN();
    /// Relative mismatch of u~' against c G' at the splice radius.
    double decay_margin = std::numeric_limits<double>::quiet_NaN();
    /// |D-norm^2 - sigma ||u||_{p+1}^{p+1}| / D-norm^2
    double nehari = std::numeric_limits<double>::quiet_NaN();
};

struct BranchPoint {
    double q = 0.0;
    double a = 0.0;
    std::optional<double> f0;  ///< empty in the weak regime
    int zero_count = 0;
    AlphaKind alpha_kind = AlphaKind::Free;
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double action = std::numeric_limits<double>::quiet_NaN();
    double d_norm2 = std::numeric_limits<double>::quiet_NaN();
    double lp_norm = std::numeric_limits<double>::quiet_NaN();  ///< int |u|^{p+1}
    PointResiduals residuals;
    RadialProfile profile;
    Outcome outcome;
    /// Shooting-parameter bracket left by the bisection (a, or ln|q| at fixed alpha).
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    bool certified = false;
    std::string note;
};

struct ShootControls {
    /// a-bracket; NaN selects [-B, B] with B = 10 (1 + |q| G(r0)).
    double a_lo = std::numeric_limits<double>::quiet_NaN();
    double a_hi = std::numeric_limits<double>::quiet_NaN();
    int scan_points = 121;
    /// Scan points are uniform in asinh(a / scan_scale), dense near a = 0.
    double scan_scale = 1.0;
    int max_widen = 3;
    /// Bisection stops when the bracket is this wide relative to the
    /// parameter, or when the midpoint no longer separates the ends.
    double bisect_rel_tol = 1e-15;
    int max_bisect = 200;
    int max_branch = 3;
    int max_depth = 40;
    /// q-scan at fixed alpha: |q| in [q_lo, q_hi], q_per_decade samples per decade.
    double q_lo = 1e-3;
    double q_hi = 1e3;
    int q_per_decade = 10;
    /// Splice where the two bracketing trajectories still agree to this level.
    double agree_tol = 1e-6;
    double decay_margin_tol = 1e-3;
    IntegrateControls integ;
};

/// Rejected input (e.g. lambda <= lambda_alpha for a positive solution).
class ShootingRejected : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Every certified decaying separator at fixed charge, sorted by zero count
/// (ties by a).
std::vector<BranchPoint> match_decay(const Params& params, double q, const ShootControls& ctrl = {});

struct FixedAlphaResult {
    bool found = false;
    BranchPoint point;
    /// Every zero_count = k separator met in the scan, by increasing q.
    std::vector<BranchPoint> separators;
    double q_scan_lo = 0.0;
    double q_scan_hi = 0.0;
    std::string message;
};

/// The zero_count = k solution with q > 0 at the configured alpha; the first
/// one in increasing q when several exist. Shoots in q with a = beta_alpha(lambda) q.
/// Throws ShootingRejected for k = 0 when lambda <= lambda_alpha, and for weak
/// regime or free alpha input.
FixedAlphaResult solve_fixed_alpha(const Params& params, int k, const ShootControls& ctrl = {});

struct BranchRow {
    double q = 0.0;
    bool ok = false;
    BranchPoint point;
    int candidates = 0;  ///< number of zero_count = k separators at this q
    std::string error;
};

/// For every q, the zero_count = k separator with the largest |a| (the family
/// that reaches the regular solution as q -> 0).
std::vector<BranchRow> branch_scan(const Params& params, const std::vector<double>& q_values, int k,
                                   const ShootControls& ctrl = {});

/// q_lo, ..., q_hi geometric with n points (sign of q_lo kept).
std::vector<double> geometric_q_grid(double q_lo, double q_hi, int n);

/// k = 0 solution with positivity, strict decrease and q != 0 certified.
/// Throws ShootingRejected when lambda <= lambda_alpha or sigma != +1, and
/// std::runtime_error when the branch is not found or fails certification.
BranchPoint ground_state_shoot(const Params& params, const ShootControls& ctrl = {});

/// Fills f0, alpha, zero count, norms, action and residuals from the profile.
void finalize_point(BranchPoint& pt, const Params& params);

/// Integrals over the profile (with the local expansion on (0, r0)):
/// int (|f'|^2 + lambda f^2) dmu + beta q^2, and int |u|^{p+1} dmu.
double profile_d_norm2(const RadialProfile& profile, double beta_value);
double profile_power_integral(const RadialProfile& profile);

/// Negated point: q, a, f0 and the profile change sign, alpha is unchanged.
BranchPoint negate(const BranchPoint& pt);

}  // namespace ptint
