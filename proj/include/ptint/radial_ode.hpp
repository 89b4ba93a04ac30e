#pragma once
// Radial reduction u(x) = u~(|x|):
//   u~'' = -(d-1)/r u~' + lambda u~ - sigma |u~|^{p-1} u~,
// integrated through the regular part f = u~ - q G_lambda so the charge never
// passes through the stepper.

#include <stdexcept>
#include <string>
#include <vector>

#include "ptint/model.hpp"

namespace ptint {

struct RadialGrid {
    std::vector<double> radii;

    /// Geometric from r0 with the given ratio until the spacing reaches h_tail,
    /// then uniform up to (and including) r_max.
    static RadialGrid graded(double r0, double r_max, double ratio, double h_tail);
    /// Positive, strictly increasing, first radius >= 1e-12.
    bool valid() const;
    std::size_t size() const { return radii.size(); }
};

struct RadialProfile {
    Params params;
    double q = 0.0;
    double a = 0.0;
    RadialGrid grid;
    std::vector<double> u;
    std::vector<double> du;
    std::vector<double> f;       ///< u - q G
    double splice_radius = 0.0;  ///< > 0 when the tail beyond it is c G(r)

    std::size_t size() const { return grid.size(); }
};

enum class OutcomeKind { Decay, BlowUpPlus, BlowUpMinus, Undetermined };
const char* to_string(OutcomeKind k);

struct Outcome {
    OutcomeKind kind = OutcomeKind::Undetermined;
    int zeros = 0;
    /// Escape radius for BlowUp kinds, final radius otherwise.
    double radius = 0.0;
    std::vector<double> zero_radii;
    /// u~(r0) has the opposite sign of q: one more zero hides in (0, r0).
    bool origin_sign_change = false;
    std::string note;
};

enum class SingularKind { None, Power, Log };
const char* to_string(SingularKind k);

/// f(r) ~ a + A s(r) near the origin.
struct LocalExpansion {
    double q = 0.0;
    double a = 0.0;
    double A = 0.0;
    SingularKind kind = SingularKind::None;
    double exponent = 0.0;  ///< 2 - p for Power

    double s(double r) const;
    double ds(double r) const;
    double value(double r) const { return a + A * s(r); }
    double deriv(double r) const { return A * ds(r); }
};

struct IntegrateControls {
    double abs_tol = 1e-10;
    double rel_tol = 1e-9;
    double r0 = 0.0;            ///< 0 selects 1e-6 / sqrt(lambda)
    double r_max = 0.0;         ///< 0 selects 40 / sqrt(lambda)
    double grid_ratio = 1.004;  ///< output grid, geometric part
    double tail_step = 0.005;   ///< output grid spacing in units of 1/sqrt(lambda)
    /// Step cap in units of 1/sqrt(lambda). It also bounds the dense-output
    /// interpolation error seen by the sampled profile.
    double max_step = 0.02;
    double blow_factor = 1e6;
    double tol_decay = 1e-8;
    double decay_band = 0.2;
    int max_zeros = 64;
    /// Stop as soon as the Lyapunov function is negative: the sign of u~ is
    /// then frozen and decay is impossible.
    bool stop_on_negative_energy = true;
    bool record = true;
};

struct Integration {
    RadialProfile profile;
    Outcome outcome;
};

/// Step-size collapse or a non-finite state.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double radius);
    double radius() const { return radius_; }

private:
    double radius_;
};

/// Value of u~''. In linear mode (params.nonlinear == false) the power term is dropped.
double ode_rhs(const Params& params, double r, double u, double du);

/// Requires a strong or weak regime (throws std::invalid_argument otherwise).
LocalExpansion local_expansion(const Params& params, double q, double a);

struct RegularTerm {
    double value = 0.0;
    double deriv = 0.0;
};

/// Strong regime: leading behaviour of f(r) - f(0) for u ~ a + q G near the
/// origin, w = int_0^r t^{d-1} g(t) K(t, r) dt with g = lambda a - sigma |u|^{p-1} u,
/// K = ln(r/t) (d = 2) or 1/t - 1/r (d = 3). In d = 3 it contains the A s(r) term.
/// Throws std::invalid_argument in the weak regime, where the integral diverges.
RegularTerm regular_term(const Params& params, double q, double a, double r);

/// f and f' at r0: a + w, w' in the strong regime, the local expansion otherwise.
RegularTerm start_data(const Params& params, double q, double a, double r0);

double resolved_r0(const Params& params, const IntegrateControls& ctrl);
double resolved_r_max(const Params& params, const IntegrateControls& ctrl);

Integration integrate(const Params& params, double q, double a, const IntegrateControls& ctrl = {});

/// u'^2/2 + sigma |u|^{p+1}/(p+1) - lambda u^2/2, or with |u|^p/p when
/// paper_exponent is set. Linear mode drops the power term.
double lyapunov_energy(const Params& params, double u, double du, bool paper_exponent = false);

struct LyapunovReport {
    std::vector<double> energy;
    bool nonincreasing = true;
    bool gradient_bound = true;
    double max_increase = 0.0;  ///< largest E_{i+1} - E_i seen on r >= r_cut
};

LyapunovReport lyapunov_monitor(const RadialProfile& profile, double r_cut = 0.0, bool paper_exponent = false,
                                 double tol = 1e-7);

class DegenerateZero : public std::runtime_error {
public:
    DegenerateZero(double radius, double slope);
    double radius() const { return radius_; }

private:
    double radius_;
};

/// Radii of the strict sign changes of u~, each refined by bisection on the
/// cubic Hermite interpolant. Throws DegenerateZero when |u~'| vanishes there.
std::vector<double> find_zeros(const RadialProfile& profile);
int count_zeros(const RadialProfile& profile);

/// Largest relative residual of the radial ODE at interior nodes against a
/// three-node Hermite finite difference (u and u' at each node). Nodes next to a splice point and nodes where
/// u~ is at round-off level are skipped.
double ode_residual(const RadialProfile& profile);

}  // namespace ptint
