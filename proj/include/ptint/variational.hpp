#pragma once
// Discretized action on decomposed states u = f + q G:
//   S(f, q) = 1/2 int (|f'|^2 + lambda f^2) dmu + beta q^2 / 2 - 1/(p+1) int |f + q G|^{p+1} dmu
// with f continuous piecewise linear on a radial grid that starts at r = 0
// and f(R) = 0. The quadratic part uses midpoint-weighted first differences
// and a lumped mass, so the gradient is exact and the Nehari pairing holds to
// round-off.

#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ptint/model.hpp"
#include "ptint/radial_ode.hpp"

namespace ptint {

struct VarGridOptions {
    /// all lengths in units of 1/sqrt(lambda)
    double r1 = 1e-3;     ///< first node after the origin
    double ratio = 1.05;  ///< geometric growth until the spacing reaches h
    double h = 0.01;
    double R = 40.0;
    int gauss_points = 3;
    int singular_points = 32;
};

struct VarGrid {
    int d = 2;
    double lambda = 1.0;
    double p = 3.0;
    std::vector<double> r;  ///< nodes, r[0] = 0, r.back() = R
    std::vector<double> c;  ///< per cell: |S| r_mid^{d-1} / h
    std::vector<double> w;  ///< per node: |S| (r_{i+1/2}^d - r_{i-1/2}^d) / d
    // nonlinear quadrature points (cell index, hat values, G, log of the weight incl. |S| r^{d-1}).
    // Logs because the innermost nodes pair an overflowing |u|^{p+1} with an underflowing weight.
    std::vector<std::uint32_t> qcell;
    std::vector<double> qphi0, qphi1, qgreen, qlogw;

    std::size_t nodes() const { return r.size(); }
    std::size_t cells() const { return c.size(); }

    /// p only selects the singular-cell exponent of the quadrature (d = 3).
    static std::shared_ptr<const VarGrid> make(int d, double lambda, double p, const VarGridOptions& opts = {});
};

struct DiscreteState {
    std::shared_ptr<const VarGrid> grid;
    std::vector<double> f;  ///< nodes 0..N, f[N] = 0
    double q = 0.0;

    static DiscreteState zero(std::shared_ptr<const VarGrid> grid);
    /// u = f + q G at the nodes r > 0 (entry 0 is NaN when q != 0).
    std::vector<double> u_nodes() const;
};

DiscreteState operator*(double s, const DiscreteState& x);
DiscreteState operator+(const DiscreteState& x, const DiscreteState& y);
DiscreteState operator-(const DiscreteState& x);

struct FunctionalParts {
    double quad_f = 0.0;  ///< int |f'|^2 + lambda f^2
    double charge = 0.0;  ///< beta q^2
    double power = 0.0;   ///< int |u|^{p+1}
    double d_norm2() const { return quad_f + charge; }
};

struct FunctionalReport {
    double action = 0.0;
    double d_norm = 0.0;
    double lp_norm = 0.0;  ///< (int |u|^{p+1})^{1/(p+1)}
    double grad_norm = 0.0;
    double nehari_residual = 0.0;  ///< |D^2 - sigma L| / D^2
};

/// Rejects the weak regime and a free alpha. The power term is dropped when
/// params.nonlinear is false.
FunctionalParts functional_parts(const Params& params, const DiscreteState& x);
double action(const Params& params, const DiscreteState& x);
/// Gradient with respect to (f_0..f_{N-1}, q); the pinned f_N entry is zero.
DiscreteState action_gradient(const Params& params, const DiscreteState& x);
/// sum_i g_i x_i + g_q x_q
double pairing(const DiscreteState& g, const DiscreteState& x);
/// <x, y>_D = int f_x' f_y' + lambda f_x f_y + beta q_x q_y
double d_inner(const Params& params, const DiscreteState& x, const DiscreteState& y);
/// Riesz representative of a cotangent in the D inner product (needs beta > 0).
DiscreteState riesz(const Params& params, const DiscreteState& cotangent);

/// t* = (D^2 / int |u|^{p+1})^{1/(p-1)}. Throws std::domain_error when the
/// state is zero, D^2 <= 0, or sigma != +1.
double nehari_factor(const Params& params, const DiscreteState& x);
DiscreteState nehari_project(const Params& params, const DiscreteState& x);

FunctionalReport functional_report(const Params& params, const DiscreteState& x);

struct MinimizeOptions {
    double gtol = 1e-9;  ///< on ||grad||_D / ||u||_D
    int max_iter = 3000;
    double armijo = 1e-4;
    double initial_step = 1.0;
};

struct TraceEntry {
    double action;
    double grad_norm;
};

struct MinimizeResult {
    DiscreteState state;
    FunctionalReport report;
    std::vector<TraceEntry> trace;
    bool converged = false;
    int iterations = 0;
    std::string message;
};

class VariationalRejected : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Gradient descent on the Nehari manifold in the D metric (Barzilai-Borwein
/// steps, backtracking). Rejects lambda <= lambda_alpha and sigma != +1.
MinimizeResult minimize_ground_state(const Params& params, const DiscreteState& init,
                                     const MinimizeOptions& opts = {});

/// Smooth bump in f plus a charge, for seeding the minimizer.
DiscreteState bump_seed(const Params& params, std::shared_ptr<const VarGrid> grid, double amplitude = 1.0,
                        double q = 1.0);

/// Samples f = u - q G of the profile at the grid nodes (constant below r0,
/// zero beyond the profile), q from the profile.
DiscreteState state_from_profile(const RadialProfile& profile, std::shared_ptr<const VarGrid> grid);

/// Seeded random directions: random Gaussian bumps in f and a random charge.
std::vector<DiscreteState> random_directions(std::shared_ptr<const VarGrid> grid, int n, std::uint64_t seed);

/// Scales to ||x||_D = 1; throws std::domain_error when D^2 <= 0.
DiscreteState normalize_direction(const Params& params, const DiscreteState& x);

struct DirectionProbe {
    bool normalizable = true;
    double d_norm2 = 0.0;  ///< before normalization
    std::vector<double> values;  ///< S(rho g) for each probe radius
    double r_star = std::numeric_limits<double>::quiet_NaN();  ///< smallest R found with S(R g) < 0
    double ray_max = std::numeric_limits<double>::quiet_NaN();  ///< max_{t in [0, R*]} S(t g)
};

struct GeometryReport {
    std::vector<double> radii;
    std::vector<double> min_values;  ///< min over normalizable directions, per radius
    double rho_star = 0.0;  ///< largest probe radius with min S > 0 on it and on every smaller one
    bool small_sphere_positive = false;
    bool all_rays_negative = false;
    double mountain_pass_level = std::numeric_limits<double>::quiet_NaN();
    int best_direction = -1;
    int non_normalizable = 0;
    std::vector<DirectionProbe> directions;
};

/// Directions are normalized here; those with D^2 <= 0 are reported as not
/// normalizable and make the small-sphere check fail.
GeometryReport mountain_pass_probe(const Params& params, const std::vector<DiscreteState>& directions,
                                   const std::vector<double>& radii);

}  // namespace ptint
