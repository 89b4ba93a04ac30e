#pragma once

// Fixed-node quadrature rules and radial integration helpers shared by the
// Green-function norms, the flux estimator and the variational discretization.

#include <functional>
#include <vector>

namespace ptint::quad {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule on [0, 1].
const Rule& gauss_legendre_unit(int n);

/// Gauss-Laguerre rule for int_0^inf g(t) e^{-t} dt.
const Rule& gauss_laguerre(int n);

/// Breakpoints lo = b_0 < b_1 < ... < b_m = hi with b_{j+1}/b_j <= ratio.
std::vector<double> geometric_breaks(double lo, double hi, double ratio);

/// int_0^rho fn(r) dr for an integrand with an integrable singularity at 0,
/// assuming r fn(r) behaves like r^c times a polylog as r -> 0 (c > 0). Uses
/// r = rho e^{-s} and Gauss-Laguerre in the rescaled variable.
double singular_cell(const std::function<double(double)>& fn, double rho, double c, int n = 32);

/// Nodes r_j and weights W_j with sum_j W_j g(r_j) ~ int_0^rho g(r) dr for
/// r g(r) ~ r^c polylog(r) near 0.
Rule singular_cell_rule(double rho, double c, int n = 32);

/// Composite Gauss-Legendre over the given breakpoints.
double composite(const std::function<double(double)>& fn, const std::vector<double>& breaks, int n = 8);

}  // namespace ptint::quad
