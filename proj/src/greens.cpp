#include "ptint/greens.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ptint/bessel.hpp"
#include "ptint/model.hpp"
#include "ptint/quadrature.hpp"

namespace ptint {

namespace {

void check_args(int d, double lambda, double r, const char* who)
{
    if (d != 2 && d != 3) throw std::invalid_argument(std::string(who) + ": d must be 2 or 3");
    if (!(lambda > 0.0)) throw std::invalid_argument(std::string(who) + ": lambda must be > 0");
    if (!(r > 0.0)) throw std::invalid_argument(std::string(who) + ": r must be > 0");
}

constexpr double kInnerScale = 1e-10;
constexpr double kGridRatio = 1.05;

// lambda-scaled radial integral of fn(r) |S^{d-1}| r^{d-1} over (0, r_hi).
// `c` is the power of r that r * fn(r) * r^{d-1} behaves like near 0.
template <class Fn>
double integral_from_zero(double lambda, double r_hi, double c, Fn weighted)
{
    const double r_min = kInnerScale / std::sqrt(lambda);
    if (r_hi <= r_min) return quad::singular_cell(weighted, r_hi, c);
    double sum = quad::singular_cell(weighted, r_min, c);
    sum += quad::composite(weighted, quad::geometric_breaks(r_min, r_hi, kGridRatio), 8);
    return sum;
}

template <class Fn>
double radial_integral(int d, double lambda, double r_hi, double c, Fn fn)
{
    const double area = sphere_area(d);
    return integral_from_zero(lambda, r_hi, c, [&](double r) { return fn(r) * area * std::pow(r, d - 1); });
}

}  // namespace

double green(int d, double lambda, double r)
{
    check_args(d, lambda, r, "green");
    const double k = std::sqrt(lambda);
    if (d == 3) return std::exp(-k * r) / (4.0 * kPi * r);
    return bessel::k0(k * r) / (2.0 * kPi);
}

double green_deriv(int d, double lambda, double r)
{
    check_args(d, lambda, r, "green_deriv");
    const double k = std::sqrt(lambda);
    if (d == 3) return -std::exp(-k * r) * (1.0 + k * r) / (4.0 * kPi * r * r);
    return -k * bessel::k1(k * r) / (2.0 * kPi);
}

double green_deriv2(int d, double lambda, double r)
{
    return lambda * green(d, lambda, r) - (d - 1) * green_deriv(d, lambda, r) / r;
}

double singular_part(int d, double lambda, double r)
{
    check_args(d, lambda, r, "singular_part");
    const double k = std::sqrt(lambda);
    if (d == 3) return 1.0 / (4.0 * kPi * r) - k / (4.0 * kPi);
    return -(std::log(0.5 * k * r) + kEulerGamma) / (2.0 * kPi);
}

double green_norm(int d, double lambda, double exponent)
{
    check_args(d, lambda, 1.0, "green_norm");
    if (!(exponent >= 1.0) || !std::isfinite(exponent))
        throw std::invalid_argument("green_norm: exponent must be a finite real >= 1");
    if (d == 3 && exponent >= 3.0)
        throw std::domain_error("green_norm: G_lambda is in L^s(R^3) only for s in [1, 3)");
    const double c = d == 3 ? 3.0 - exponent : 2.0;
    const double r_hi = 60.0 / std::sqrt(lambda);
    // G^s overflows near 0 for s > 2 in d = 3, so the weighted integrand is formed in logs
    const double log_area = std::log(sphere_area(d));
    const double integral = integral_from_zero(lambda, r_hi, c, [&](double r) {
        return std::exp(exponent * std::log(green(d, lambda, r)) + (d - 1) * std::log(r) + log_area);
    });
    return std::pow(integral, 1.0 / exponent);
}

double green_enclosed_mass(int d, double lambda, double r)
{
    check_args(d, lambda, r, "green_enclosed_mass");
    const double c = 2.0;
    return lambda * radial_integral(d, lambda, r, c, [&](double s) { return green(d, lambda, s); });
}

double flux_normalization(int d, double lambda, double r)
{
    check_args(d, lambda, r, "flux_normalization");
    const double flux = -sphere_area(d) * std::pow(r, d - 1) * green_deriv(d, lambda, r);
    return flux - green_enclosed_mass(d, lambda, r);
}

GreenSamples GreenSamples::make(int d, double lambda, double ratio)
{
    check_args(d, lambda, 1.0, "GreenSamples");
    GreenSamples s;
    s.d = d;
    s.lambda = lambda;
    const double k = std::sqrt(lambda);
    s.grid = quad::geometric_breaks(kInnerScale / k, 40.0 / k, ratio);
    s.values.reserve(s.grid.size());
    s.derivs.reserve(s.grid.size());
    for (double r : s.grid) {
        s.values.push_back(green(d, lambda, r));
        s.derivs.push_back(green_deriv(d, lambda, r));
    }
    return s;
}

bool GreenSamples::invariants_hold() const
{
    const double k = std::sqrt(lambda);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(values[i] > 0.0) || !(derivs[i] < 0.0)) return false;
        if (i > 0 && !(values[i] < values[i - 1])) return false;
        // Tail: G(r_i) e^{k r_i} must be nonincreasing, i.e. decay at least like e^{-k r}.
        if (i > 0 && grid[i - 1] >= 10.0 / k) {
            const double ratio = values[i] / values[i - 1];
            if (ratio > std::exp(-k * (grid[i] - grid[i - 1])) * (1.0 + 1e-12)) return false;
        }
    }
    return true;
}

void GreenSamples::write_csv(std::ostream& out) const
{
    out << "r,value\n";
    for (std::size_t i = 0; i < grid.size(); ++i) out << format_double(grid[i]) << ',' << format_double(values[i]) << '\n';
}

}  // namespace ptint
