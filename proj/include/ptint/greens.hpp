#pragma once

// The Green function G_lambda = (-Delta + lambda)^{-1} delta in d = 2, 3 and
// the quantities built from it.

#include <iosfwd>
#include <vector>

namespace ptint {

/// G_lambda(r). d = 3: e^{-sqrt(lambda) r} / (4 pi r); d = 2: K0(sqrt(lambda) r) / (2 pi).
double green(int d, double lambda, double r);

/// dG_lambda/dr, strictly negative.
double green_deriv(int d, double lambda, double r);

/// d^2 G_lambda / dr^2 (from the radial equation G'' = lambda G - (d-1) G'/r).
double green_deriv2(int d, double lambda, double r);

/// Local profile of G_lambda at the origin, including the constant that
/// pairs with beta_alpha(lambda):
///   d = 2: -(ln(sqrt(lambda) r / 2) + gamma) / (2 pi)
///   d = 3: 1/(4 pi r) - sqrt(lambda)/(4 pi)
/// green - singular_part is O(r^2 |ln r|) (d = 2) and O(r) (d = 3).
double singular_part(int d, double lambda, double r);

/// ||G_lambda||_{L^s(R^d)}. Requires s >= 1, and s < 3 when d = 3.
double green_norm(int d, double lambda, double exponent);

/// lambda * int_{B_r} G_lambda dx, by graded quadrature.
double green_enclosed_mass(int d, double lambda, double r);

/// -|S^{d-1}| r^{d-1} G'(r) - lambda int_{B_r} G dx; tends to 1 as r -> 0.
double flux_normalization(int d, double lambda, double r);

/// Samples of G_lambda on a geometric grid (ratio ~1.05) from 1e-10/sqrt(lambda)
/// to 40/sqrt(lambda).
struct GreenSamples {
    int d = 2;
    double lambda = 1.0;
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<double> derivs;

    static GreenSamples make(int d, double lambda, double ratio = 1.05);

    /// Positivity, strict decrease, negative derivative, and the e^{-sqrt(lambda) r}
    /// tail ratio test beyond r = 10/sqrt(lambda).
    bool invariants_hold() const;

    /// Two columns "r,value" with 17 significant digits.
    void write_csv(std::ostream& out) const;
};

}  // namespace ptint
