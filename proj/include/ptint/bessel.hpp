#pragma once

// Modified Bessel functions of the second kind, orders 0 and 1, for real z > 0.
//
// z <= 2: ascending series (with I0/I1), relative accuracy ~1e-15.
// z >  2: Steed/Temme continued fraction for K_nu, nu = 0, relative accuracy ~1e-15.
// Both branches agree to better than 1e-13 at the switch point.

namespace ptint::bessel {

inline constexpr double kSeriesSwitch = 2.0;

double k0(double z);
double k1(double z);

/// e^z K0(z) and e^z K1(z); finite for all z > 0.
double k0_scaled(double z);
double k1_scaled(double z);

double i0(double z);
double i1(double z);

/// Branch-specific evaluators (exposed for continuity tests).
double k0_series(double z);
double k1_series(double z);
void k01_continued_fraction_scaled(double z, double& k0s, double& k1s);

}  // namespace ptint::bessel
