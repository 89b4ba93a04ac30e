#include "ptint/bessel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ptint/model.hpp"

namespace ptint::bessel {

namespace {

constexpr int kMaxTerms = 200;
constexpr double kEps = std::numeric_limits<double>::epsilon();

}  // namespace

double i0(double z)
{
    const double t = 0.25 * z * z;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < kMaxTerms; ++k) {
        term *= t / (double(k) * double(k));
        sum += term;
        if (term < kEps * sum) break;
    }
    return sum;
}

double i1(double z)
{
    const double t = 0.25 * z * z;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < kMaxTerms; ++k) {
        term *= t / (double(k) * double(k + 1));
        sum += term;
        if (term < kEps * sum) break;
    }
    return 0.5 * z * sum;
}

double k0_series(double z)
{
    if (!(z > 0.0)) throw std::domain_error("bessel::k0: z must be > 0");
    const double t = 0.25 * z * z;
    const double lead = -(std::log(0.5 * z) + kEulerGamma);
    // K0 = lead * I0 + sum_{k>=1} H_k t^k / (k!)^2
    double term = 1.0;
    double harmonic = 0.0;
    double s_i0 = 1.0;
    double s_h = 0.0;
    for (int k = 1; k < kMaxTerms; ++k) {
        term *= t / (double(k) * double(k));
        harmonic += 1.0 / k;
        s_i0 += term;
        s_h += harmonic * term;
        if (term * (1.0 + harmonic) < kEps * (std::abs(lead) * s_i0 + s_h)) break;
    }
    return lead * s_i0 + s_h;
}

double k1_series(double z)
{
    if (!(z > 0.0)) throw std::domain_error("bessel::k1: z must be > 0");
    const double t = 0.25 * z * z;
    // K1 = 1/z + ln(z/2) I1 - (z/4) sum_k [psi(k+1) + psi(k+2)] t^k / (k! (k+1)!)
    // with psi(n+1) = H_n - gamma.
    double term = 1.0;
    double h_k = 0.0;
    double s_i1 = 1.0;
    double s_psi = (h_k - kEulerGamma) + (1.0 - kEulerGamma);
    for (int k = 1; k < kMaxTerms; ++k) {
        term *= t / (double(k) * double(k + 1));
        h_k += 1.0 / k;
        const double psi_sum = (h_k - kEulerGamma) + (h_k + 1.0 / (k + 1) - kEulerGamma);
        s_i1 += term;
        s_psi += psi_sum * term;
        if (term * std::abs(psi_sum) < kEps * std::abs(s_psi) && term < kEps * s_i1) break;
    }
    return 1.0 / z + std::log(0.5 * z) * 0.5 * z * s_i1 - 0.25 * z * s_psi;
}

void k01_continued_fraction_scaled(double z, double& k0s, double& k1s)
{
    if (!(z > 0.0)) throw std::domain_error("bessel: z must be > 0");
    // Steed's algorithm for the Temme continued fraction, order nu = 0.
    constexpr double a1 = 0.25;
    double b = 2.0 * (1.0 + z);
    double d = 1.0 / b;
    double h = d;
    double delh = d;
    double q1 = 0.0;
    double q2 = 1.0;
    double q = a1;
    double c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i < 100000; ++i) {
        a -= 2.0 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < kEps) break;
    }
    h *= a1;
    k0s = std::sqrt(kPi / (2.0 * z)) / s;
    k1s = k0s * (z + 0.5 - h) / z;
}

double k0(double z)
{
    if (z <= kSeriesSwitch) return k0_series(z);
    double k0s = 0.0, k1s = 0.0;
    k01_continued_fraction_scaled(z, k0s, k1s);
    return k0s * std::exp(-z);
}

double k1(double z)
{
    if (z <= kSeriesSwitch) return k1_series(z);
    double k0s = 0.0, k1s = 0.0;
    k01_continued_fraction_scaled(z, k0s, k1s);
    return k1s * std::exp(-z);
}

double k0_scaled(double z)
{
    if (z <= kSeriesSwitch) return k0_series(z) * std::exp(z);
    double k0s = 0.0, k1s = 0.0;
    k01_continued_fraction_scaled(z, k0s, k1s);
    return k0s;
}

double k1_scaled(double z)
{
    if (z <= kSeriesSwitch) return k1_series(z) * std::exp(z);
    double k0s = 0.0, k1s = 0.0;
    k01_continued_fraction_scaled(z, k0s, k1s);
    return k1s;
}

}  // namespace ptint::bessel
