#pragma once

// Problem parameters and the scalar spectral data of the point interaction
// -Delta_alpha in two and three dimensions.

#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptint {

/// Euler-Mascheroni constant to 20 digits.
inline constexpr long double kEulerGammaL = 0.57721566490153286061L;
inline constexpr double kEulerGamma = static_cast<double>(kEulerGammaL);
inline constexpr double kPi = std::numbers::pi;

/// Extension parameter of -Delta_alpha. `Free` is the free Laplacian (alpha = infinity).
class Alpha {
public:
    static Alpha free() { return Alpha{}; }
    static Alpha finite(double value) { return Alpha{value}; }

    bool is_free() const { return free_; }
    bool is_finite() const { return !free_; }

    /// Throws std::domain_error when the extension is free.
    double value() const
    {
        if (free_) throw std::domain_error("alpha is free (alpha = infinity); no finite value");
        return value_;
    }

    bool operator==(const Alpha&) const = default;

private:
    Alpha() = default;
    explicit Alpha(double v) : free_(false), value_(v) {}

    bool free_ = true;
    double value_ = 0.0;
};

struct Params {
    int d = 2;
    int sigma = 1;         ///< +1 source (focusing), -1 absorption.
    double p = 3.0;        ///< nonlinearity exponent, p > 1
    double lambda = 1.0;   ///< frequency, lambda > 0
    Alpha alpha = Alpha::finite(0.0);
    /// Diagnostic switch: drops sigma|u|^{p-1}u everywhere (linear Green-function mode).
    bool nonlinear = true;

    /// Throws std::invalid_argument on d not in {2,3}, sigma not +-1, p <= 1,
    /// lambda <= 0, or d = 3 with p >= 3.
    void validate() const;

    bool operator==(const Params&) const = default;
};

enum class Regime { Strong, Weak, OutOfRange };

const char* to_string(Regime r);

struct RegularityRange {
    double s_low = 0.0;
    double s_high = 0.0;
    bool low_open = false;
    bool high_open = false;

    bool is_point() const { return s_low == s_high; }
};

/// |S^{d-1}|: 2 pi for d = 2, 4 pi for d = 3.
double sphere_area(int d);

/// beta_alpha(lambda) for the configured dimension; rejects a free alpha.
double beta(const Params& params, double lambda);
/// Same with an explicit finite alpha value.
double beta(int d, double alpha, double lambda);

/// Bottom of the spectrum, -lambda_alpha = inf sigma(-Delta_alpha). Zero when no
/// eigenvalue exists (d = 3 with alpha >= 0, or alpha free).
double lambda_alpha(const Params& params);

Regime regime_classify(int d, double p);
/// Regime of the configured problem; the linear test mode has no singular f and counts as Strong.
Regime effective_regime(const Params& params);

/// Sobolev index range of the regular component; rejects OutOfRange input.
RegularityRange sobolev_regularity(int d, double p);

struct BootstrapLadder {
    std::vector<double> inverse_exponents;  ///< 1/theta_0, 1/theta_1, ..., 1/theta_K
    int steps = 0;                          ///< K: first index with 1/theta_K < 0
};

/// Integrability ladder 1/theta_k = 1/theta_0 + k (p - 3)/3, stopped at the
/// first strictly negative term. Requires 1 < p < 3 and 0 < theta0_inv < 1/2.
BootstrapLadder bootstrap_ladder(double p, double theta0_inv);

/// Ladder started at 1/theta_0 = 1/3 - eps (the "L^{3+}" slack made explicit).
BootstrapLadder bootstrap_ladder_eps(double p, double eps = 0.01);

/// The alpha for which beta_alpha(lambda) q = f0. Throws std::domain_error for
/// q = 0, which is the regular (alpha = Free) case.
double alpha_from_charge(double q, double f0, double lambda, int d);

// ---- flat key-value config records -------------------------------------

using KeyValues = std::map<std::string, std::string>;

/// Keys: d, sigma, p, lambda, alpha ("free" or a real), nonlinear (optional).
Params params_from_keyvalues(const KeyValues& kv);
KeyValues params_to_keyvalues(const Params& params);

/// Formats a double with 17 significant digits.
std::string format_double(double x);

}  // namespace ptint
