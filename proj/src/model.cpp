#include "ptint/model.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace ptint {

void Params::validate() const
{
    if (d != 2 && d != 3) throw std::invalid_argument("d must be 2 or 3, got " + std::to_string(d));
    if (sigma != 1 && sigma != -1) throw std::invalid_argument("sigma must be +1 or -1");
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("p must be a finite real > 1");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be a finite real > 0");
    if (d == 3 && p >= 3.0) throw std::invalid_argument("d = 3 requires p < 3");
    if (alpha.is_finite() && !std::isfinite(alpha.value())) throw std::invalid_argument("alpha must be finite or free");
}

const char* to_string(Regime r)
{
    switch (r) {
    case Regime::Strong: return "strong";
    case Regime::Weak: return "weak";
    case Regime::OutOfRange: return "out_of_range";
    }
    return "?";
}

double sphere_area(int d)
{
    if (d == 2) return 2.0 * kPi;
    if (d == 3) return 4.0 * kPi;
    throw std::invalid_argument("sphere_area: d must be 2 or 3");
}

double beta(int d, double alpha, double lambda)
{
    if (!(lambda > 0.0)) throw std::invalid_argument("beta: lambda must be > 0");
    if (d == 2) return alpha + kEulerGamma / (2.0 * kPi) + std::log(std::sqrt(lambda) / 2.0) / (2.0 * kPi);
    if (d == 3) return alpha + std::sqrt(lambda) / (4.0 * kPi);
    throw std::invalid_argument("beta: d must be 2 or 3");
}

double beta(const Params& params, double lambda)
{
    if (params.alpha.is_free()) throw std::domain_error("beta is undefined for alpha = free (free Laplacian)");
    return beta(params.d, params.alpha.value(), lambda);
}

double lambda_alpha(const Params& params)
{
    if (params.alpha.is_free()) return 0.0;
    const double a = params.alpha.value();
    if (params.d == 2) return 4.0 * std::exp(-4.0 * kPi * a - 2.0 * kEulerGamma);
    if (params.d == 3) return a < 0.0 ? 16.0 * kPi * kPi * a * a : 0.0;
    throw std::invalid_argument("lambda_alpha: d must be 2 or 3");
}

Regime effective_regime(const Params& params)
{
    const Regime r = regime_classify(params.d, params.p);
    return r == Regime::Weak && !params.nonlinear ? Regime::Strong : r;
}

Regime regime_classify(int d, double p)
{
    if (!(p > 1.0)) throw std::invalid_argument("regime_classify: p must be > 1");
    if (d == 2) return Regime::Strong;
    if (d != 3) throw std::invalid_argument("regime_classify: d must be 2 or 3");
    if (p < 2.0) return Regime::Strong;
    if (p < 3.0) return Regime::Weak;
    return Regime::OutOfRange;
}

RegularityRange sobolev_regularity(int d, double p)
{
    const Regime regime = regime_classify(d, p);
    if (regime == Regime::OutOfRange)
        throw std::invalid_argument("sobolev_regularity: (d, p) outside the equivalence range");
    if (d == 2 || p < 1.5) return {2.0, 2.0, false, false};
    if (regime == Regime::Strong) return {1.5, 3.5 - p, true, true};
    return {0.5, 3.5 - p, true, true};
}

BootstrapLadder bootstrap_ladder(double p, double theta0_inv)
{
    if (!(p > 1.0)) throw std::invalid_argument("bootstrap_ladder: p must be > 1");
    if (!(p < 3.0)) throw std::invalid_argument("bootstrap_ladder: p >= 3 does not descend");
    if (!(theta0_inv > 0.0 && theta0_inv < 0.5))
        throw std::invalid_argument("bootstrap_ladder: 1/theta_0 must lie in (0, 1/2)");

    const double step = (p - 3.0) / 3.0;
    BootstrapLadder ladder;
    double current = theta0_inv;
    ladder.inverse_exponents.push_back(current);
    while (!(current < 0.0)) {
        current += step;
        ladder.inverse_exponents.push_back(current);
    }
    ladder.steps = static_cast<int>(ladder.inverse_exponents.size()) - 1;
    return ladder;
}

BootstrapLadder bootstrap_ladder_eps(double p, double eps)
{
    if (!(eps > 0.0)) throw std::invalid_argument("bootstrap_ladder: eps must be > 0");
    return bootstrap_ladder(p, 1.0 / 3.0 - eps);
}

double alpha_from_charge(double q, double f0, double lambda, int d)
{
    if (q == 0.0) throw std::domain_error("alpha_from_charge: q = 0 is a regular solution (alpha = free)");
    // beta is affine in alpha with unit slope.
    return f0 / q - beta(d, 0.0, lambda);
}

// ---------------------------------------------------------------------------

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

double parse_double(const std::string& key, const std::string& text)
{
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw std::invalid_argument("key '" + key + "': cannot parse '" + text + "' as a real number");
    return v;
}

int parse_int(const std::string& key, const std::string& text)
{
    int v = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && text[0] == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw std::invalid_argument("key '" + key + "': cannot parse '" + text + "' as an integer");
    return v;
}

}  // namespace

Params params_from_keyvalues(const KeyValues& kv)
{
    Params params;
    for (const auto& [key, value] : kv) {
        if (key == "d") params.d = parse_int(key, value);
        else if (key == "sigma") params.sigma = parse_int(key, value);
        else if (key == "p") params.p = parse_double(key, value);
        else if (key == "lambda") params.lambda = parse_double(key, value);
        else if (key == "alpha") {
            if (value == "free" || value == "inf" || value == "infinity") params.alpha = Alpha::free();
            else params.alpha = Alpha::finite(parse_double(key, value));
        }
        else if (key == "nonlinear") {
            if (value == "true" || value == "1") params.nonlinear = true;
            else if (value == "false" || value == "0") params.nonlinear = false;
            else throw std::invalid_argument("key 'nonlinear': expected true/false, got '" + value + "'");
        }
        else throw std::invalid_argument("unknown params key '" + key + "'");
    }
    params.validate();
    return params;
}

KeyValues params_to_keyvalues(const Params& params)
{
    KeyValues kv;
    kv["d"] = std::to_string(params.d);
    kv["sigma"] = std::to_string(params.sigma);
    kv["p"] = format_double(params.p);
    kv["lambda"] = format_double(params.lambda);
    kv["alpha"] = params.alpha.is_free() ? std::string("free") : format_double(params.alpha.value());
    if (!params.nonlinear) kv["nonlinear"] = "false";
    return kv;
}

}  // namespace ptint
