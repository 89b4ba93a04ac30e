#include "ptint/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "ptint/greens.hpp"
#include "ptint/quadrature.hpp"

namespace ptint {

namespace {

struct Lsq {
    double c0 = 0.0, c1 = 0.0;
    double se0 = 0.0, se1 = 0.0;
    double rss = 0.0;
    double condition = 0.0;
};

// y ~ c0 x0 + c1 x1
Lsq least_squares(const std::vector<double>& x0, const std::vector<double>& x1, const std::vector<double>& y)
{
    const auto n = static_cast<Eigen::Index>(y.size());
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd Y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        X(i, 0) = x0[static_cast<std::size_t>(i)];
        X(i, 1) = x1[static_cast<std::size_t>(i)];
        Y(i) = y[static_cast<std::size_t>(i)];
    }
    const Eigen::Vector2d scale(X.col(0).norm(), X.col(1).norm());
    Eigen::MatrixXd Xn = X;
    Xn.col(0) /= scale(0);
    Xn.col(1) /= scale(1);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Xn, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    Lsq out;
    out.condition = sv(1) > 0 ? sv(0) / sv(1) : std::numeric_limits<double>::infinity();
    const Eigen::Vector2d cn = svd.solve(Y);
    out.c0 = cn(0) / scale(0);
    out.c1 = cn(1) / scale(1);
    const Eigen::VectorXd res = Y - X * Eigen::Vector2d(out.c0, out.c1);
    out.rss = res.squaredNorm();
    if (n > 2) {
        const double s2 = out.rss / static_cast<double>(n - 2);
        const Eigen::Matrix2d cov = s2 * (Xn.transpose() * Xn).inverse();
        out.se0 = std::sqrt(std::max(cov(0, 0), 0.0)) / scale(0);
        out.se1 = std::sqrt(std::max(cov(1, 1), 0.0)) / scale(1);
    }
    return out;
}

std::vector<std::size_t> window_indices(const std::vector<double>& r, double lo, double hi)
{
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (r[i] >= lo * (1 - 1e-12) && r[i] <= hi * (1 + 1e-12)) idx.push_back(i);
    return idx;
}

double power_term(double u, double p) { return std::pow(std::abs(u), p - 1.0) * u; }

}  // namespace

ChargeFit fit_charge(const RadialProfile& profile, double lambda, int d, const FitOptions& opts)
{
    const auto& r = profile.grid.radii;
    if (r.size() < 4) throw std::invalid_argument("fit_charge: profile too short");
    double rw = opts.r_start > 0 ? opts.r_start : r.front();
    ChargeFit best;
    bool have = false;
    while (rw < r.back()) {
        const auto idx = window_indices(r, rw, rw * opts.decade);
        if (idx.size() >= 4) {
            std::vector<double> g(idx.size()), one(idx.size(), 1.0), y(idx.size());
            for (std::size_t j = 0; j < idx.size(); ++j) {
                const double x = r[idx[j]];
                g[j] = green(d, lambda, x);
                y[j] = profile.u[idx[j]] - (opts.correction ? opts.correction(x) : 0.0);
            }
            const Lsq fit = least_squares(g, one, y);
            ChargeFit cf;
            cf.q = fit.c0;
            cf.a = fit.c1;
            cf.q_stderr = fit.se0;
            cf.a_stderr = fit.se1;
            cf.window_lo = r[idx.front()];
            cf.window_hi = r[idx.back()];
            cf.condition = fit.condition;
            cf.ill_conditioned = !(fit.condition <= opts.max_condition);
            if (!have) {
                best = cf;
                have = true;
            }
            if (!cf.ill_conditioned) return cf;
        }
        rw *= opts.decade;
    }
    if (!have) throw std::invalid_argument("fit_charge: no window with enough samples");
    best.ill_conditioned = true;
    return best;
}

ChargeFit fit_charge_corrected(const RadialProfile& profile, const Params& params, int passes)
{
    FitOptions fo;
    const LocalExpansion ex = local_expansion(params, profile.q, 0.0);
    if (ex.kind != SingularKind::None) fo.correction = [ex](double x) { return ex.A * ex.s(x); };
    ChargeFit fit = fit_charge(profile, params.lambda, params.d, fo);
    if (effective_regime(params) != Regime::Strong) return fit;
    for (int i = 0; i < passes && fit.q != 0.0; ++i) {
        const double q = fit.q, a = fit.a;
        fo.correction = [&params, q, a](double x) { return regular_term(params, q, a, x).value; };
        fit = fit_charge(profile, params.lambda, params.d, fo);
    }
    return fit;
}

FluxCharge charge_from_flux(const RadialProfile& profile, const Params& params, double r_first)
{
    const auto& r = profile.grid.radii;
    const auto& u = profile.u;
    const auto& f = profile.f;
    const int d = params.d;
    const double lam = params.lambda;
    const double p = params.p;
    const double sig = params.nonlinear ? params.sigma : 0.0;
    const double q = profile.q;
    const double area = sphere_area(d);
    if (r_first <= 0) r_first = std::max(1e-5 / std::sqrt(lam), r.front() * 10.0);

    // phi - lambda q G, integrated over (0, r0) with the local expansion
    const LocalExpansion ex = local_expansion(params, q, profile.a);
    const double c = d == 2 ? 2.0 : (q != 0.0 && sig != 0.0 ? 3.0 - p : 3.0);
    const double inner = quad::singular_cell(
        [&](double x) {
            const double fx = ex.value(x);
            const double ux = fx + (q != 0.0 ? q * green(d, lam, x) : 0.0);
            const double lw = (d - 1) * std::log(x) + std::log(area);
            const double src = ux == 0.0 ? 0.0 : std::copysign(std::exp(p * std::log(std::abs(ux)) + lw), ux);
            return sig * src - lam * fx * std::exp(lw);
        },
        r.front(), c);

    FluxCharge out;
    std::size_t i = 0;
    double acc = inner;
    auto integrand = [&](std::size_t j) {
        return (sig * power_term(u[j], p) - lam * f[j]) * area * std::pow(r[j], d - 1);
    };
    constexpr int kRadii = 6;
    for (int j = 0; j < kRadii; ++j) {
        const double target = r_first * std::pow(2.0, j);
        while (i + 1 < r.size() && r[i] < target) {
            acc += 0.5 * (r[i + 1] - r[i]) * (integrand(i) + integrand(i + 1));
            ++i;
        }
        if (r[i] < target) break;
        const double phi_int = acc - q * green_enclosed_mass(d, lam, r[i]);
        out.radii.push_back(r[i]);
        out.values.push_back(-area * std::pow(r[i], d - 1) * profile.du[i] - phi_int);
    }
    if (out.values.size() < 3) throw std::invalid_argument("charge_from_flux: profile does not reach the radii");

    const double q0 = out.values[0], q1 = out.values[1], q2 = out.values[2];
    const double d01 = q1 - q0, d12 = q2 - q1;
    out.q = q0;
    // Richardson with the observed order when the differences shrink geometrically
    if (d01 != 0.0 && d12 != 0.0 && d01 * d12 > 0) {
        const double ratio = d12 / d01;
        if (ratio > 1.2) out.q = q0 - d01 / (ratio - 1.0);
    }
    double spread = 0.0;
    for (double v : out.values) spread = std::max(spread, std::abs(v - out.q));
    out.stderr_ = std::abs(out.q - q0) + std::abs(d01);
    out.converged = spread <= 1e-3 * std::max(1.0, std::abs(out.q));
    return out;
}

WeakFit weak_fit_samples(const std::vector<double>& r, const std::vector<double>& f, double p)
{
    if (r.size() != f.size() || r.size() < 4) throw std::invalid_argument("weak_fit: need >= 4 samples");
    WeakFit out;
    out.window_lo = r.front();
    out.window_hi = r.back();
    std::vector<double> one(r.size(), 1.0), basis(r.size());
    if (p == 2.0) {
        out.log_flag = true;
        for (std::size_t i = 0; i < r.size(); ++i) basis[i] = std::log(r[i]);
        const Lsq fit = least_squares(basis, one, f);
        out.coefficient = fit.c0;
        out.constant = fit.c1;
        return out;
    }
    auto rss_at = [&](double e, Lsq* keep) {
        for (std::size_t i = 0; i < r.size(); ++i) basis[i] = std::pow(r[i], e);
        const Lsq fit = least_squares(basis, one, f);
        if (keep) *keep = fit;
        return fit.rss;
    };
    Lsq fixed;
    rss_at(2.0 - p, &fixed);
    out.coefficient = fixed.c0;
    out.constant = fixed.c1;
    // secondary fit with a free exponent, golden section around 2 - p
    double lo = (2.0 - p) - 1.0, hi = (2.0 - p) + 1.0;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = rss_at(x1, nullptr), f2 = rss_at(x2, nullptr);
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = rss_at(x1, nullptr);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = rss_at(x2, nullptr);
        }
    }
    out.exponent = 0.5 * (lo + hi);
    return out;
}

WeakFit weak_singularity_fit(const RadialProfile& profile, const Params& params, double q, double r_start)
{
    if (regime_classify(params.d, params.p) != Regime::Weak)
        throw std::invalid_argument("weak_singularity_fit: parameters are not in the weak regime");
    const auto& r = profile.grid.radii;
    const double lo = r_start > 0 ? r_start : r.front();
    const auto idx = window_indices(r, lo, 10.0 * lo);
    std::vector<double> rr, ff;
    for (std::size_t i : idx) {
        rr.push_back(r[i]);
        ff.push_back(profile.u[i] - q * green(params.d, params.lambda, r[i]));
    }
    WeakFit out = weak_fit_samples(rr, ff, params.p);
    out.predicted_coefficient = local_expansion(params, q, 0.0).A;
    return out;
}

std::string VerificationReport::summary_line() const
{
    std::ostringstream os;
    os << (pass ? "PASS" : "FAIL") << ' ' << (label.empty() ? "solution" : label) << ':';
    for (const auto& c : checks) os << ' ' << c.name << '=' << format_double(c.value) << (c.pass ? "" : "(!)");
    return os.str();
}

VerificationReport equivalence_report(const BranchPoint& point, const Params& params, const std::string& label,
                                      const VerifyTolerances& tol)
{
    VerificationReport rep;
    rep.label = label;
    rep.regime = effective_regime(params);
    const RadialProfile& prof = point.profile;
    const int d = params.d;
    const double lam = params.lambda;

    rep.fit = fit_charge_corrected(prof, params);
    rep.flux = charge_from_flux(prof, params);
    rep.q_agreement = std::abs(rep.fit.q - rep.flux.q) / std::max(1.0, std::abs(rep.fit.q));
    rep.checks.push_back({"q_agreement", rep.q_agreement <= tol.q_agreement, rep.q_agreement, tol.q_agreement});
    rep.checks.push_back({"fit_condition", !rep.fit.ill_conditioned, rep.fit.condition, FitOptions{}.max_condition});
    rep.checks.push_back({"flux_converged", rep.flux.converged, rep.flux.stderr_, 0.0});

    rep.alpha_kind = point.alpha_kind;
    rep.alpha = point.alpha;
    if (rep.regime == Regime::Strong) {
        rep.f0 = rep.fit.a;
        if (point.q != 0.0 && point.alpha_kind == AlphaKind::Finite) {
            const double b = beta(d, point.alpha, lam);
            rep.relation_residual = std::abs(rep.fit.a - b * rep.fit.q);
            const double bound = tol.relation * std::max(1.0, std::abs(rep.fit.a));
            rep.checks.push_back({"relation", rep.relation_residual <= bound, rep.relation_residual, bound});
        }
    } else if (rep.regime == Regime::Weak) {
        rep.weak = weak_singularity_fit(prof, params, rep.fit.q);
        const WeakFit& w = *rep.weak;
        const double crel = std::abs(w.coefficient - w.predicted_coefficient) /
                            std::max(std::abs(w.predicted_coefficient), 1e-300);
        if (!w.log_flag) {
            const double ee = std::abs(w.exponent - (2.0 - params.p));
            rep.checks.push_back({"weak_exponent", ee <= tol.weak_exponent, w.exponent, tol.weak_exponent});
        }
        rep.checks.push_back({"weak_coefficient", crel <= tol.weak_coefficient, w.coefficient, tol.weak_coefficient});
    }

    // decay on the outer half
    const auto& r = prof.grid.radii;
    const double rlast = r.back();
    std::vector<double> xs, ls, ones;
    bool sign_change = false;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i] < 0.5 * rlast) continue;
        if (prof.u[i] == 0.0 || (prof.u[i] > 0) != (prof.u.back() > 0)) {
            sign_change = true;
            continue;
        }
        xs.push_back(r[i]);
        ls.push_back(std::log(std::abs(prof.u[i])));
        ones.push_back(1.0);
    }
    if (xs.size() >= 3 && !sign_change) rep.decay_rate = -least_squares(xs, ones, ls).c0;
    const double need = tol.decay_fraction * std::sqrt(lam);
    rep.checks.push_back({"decay_rate", rep.decay_rate >= need, rep.decay_rate, need});

    double cstar = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
        cstar = std::max(cstar, std::abs(prof.u[i]) / (green(d, lam, r[i]) + 1.0));
    rep.bound_const = cstar;
    rep.checks.push_back({"bound_const", std::isfinite(cstar), cstar, 0.0});

    rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(), [](const CheckResult& c) { return c.pass; });
    return rep;
}

}  // namespace ptint
