#include "ptint/radial_ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "ptint/greens.hpp"
#include "ptint/quadrature.hpp"

namespace ptint {

namespace odeint = boost::numeric::odeint;

namespace {

double power_term(double u, double p) { return std::pow(std::abs(u), p - 1.0) * u; }

double sign_of(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

}  // namespace

RadialGrid RadialGrid::graded(double r0, double r_max, double ratio, double h_tail)
{
    if (!(r0 > 0) || !(r_max > r0) || !(ratio > 1) || !(h_tail > 0))
        throw std::invalid_argument("RadialGrid::graded: need 0 < r0 < r_max, ratio > 1, h_tail > 0");
    RadialGrid g;
    double r = r0;
    g.radii.push_back(r);
    while (r * (ratio - 1.0) < h_tail) {
        r *= ratio;
        if (r >= r_max) break;
        g.radii.push_back(r);
    }
    if (r < r_max) {
        const double start = g.radii.back();
        const auto n = static_cast<std::size_t>(std::ceil((r_max - start) / h_tail));
        const double h = (r_max - start) / static_cast<double>(n);
        for (std::size_t i = 1; i < n; ++i) g.radii.push_back(start + static_cast<double>(i) * h);
    }
    g.radii.push_back(r_max);
    return g;
}

bool RadialGrid::valid() const
{
    if (radii.empty() || !(radii.front() >= 1e-12)) return false;
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] > radii[i - 1])) return false;
    return std::isfinite(radii.back());
}

const char* to_string(OutcomeKind k)
{
    switch (k) {
    case OutcomeKind::Decay: return "Decay";
    case OutcomeKind::BlowUpPlus: return "BlowUpPlus";
    case OutcomeKind::BlowUpMinus: return "BlowUpMinus";
    case OutcomeKind::Undetermined: return "Undetermined";
    }
    return "?";
}

const char* to_string(SingularKind k)
{
    switch (k) {
    case SingularKind::None: return "None";
    case SingularKind::Power: return "Power";
    case SingularKind::Log: return "Log";
    }
    return "?";
}

double LocalExpansion::s(double r) const
{
    switch (kind) {
    case SingularKind::None: return 0.0;
    case SingularKind::Power: return std::pow(r, exponent);
    case SingularKind::Log: return std::log(r);
    }
    return 0.0;
}

double LocalExpansion::ds(double r) const
{
    switch (kind) {
    case SingularKind::None: return 0.0;
    case SingularKind::Power: return exponent * std::pow(r, exponent - 1.0);
    case SingularKind::Log: return 1.0 / r;
    }
    return 0.0;
}

IntegrationError::IntegrationError(const std::string& what, double radius)
    : std::runtime_error(what + " at r = " + format_double(radius)), radius_(radius)
{
}

DegenerateZero::DegenerateZero(double radius, double slope)
    : std::runtime_error("degenerate zero at r = " + format_double(radius) + " (|u'| = " + format_double(slope) +
                         ")"),
      radius_(radius)
{
}

double ode_rhs(const Params& params, double r, double u, double du)
{
    double rhs = -(params.d - 1) / r * du + params.lambda * u;
    if (params.nonlinear) rhs -= params.sigma * power_term(u, params.p);
    return rhs;
}

LocalExpansion local_expansion(const Params& params, double q, double a)
{
    const Regime regime = regime_classify(params.d, params.p);
    if (regime == Regime::OutOfRange) throw std::invalid_argument("local_expansion: (d, p) out of range");
    LocalExpansion ex;
    ex.q = q;
    ex.a = a;
    if (params.d == 2 || !params.nonlinear) return ex;
    const double p = params.p;
    const double src = params.sigma * power_term(q, p);
    if (p == 2.0) {
        ex.kind = SingularKind::Log;
        ex.A = -src / (16.0 * kPi * kPi);
    } else {
        ex.kind = SingularKind::Power;
        ex.exponent = 2.0 - p;
        ex.A = -src / (std::pow(4.0 * kPi, p) * (2.0 - p) * (3.0 - p));
    }
    return ex;
}

RegularTerm regular_term(const Params& params, double q, double a, double r)
{
    if (effective_regime(params) != Regime::Strong)
        throw std::invalid_argument("regular_term: needs the strong regime");
    const int d = params.d;
    const double lam = params.lambda;
    const double sig = params.nonlinear ? params.sigma : 0.0;
    auto g = [&](double t) {
        const double u = a + (q != 0.0 ? q * green(d, lam, t) : 0.0);
        return lam * a - (sig != 0.0 ? sig * power_term(u, params.p) : 0.0);
    };
    RegularTerm w;
    if (d == 2) {
        w.value = quad::singular_cell([&](double t) { return t * std::log(r / t) * g(t); }, r, 2.0);
        w.deriv = quad::singular_cell([&](double t) { return t * g(t); }, r, 2.0) / r;
        return w;
    }
    const bool singular = sig != 0.0 && q != 0.0;
    w.value = quad::singular_cell([&](double t) { return t * (1.0 - t / r) * g(t); }, r, singular ? 2.0 - params.p : 2.0);
    w.deriv = quad::singular_cell([&](double t) { return t * t * g(t); }, r, singular ? 3.0 - params.p : 3.0) / (r * r);
    return w;
}

RegularTerm start_data(const Params& params, double q, double a, double r0)
{
    if (effective_regime(params) == Regime::Strong) {
        RegularTerm w = regular_term(params, q, a, r0);
        w.value += a;
        return w;
    }
    const LocalExpansion ex = local_expansion(params, q, a);
    return {ex.value(r0), ex.deriv(r0)};
}

double resolved_r0(const Params& params, const IntegrateControls& ctrl)
{
    return ctrl.r0 > 0 ? ctrl.r0 : 1e-6 / std::sqrt(params.lambda);
}

double resolved_r_max(const Params& params, const IntegrateControls& ctrl)
{
    return ctrl.r_max > 0 ? ctrl.r_max : 40.0 / std::sqrt(params.lambda);
}

double lyapunov_energy(const Params& params, double u, double du, bool paper_exponent)
{
    double e = 0.5 * du * du - 0.5 * params.lambda * u * u;
    if (params.nonlinear) {
        const double p = params.p;
        const double au = std::abs(u);
        e += paper_exponent ? params.sigma * std::pow(au, p) / p : params.sigma * std::pow(au, p + 1.0) / (p + 1.0);
    }
    return e;
}

Integration integrate(const Params& params, double q, double a, const IntegrateControls& ctrl)
{
    params.validate();
    const int d = params.d;
    const double lam = params.lambda;
    const double k = std::sqrt(lam);
    const double p = params.p;
    const double sig = params.nonlinear ? params.sigma : 0.0;
    const double r0 = resolved_r0(params, ctrl);
    const double rmax = resolved_r_max(params, ctrl);
    if (!(rmax > r0)) throw std::invalid_argument("integrate: r_max must exceed r0");

    using State = std::array<double, 2>;
    auto system = [&](const State& y, State& dy, double r) {
        const double u = q == 0.0 ? y[0] : y[0] + q * green(d, lam, r);
        dy[0] = y[1];
        dy[1] = -(d - 1) / r * y[1] + lam * y[0] - (sig != 0.0 ? sig * power_term(u, p) : 0.0);
    };
    auto full = [&](double r, const State& y, double& u, double& du) {
        u = y[0];
        du = y[1];
        if (q != 0.0) {
            u += q * green(d, lam, r);
            du += q * green_deriv(d, lam, r);
        }
    };

    Integration out;
    RadialProfile& prof = out.profile;
    Outcome& oc = out.outcome;
    prof.params = params;
    prof.q = q;
    prof.a = a;
    const RadialGrid grid = RadialGrid::graded(r0, rmax, ctrl.grid_ratio, ctrl.tail_step / k);
    std::size_t next_sample = 0;
    auto take_sample = [&](double r, const State& y) {
        double u, du;
        full(r, y, u, du);
        prof.grid.radii.push_back(r);
        prof.u.push_back(u);
        prof.du.push_back(du);
        prof.f.push_back(y[0]);
    };

    const double m_blow = ctrl.blow_factor * std::max({1.0, std::abs(a), std::abs(q * green(d, lam, r0))});
    const double e_tol = 1e-12 * lam * std::max(1.0, a * a);
    const double decay_scale = std::max({1.0, std::abs(a), std::abs(q)});
    const double r_tail = rmax - 0.1 * (rmax - r0);

    const RegularTerm s0 = start_data(params, q, a, r0);
    State y{s0.value, s0.deriv};
    const double max_dt = ctrl.max_step / k;
    auto stepper = odeint::make_dense_output(ctrl.abs_tol, ctrl.rel_tol, max_dt, odeint::runge_kutta_dopri5<State>());
    stepper.initialize(y, r0, r0 * 1e-3);
    if (ctrl.record) {
        take_sample(r0, y);
        next_sample = 1;
    }

    double t_prev = r0;
    double u_prev, du_prev;
    full(r0, y, u_prev, du_prev);
    oc.origin_sign_change = q != 0.0 && sign_of(u_prev) * sign_of(q) < 0;
    bool tail_inward = true;
    bool tail_band = true;

    auto finish_samples = [&](double t_end) {
        if (!ctrl.record) return;
        State ys;
        while (next_sample < grid.size() && grid.radii[next_sample] <= t_end) {
            const double r = grid.radii[next_sample];
            stepper.calc_state(r, ys);
            take_sample(r, ys);
            ++next_sample;
        }
    };

    constexpr int kChecks = 4;
    while (true) {
        std::pair<double, double> span;
        try {
            span = stepper.do_step(system);
        } catch (const std::exception& e) {
            throw IntegrationError(std::string("step failure (") + e.what() + ")", stepper.current_time());
        }
        const double t0 = span.first;
        const double t1 = std::min(span.second, rmax);
        State yc;
        for (int j = 1; j <= kChecks; ++j) {
            const double t = j == kChecks ? t1 : t0 + (t1 - t0) * j / kChecks;
            if (t <= t_prev) continue;
            stepper.calc_state(t, yc);
            if (!std::isfinite(yc[0]) || !std::isfinite(yc[1])) throw IntegrationError("non-finite state", t);
            double u, du;
            full(t, yc, u, du);

            if (sign_of(u) * sign_of(u_prev) < 0) {
                double lo = t_prev, hi = t;
                const double s_lo = sign_of(u_prev);
                State ym;
                while (hi - lo > 1e-12 * std::max(1.0, hi)) {
                    const double mid = 0.5 * (lo + hi);
                    if (mid <= lo || mid >= hi) break;
                    stepper.calc_state(mid, ym);
                    double um, dum;
                    full(mid, ym, um, dum);
                    if (sign_of(um) == s_lo) lo = mid;
                    else hi = mid;
                }
                oc.zero_radii.push_back(0.5 * (lo + hi));
                ++oc.zeros;
                if (oc.zeros > ctrl.max_zeros) {
                    finish_samples(t);
                    oc.kind = OutcomeKind::Undetermined;
                    oc.radius = t;
                    oc.note = "zero cap reached";
                    return out;
                }
            }

            const bool blown = std::abs(u) > m_blow;
            const bool trapped = ctrl.stop_on_negative_energy && lyapunov_energy(params, u, du) < -e_tol;
            if (blown || trapped) {
                finish_samples(t);
                oc.kind = u > 0 ? OutcomeKind::BlowUpPlus : OutcomeKind::BlowUpMinus;
                oc.radius = t;
                oc.note = blown ? "threshold exceeded" : "negative energy";
                return out;
            }

            if (t >= r_tail && !(u == 0.0 && du == 0.0)) {
                if (!(u * du < 0)) tail_inward = false;
                if (u != 0.0 && std::abs(du / u + k) > ctrl.decay_band) tail_band = false;
            }
            t_prev = t;
            u_prev = u;
        }
        finish_samples(t1);
        if (t1 >= rmax) break;
    }

    oc.radius = rmax;
    const bool small = std::abs(u_prev) < ctrl.tol_decay * decay_scale;
    if (small && tail_inward && tail_band) {
        oc.kind = OutcomeKind::Decay;
    } else {
        oc.kind = OutcomeKind::Undetermined;
        oc.note = !small ? "not small at r_max" : (!tail_inward ? "tail not inward" : "log-derivative band");
    }
    return out;
}

LyapunovReport lyapunov_monitor(const RadialProfile& profile, double r_cut, bool paper_exponent, double tol)
{
    LyapunovReport rep;
    const std::size_t n = profile.size();
    rep.energy.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        rep.energy[i] = lyapunov_energy(profile.params, profile.u[i], profile.du[i], paper_exponent);

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (profile.grid.radii[i] >= r_cut) scale = std::max(scale, std::abs(rep.energy[i]));
    const double slack = tol * std::max(scale, std::numeric_limits<double>::min());
    const double sl = std::sqrt(profile.params.lambda);
    for (std::size_t i = 0; i < n; ++i) {
        if (profile.grid.radii[i] < r_cut) continue;
        if (i + 1 < n) {
            const double inc = rep.energy[i + 1] - rep.energy[i];
            rep.max_increase = std::max(rep.max_increase, inc);
            if (inc > slack) rep.nonincreasing = false;
        }
        if (rep.energy[i] <= 0.0) {
            const double bound = sl * std::abs(profile.u[i]);
            if (std::abs(profile.du[i]) > bound * (1.0 + 1e-6) + 1e-12 * std::sqrt(scale)) rep.gradient_bound = false;
        }
    }
    return rep;
}

namespace {

double hermite_value(double x0, double x1, double y0, double y1, double m0, double m1, double x)
{
    const double h = x1 - x0;
    const double t = (x - x0) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * m1;
}

double hermite_slope(double x0, double x1, double y0, double y1, double m0, double m1, double x)
{
    const double h = x1 - x0;
    const double t = (x - x0) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * y0 + (6 * t2 - 6 * t) * -y1) / h + (3 * t2 - 4 * t + 1) * m0 + (3 * t2 - 2 * t) * m1;
}

// u''(x1) from u and u' at three nodes, exact for quintics.
double hermite_second_derivative(double x0, double x1, double x2, const double* u, const double* du)
{
    const double h = std::max(x1 - x0, x2 - x1);
    const double s[3] = {(x0 - x1) / h, 0.0, (x2 - x1) / h};
    Eigen::Matrix<double, 6, 6> m;
    Eigen::Matrix<double, 6, 1> rhs = Eigen::Matrix<double, 6, 1>::Zero();
    for (int p = 0; p < 6; ++p) {
        for (int j = 0; j < 3; ++j) {
            m(p, j) = std::pow(s[j], p);
            m(p, 3 + j) = p == 0 ? 0.0 : p * std::pow(s[j], p - 1);
        }
    }
    rhs(2) = 2.0;
    const Eigen::Matrix<double, 6, 1> w = m.partialPivLu().solve(rhs);
    double acc = 0.0;
    for (int j = 0; j < 3; ++j) acc += w(j) * u[j] + w(3 + j) * h * du[j];
    return acc / (h * h);
}

}  // namespace

std::vector<double> find_zeros(const RadialProfile& profile)
{
    const auto& r = profile.grid.radii;
    const auto& u = profile.u;
    const auto& du = profile.du;
    std::vector<double> zeros;
    const std::size_t n = profile.size();
    if (n < 2) return zeros;

    double slope_scale = 0.0;
    const double sl = std::sqrt(profile.params.lambda);
    for (std::size_t i = 0; i < n; ++i)
        if (r[i] >= 0.1 / sl) slope_scale = std::max(slope_scale, sl * std::abs(u[i]));

    // sign of the last nonzero sample
    std::size_t last = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (u[i] == 0.0) continue;
        if (last != n && sign_of(u[i]) != sign_of(u[last])) {
            // root lies in [r[i-1], r[i]] (or at an exact zero sample before i)
            const std::size_t j = i - 1;
            double root;
            double slope;
            if (u[j] == 0.0) {
                root = r[j];
                slope = du[j];
            } else {
                double lo = r[j], hi = r[i];
                const double s_lo = sign_of(u[j]);
                for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (sign_of(hermite_value(r[j], r[i], u[j], u[i], du[j], du[i], mid)) == s_lo) lo = mid;
                    else hi = mid;
                }
                root = 0.5 * (lo + hi);
                slope = hermite_slope(r[j], r[i], u[j], u[i], du[j], du[i], root);
            }
            if (!(std::abs(slope) > 1e-8 * slope_scale)) throw DegenerateZero(root, std::abs(slope));
            zeros.push_back(root);
        }
        last = i;
    }
    return zeros;
}

int count_zeros(const RadialProfile& profile) { return static_cast<int>(find_zeros(profile).size()); }

double ode_residual(const RadialProfile& profile)
{
    const auto& r = profile.grid.radii;
    const auto& u = profile.u;
    const auto& du = profile.du;
    const Params& pr = profile.params;
    const std::size_t n = profile.size();
    double umax = 0.0;
    for (double v : u) umax = std::max(umax, std::abs(v));
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (profile.splice_radius > 0 && r[i + 1] >= profile.splice_radius && r[i - 1] <= profile.splice_radius)
            continue;
        if (std::abs(u[i]) < 1e-10 * umax) continue;
        const double d2 = hermite_second_derivative(r[i - 1], r[i], r[i + 1], &u[i - 1], &du[i - 1]);
        const double t1 = (pr.d - 1) / r[i] * du[i];
        const double t2 = pr.lambda * u[i];
        const double t3 = pr.nonlinear ? pr.sigma * power_term(u[i], pr.p) : 0.0;
        const double mag = std::abs(d2) + std::abs(t1) + std::abs(t2) + std::abs(t3);
        if (mag == 0.0) continue;
        worst = std::max(worst, std::abs(d2 - ode_rhs(pr, r[i], u[i], du[i])) / mag);
    }
    return worst;
}

}  // namespace ptint
