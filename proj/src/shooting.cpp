#include "ptint/shooting.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <functional>

#include "ptint/greens.hpp"
#include "ptint/quadrature.hpp"

namespace ptint {

const char* to_string(AlphaKind k)
{
    switch (k) {
    case AlphaKind::Finite: return "finite";
    case AlphaKind::Free: return "free";
    case AlphaKind::Unconstrained: return "unconstrained";
    }
    return "?";
}

namespace {

// Class of a trajectory: total zero count on (0, R_event) and final sign.
struct ShotClass {
    int zeros = 0;
    int sign = 0;
    bool undetermined = false;
    bool decay = false;
};

bool same_class(const ShotClass& x, const ShotClass& y)
{
    if (x.decay || y.decay) return false;
    if (x.undetermined || y.undetermined) return x.undetermined == y.undetermined;
    return x.zeros == y.zeros && x.sign == y.sign;
}

int class_zeros(const ShotClass& c) { return c.undetermined ? INT_MAX : c.zeros; }

bool simple_transition(const ShotClass& x, const ShotClass& y)
{
    if (x.undetermined || y.undetermined || x.decay || y.decay) return false;
    if (x.sign == y.sign) return false;
    return std::abs(x.zeros - y.zeros) == 1 || x.zeros == y.zeros;
}

// The shooting line: parameter t -> (q, a).
using Line = std::function<std::pair<double, double>(double)>;

struct Search {
    const Params& params;
    const ShootControls& ctrl;
    Line line;
    int max_zero_count;
    IntegrateControls quiet;

    Search(const Params& p, const ShootControls& c, Line l, int maxz)
        : params(p), ctrl(c), line(std::move(l)), max_zero_count(maxz), quiet(c.integ)
    {
        quiet.record = false;
    }

    ShotClass classify(double t) const
    {
        const auto [q, a] = line(t);
        const Integration run = integrate(params, q, a, quiet);
        ShotClass c;
        switch (run.outcome.kind) {
        case OutcomeKind::Decay:
            c.decay = true;
            break;
        case OutcomeKind::Undetermined:
            c.undetermined = true;
            break;
        case OutcomeKind::BlowUpPlus:
            c.sign = 1;
            break;
        case OutcomeKind::BlowUpMinus:
            c.sign = -1;
            break;
        }
        c.zeros = run.outcome.zeros + (run.outcome.origin_sign_change ? 1 : 0);
        return c;
    }

    struct Found {
        double t_lo, t_hi;
        int zero_count;
        bool exact;
    };
    std::vector<Found> found;

    bool converged(double t1, double t2) const
    {
        const double mid = 0.5 * (t1 + t2);
        if (mid <= std::min(t1, t2) || mid >= std::max(t1, t2)) return true;
        const auto qa1 = line(t1);
        const auto qa2 = line(t2);
        if (qa1 == qa2) return true;
        const double scale = std::max({std::abs(t1), std::abs(t2), 1e-300});
        return std::abs(t2 - t1) <= ctrl.bisect_rel_tol * scale;
    }

    void bisect(double t1, ShotClass c1, double t2, ShotClass c2, int depth)
    {
        for (int it = 0; it < ctrl.max_bisect; ++it) {
            if (converged(t1, t2)) break;
            const double tm = 0.5 * (t1 + t2);
            const ShotClass cm = classify(tm);
            if (cm.decay) {
                found.push_back({tm, tm, std::min(c1.zeros, c2.zeros), true});
                return;
            }
            if (same_class(cm, c1)) {
                t1 = tm;
            } else if (same_class(cm, c2)) {
                t2 = tm;
            } else {
                explore(t1, c1, tm, cm, depth + 1);
                explore(tm, cm, t2, c2, depth + 1);
                return;
            }
        }
        found.push_back({t1, t2, std::min(c1.zeros, c2.zeros), false});
    }

    void explore(double t1, ShotClass c1, double t2, ShotClass c2, int depth)
    {
        if (same_class(c1, c2) || c1.decay || c2.decay) return;
        if (std::min(class_zeros(c1), class_zeros(c2)) > max_zero_count) return;
        if (simple_transition(c1, c2)) {
            if (std::min(c1.zeros, c2.zeros) <= max_zero_count) bisect(t1, c1, t2, c2, depth);
            return;
        }
        if (depth >= ctrl.max_depth || converged(t1, t2)) return;
        const double tm = 0.5 * (t1 + t2);
        const ShotClass cm = classify(tm);
        if (cm.decay) found.push_back({tm, tm, std::min(class_zeros(c1), class_zeros(c2)), true});
        explore(t1, c1, tm, cm, depth + 1);
        explore(tm, cm, t2, c2, depth + 1);
    }

    void scan(const std::vector<double>& ts)
    {
        std::vector<ShotClass> cls(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) cls[i] = classify(ts[i]);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            if (cls[i].decay) found.push_back({ts[i], ts[i], -1, true});
            if (i + 1 < ts.size()) explore(ts[i], cls[i], ts[i + 1], cls[i + 1], 0);
        }
    }
};

double trapezoid(const std::vector<double>& r, const std::vector<double>& g)
{
    double s = 0.0;
    for (std::size_t i = 1; i < r.size(); ++i) s += 0.5 * (r[i] - r[i - 1]) * (g[i] + g[i - 1]);
    return s;
}

// Integral of fn over (0, r0) where fn ~ r^{c-1} polylog near 0.
double inner_cell(const std::function<double(double)>& fn, double r0, double c)
{
    return quad::singular_cell(fn, r0, std::max(c, 0.05));
}

BranchPoint build_point(const Params& params, const ShootControls& ctrl, const Line& line, const Search::Found& s)
{
    BranchPoint pt;
    IntegrateControls rec = ctrl.integ;
    rec.record = true;
    const auto [q_lo, a_lo] = line(s.t_lo);
    pt.q = q_lo;
    pt.a = a_lo;
    pt.bracket_lo = s.t_lo;
    pt.bracket_hi = s.t_hi;
    const int d = params.d;
    const double lam = params.lambda;
    const double k = std::sqrt(lam);

    if (s.exact) {
        Integration run = integrate(params, q_lo, a_lo, rec);
        pt.profile = std::move(run.profile);
        pt.outcome = run.outcome;
        pt.residuals.decay_margin = 0.0;
        pt.certified = run.outcome.kind == OutcomeKind::Decay;
        if (!pt.certified) pt.note = "midpoint decay not reproduced";
        finalize_point(pt, params);
        return pt;
    }

    const auto [q_hi, a_hi] = line(s.t_hi);
    Integration lo = integrate(params, q_lo, a_lo, rec);
    Integration hi = integrate(params, q_hi, a_hi, rec);
    const std::size_t n = std::min(lo.profile.size(), hi.profile.size());
    std::size_t splice = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double um = 0.5 * (lo.profile.u[i] + hi.profile.u[i]);
        const double dum = 0.5 * (lo.profile.du[i] + hi.profile.du[i]);
        const double scale = std::max(std::abs(um), std::abs(dum) / k);
        if (std::abs(hi.profile.u[i] - lo.profile.u[i]) > ctrl.agree_tol * scale) break;
        splice = i;
    }

    const double r0 = resolved_r0(params, ctrl.integ);
    const double rmax = resolved_r_max(params, ctrl.integ);
    const RadialGrid grid = RadialGrid::graded(r0, rmax, ctrl.integ.grid_ratio, ctrl.integ.tail_step / k);
    RadialProfile& prof = pt.profile;
    prof.params = params;
    prof.q = q_lo;
    prof.a = a_lo;
    prof.grid = grid;
    const std::size_t m = grid.size();
    prof.u.resize(m);
    prof.du.resize(m);
    prof.f.resize(m);
    for (std::size_t i = 0; i <= splice; ++i) {
        prof.u[i] = 0.5 * (lo.profile.u[i] + hi.profile.u[i]);
        prof.du[i] = 0.5 * (lo.profile.du[i] + hi.profile.du[i]);
        prof.f[i] = 0.5 * (lo.profile.f[i] + hi.profile.f[i]);
    }
    const double rs = grid.radii[splice];
    const double gs = green(d, lam, rs);
    const double c = prof.u[splice] / gs;
    const double slope = c * green_deriv(d, lam, rs);
    pt.residuals.decay_margin = std::abs(prof.du[splice] - slope) / std::abs(slope);
    for (std::size_t i = splice + 1; i < m; ++i) {
        const double g = green(d, lam, grid.radii[i]);
        prof.u[i] = c * g;
        prof.du[i] = c * green_deriv(d, lam, grid.radii[i]);
        prof.f[i] = (c - q_lo) * g;
    }
    prof.splice_radius = splice + 1 < m ? rs : 0.0;

    pt.outcome = lo.outcome;
    pt.outcome.kind = OutcomeKind::Decay;
    pt.outcome.radius = rmax;
    pt.outcome.zero_radii.clear();
    pt.outcome.note = "tail spliced at r = " + format_double(rs);
    finalize_point(pt, params);

    pt.certified = true;
    if (!(pt.residuals.decay_margin <= ctrl.decay_margin_tol)) {
        pt.certified = false;
        pt.note = "decay margin above tolerance";
    }
    if (pt.zero_count != s.zero_count && s.zero_count >= 0) {
        pt.certified = false;
        pt.note = "zero count of the spliced profile disagrees with the bracketing classes";
    }
    if (rs < 1.0 / k) {
        pt.certified = false;
        pt.note = "bracketing trajectories separate before r = 1/sqrt(lambda)";
    }
    return pt;
}

bool sort_by_branch(const BranchPoint& x, const BranchPoint& y)
{
    if (x.zero_count != y.zero_count) return x.zero_count < y.zero_count;
    return x.a < y.a;
}

}  // namespace

double profile_d_norm2(const RadialProfile& profile, double beta_value)
{
    const Params& pr = profile.params;
    const int d = pr.d;
    const double lam = pr.lambda;
    const double q = profile.q;
    const double area = sphere_area(d);
    const auto& r = profile.grid.radii;
    std::vector<double> g(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double fp = profile.du[i] - (q != 0.0 ? q * green_deriv(d, lam, r[i]) : 0.0);
        g[i] = (fp * fp + lam * profile.f[i] * profile.f[i]) * area * std::pow(r[i], d - 1);
    }
    double total = trapezoid(r, g);
    const LocalExpansion ex = local_expansion(pr, q, profile.a);
    const double c = ex.kind == SingularKind::Power ? 5.0 - 2.0 * pr.p : static_cast<double>(d);
    total += inner_cell(
        [&](double x) {
            const double fp = ex.deriv(x);
            const double fv = ex.value(x);
            return (fp * fp + lam * fv * fv) * area * std::pow(x, d - 1);
        },
        r.front(), c);
    return total + beta_value * q * q;
}

double profile_power_integral(const RadialProfile& profile)
{
    const Params& pr = profile.params;
    const int d = pr.d;
    const double lam = pr.lambda;
    const double q = profile.q;
    const double p = pr.p;
    const double area = sphere_area(d);
    const auto& r = profile.grid.radii;
    std::vector<double> g(r.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        g[i] = std::pow(std::abs(profile.u[i]), p + 1.0) * area * std::pow(r[i], d - 1);
    double total = trapezoid(r, g);
    const LocalExpansion ex = local_expansion(pr, q, profile.a);
    const double c = d == 2 ? 2.0 : (q != 0.0 ? 2.0 - p : 3.0);
    total += inner_cell(
        [&](double x) {
            const double u = ex.value(x) + (q != 0.0 ? q * green(d, lam, x) : 0.0);
            if (u == 0.0) return 0.0;
            return std::exp((p + 1.0) * std::log(std::abs(u)) + (d - 1) * std::log(x) + std::log(area));
        },
        r.front(), c);
    return total;
}

void finalize_point(BranchPoint& pt, const Params& params)
{
    RadialProfile& prof = pt.profile;
    prof.params = params;
    prof.q = pt.q;
    prof.a = pt.a;
    pt.zero_count = count_zeros(prof) + (pt.outcome.origin_sign_change ? 1 : 0);
    pt.residuals.ode = ode_residual(prof);

    if (effective_regime(params) == Regime::Weak) {
        pt.f0.reset();
        pt.alpha_kind = AlphaKind::Unconstrained;
        pt.alpha = std::numeric_limits<double>::quiet_NaN();
        return;
    }
    const double f0 = prof.f.front() - regular_term(params, pt.q, pt.a, prof.grid.radii.front()).value;
    pt.f0 = f0;
    double b = 0.0;
    if (pt.q == 0.0) {
        pt.alpha_kind = AlphaKind::Free;
        pt.alpha = std::numeric_limits<double>::quiet_NaN();
    } else {
        pt.alpha_kind = AlphaKind::Finite;
        pt.alpha = alpha_from_charge(pt.q, f0, params.lambda, params.d);
        b = beta(params.d, pt.alpha, params.lambda);
        pt.residuals.relation = std::abs(f0 - b * pt.q);
    }
    pt.d_norm2 = profile_d_norm2(prof, b);
    const double sig = params.nonlinear ? params.sigma : 0.0;
    pt.lp_norm = profile_power_integral(prof);
    pt.action = 0.5 * pt.d_norm2 - sig * pt.lp_norm / (params.p + 1.0);
    pt.residuals.nehari = std::abs(pt.d_norm2 - sig * pt.lp_norm) / std::abs(pt.d_norm2);
}

std::vector<BranchPoint> match_decay(const Params& params, double q, const ShootControls& ctrl)
{
    params.validate();
    if (regime_classify(params.d, params.p) == Regime::OutOfRange)
        throw ShootingRejected("match_decay: (d, p) out of range");
    const int max_branch = params.sigma < 0 ? 0 : ctrl.max_branch;
    const bool auto_bracket = std::isnan(ctrl.a_lo) || std::isnan(ctrl.a_hi);
    double a_lo = ctrl.a_lo, a_hi = ctrl.a_hi;
    if (auto_bracket) {
        const double r0 = resolved_r0(params, ctrl.integ);
        const double b = 10.0 * (1.0 + std::abs(q) * green(params.d, params.lambda, r0));
        a_lo = -b;
        a_hi = b;
    }
    if (!(a_hi > a_lo)) throw std::invalid_argument("match_decay: empty a-bracket");

    const Line line = [q](double t) { return std::pair<double, double>{q, t}; };
    std::vector<BranchPoint> points;
    for (int widen = 0; widen <= (auto_bracket ? ctrl.max_widen : 0); ++widen) {
        Search search(params, ctrl, line, max_branch);
        std::vector<double> ts(static_cast<std::size_t>(std::max(ctrl.scan_points, 2)));
        const double sc = ctrl.scan_scale;
        const double s_lo = std::asinh(a_lo / sc), s_hi = std::asinh(a_hi / sc);
        for (std::size_t i = 0; i < ts.size(); ++i)
            ts[i] = sc * std::sinh(s_lo + (s_hi - s_lo) * static_cast<double>(i) / static_cast<double>(ts.size() - 1));
        ts.front() = a_lo;
        ts.back() = a_hi;
        search.scan(ts);
        for (const auto& s : search.found) {
            if (s.exact && q == 0.0 && line(s.t_lo).second == 0.0) continue;  // the zero solution
            BranchPoint pt = build_point(params, ctrl, line, s);
            if (pt.zero_count <= max_branch || !pt.certified) points.push_back(std::move(pt));
        }
        if (!points.empty()) break;
        a_lo *= 4.0;
        a_hi *= 4.0;
    }
    std::sort(points.begin(), points.end(), sort_by_branch);
    return points;
}

FixedAlphaResult solve_fixed_alpha(const Params& params, int k, const ShootControls& ctrl)
{
    params.validate();
    if (k < 0) throw std::invalid_argument("solve_fixed_alpha: k must be >= 0");
    if (params.alpha.is_free()) throw ShootingRejected("solve_fixed_alpha: alpha must be finite");
    if (regime_classify(params.d, params.p) != Regime::Strong)
        throw ShootingRejected("solve_fixed_alpha: alpha is only determined in the strong regime");
    const double lam_a = lambda_alpha(params);
    if (k == 0 && params.lambda <= lam_a)
        throw ShootingRejected("no positive solution for lambda <= lambda_alpha (lambda = " +
                               format_double(params.lambda) + ", lambda_alpha = " + format_double(lam_a) + ")");
    if (!(ctrl.q_hi > ctrl.q_lo) || !(ctrl.q_lo > 0))
        throw std::invalid_argument("solve_fixed_alpha: need 0 < q_lo < q_hi");

    const double b = beta(params, params.lambda);
    const Line line = [b](double t) {
        const double q = std::exp(t);
        return std::pair<double, double>{q, b * q};
    };
    FixedAlphaResult res;
    res.q_scan_lo = ctrl.q_lo;
    res.q_scan_hi = ctrl.q_hi;
    const double t_lo = std::log(ctrl.q_lo), t_hi = std::log(ctrl.q_hi);
    const int n = std::max(2, static_cast<int>(std::ceil((t_hi - t_lo) / std::log(10.0) * ctrl.q_per_decade)) + 1);
    std::vector<double> ts(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ts[static_cast<std::size_t>(i)] = t_lo + (t_hi - t_lo) * i / (n - 1);

    Search search(params, ctrl, line, k);
    search.scan(ts);
    for (const auto& s : search.found) {
        if (s.zero_count >= 0 && s.zero_count != k) continue;
        BranchPoint pt = build_point(params, ctrl, line, s);
        if (pt.zero_count != k) continue;
        pt.alpha_kind = AlphaKind::Finite;
        pt.alpha = params.alpha.value();
        pt.residuals.relation = std::abs(*pt.f0 - b * pt.q);
        res.separators.push_back(std::move(pt));
    }
    std::sort(res.separators.begin(), res.separators.end(),
              [](const BranchPoint& x, const BranchPoint& y) { return x.q < y.q; });
    for (const auto& pt : res.separators) {
        if (pt.certified) {
            res.found = true;
            res.point = pt;
            break;
        }
    }
    if (!res.found)
        res.message = "no certified zero_count = " + std::to_string(k) + " solution for q in [" +
                      format_double(ctrl.q_lo) + ", " + format_double(ctrl.q_hi) + "]";
    return res;
}

std::vector<double> geometric_q_grid(double q_lo, double q_hi, int n)
{
    if (n < 1 || q_lo == 0.0 || q_hi == 0.0 || (q_lo > 0) != (q_hi > 0))
        throw std::invalid_argument("geometric_q_grid: need same-sign nonzero ends and n >= 1");
    std::vector<double> qs(static_cast<std::size_t>(n));
    const double s = q_lo > 0 ? 1.0 : -1.0;
    const double l0 = std::log(std::abs(q_lo)), l1 = std::log(std::abs(q_hi));
    for (int i = 0; i < n; ++i)
        qs[static_cast<std::size_t>(i)] = s * std::exp(n == 1 ? l0 : l0 + (l1 - l0) * i / (n - 1));
    qs.front() = q_lo;
    if (n > 1) qs.back() = q_hi;
    return qs;
}

std::vector<BranchRow> branch_scan(const Params& params, const std::vector<double>& q_values, int k,
                                   const ShootControls& ctrl)
{
    if (regime_classify(params.d, params.p) != Regime::Strong)
        throw ShootingRejected("branch_scan: the alpha column needs the strong regime");
    ShootControls c = ctrl;
    c.max_branch = k;
    std::vector<BranchRow> rows;
    for (double q : q_values) {
        BranchRow row;
        row.q = q;
        try {
            if (q == 0.0) throw std::invalid_argument("q = 0 is excluded from branch scans");
            const auto pts = match_decay(params, q, c);
            const BranchPoint* best = nullptr;
            for (const auto& pt : pts) {
                if (pt.zero_count != k || !pt.certified) continue;
                ++row.candidates;
                if (!best || std::abs(pt.a) > std::abs(best->a)) best = &pt;
            }
            if (best) {
                row.ok = true;
                row.point = *best;
            } else {
                row.error = "no certified zero_count = " + std::to_string(k) + " separator";
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

BranchPoint ground_state_shoot(const Params& params, const ShootControls& ctrl)
{
    if (params.sigma != 1) throw ShootingRejected("ground states are computed for sigma = +1 only");
    FixedAlphaResult res = solve_fixed_alpha(params, 0, ctrl);
    if (!res.found) throw std::runtime_error("ground_state_shoot: " + res.message);
    BranchPoint pt = std::move(res.point);
    const auto& u = pt.profile.u;
    const auto& du = pt.profile.du;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(u[i] > 0)) throw std::runtime_error("ground_state_shoot: profile not positive");
        if (!(du[i] < 0)) throw std::runtime_error("ground_state_shoot: profile not strictly decreasing");
    }
    if (!(std::abs(pt.q) > 1e-8 * std::sqrt(pt.d_norm2)))
        throw std::runtime_error("ground_state_shoot: charge not certified nonzero");
    return pt;
}

BranchPoint negate(const BranchPoint& pt)
{
    BranchPoint out = pt;
    out.q = -pt.q;
    out.a = -pt.a;
    if (pt.f0) out.f0 = -*pt.f0;
    out.profile.q = -pt.profile.q;
    out.profile.a = -pt.profile.a;
    for (auto& v : out.profile.u) v = -v;
    for (auto& v : out.profile.du) v = -v;
    for (auto& v : out.profile.f) v = -v;
    return out;
}

}  // namespace ptint
