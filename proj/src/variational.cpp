#include "ptint/variational.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ptint/greens.hpp"
#include "ptint/kernels.hpp"
#include "ptint/quadrature.hpp"

namespace ptint {

namespace {

void require_strong(const Params& params, const char* who)
{
    params.validate();
    if (regime_classify(params.d, params.p) != Regime::Strong)
        throw VariationalRejected(std::string(who) + ": |G|^{p+1} is not integrable outside the strong regime");
    if (params.alpha.is_free()) throw VariationalRejected(std::string(who) + ": alpha must be finite");
}

void require_same_grid(const DiscreteState& x, const DiscreteState& y)
{
    if (x.grid != y.grid) throw std::invalid_argument("states live on different grids");
}

double beta_of(const Params& params) { return beta(params, params.lambda); }

// u at the quadrature points
std::vector<double> quad_u(const DiscreteState& x)
{
    const VarGrid& g = *x.grid;
    const std::size_t m = g.qcell.size();
    std::vector<double> u(m);
    for (std::size_t j = 0; j < m; ++j) {
        const std::uint32_t c = g.qcell[j];
        u[j] = g.qphi0[j] * x.f[c] + g.qphi1[j] * x.f[c + 1] + x.q * g.qgreen[j];
    }
    return u;
}

// K f for the stiffness-plus-mass matrix (nodes 0..N-1, f_N pinned to 0)
std::vector<double> stiffness_apply(const VarGrid& g, const std::vector<double>& f)
{
    const std::size_t n = g.nodes();
    std::vector<double> out(n, 0.0);
    kernels::diff_energy_grad(g.c, f, out);
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * out[i] + g.lambda * g.w[i] * f[i];
    out[n - 1] = 0.0;
    return out;
}

}  // namespace

std::shared_ptr<const VarGrid> VarGrid::make(int d, double lambda, double p, const VarGridOptions& opts)
{
    if (d != 2 && d != 3) throw std::invalid_argument("VarGrid: d must be 2 or 3");
    if (!(lambda > 0) || !(opts.r1 > 0) || !(opts.ratio > 1) || !(opts.h > 0) || !(opts.R > opts.r1))
        throw std::invalid_argument("VarGrid: bad options");
    auto grid = std::make_shared<VarGrid>();
    VarGrid& g = *grid;
    g.d = d;
    g.lambda = lambda;
    g.p = p;
    const double s = 1.0 / std::sqrt(lambda);
    const double R = opts.R * s, h = opts.h * s;
    g.r.push_back(0.0);
    double r = opts.r1 * s;
    g.r.push_back(r);
    while (r * (opts.ratio - 1.0) < h && r * opts.ratio < R) {
        r *= opts.ratio;
        g.r.push_back(r);
    }
    const auto n = static_cast<std::size_t>(std::ceil((R - r) / h));
    const double hu = (R - r) / static_cast<double>(n);
    for (std::size_t i = 1; i < n; ++i) g.r.push_back(r + static_cast<double>(i) * hu);
    g.r.push_back(R);

    const double area = sphere_area(d);
    const std::size_t nodes = g.r.size();
    g.c.resize(nodes - 1);
    for (std::size_t i = 0; i + 1 < nodes; ++i) {
        const double rm = 0.5 * (g.r[i] + g.r[i + 1]);
        g.c[i] = area * std::pow(rm, d - 1) / (g.r[i + 1] - g.r[i]);
    }
    g.w.resize(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        const double lo = i == 0 ? 0.0 : 0.5 * (g.r[i - 1] + g.r[i]);
        const double hi = i + 1 == nodes ? g.r[i] : 0.5 * (g.r[i] + g.r[i + 1]);
        g.w[i] = area * (std::pow(hi, d) - std::pow(lo, d)) / d;
    }

    auto add_point = [&](std::uint32_t cell, double x, double wq) {
        const double a = g.r[cell], b = g.r[cell + 1];
        g.qcell.push_back(cell);
        g.qphi1.push_back((x - a) / (b - a));
        g.qphi0.push_back((b - x) / (b - a));
        g.qgreen.push_back(green(d, lambda, x));
        g.qlogw.push_back(std::log(wq * area) + (d - 1) * std::log(x));
    };
    // first cell: r g(r) ~ r^2 log^{p+1} (d = 2) or r^{2-p} (d = 3)
    const double c_exp = d == 2 ? 2.0 : std::max(2.0 - p, 0.05);
    const quad::Rule first = quad::singular_cell_rule(g.r[1], c_exp, opts.singular_points);
    for (std::size_t j = 0; j < first.nodes.size(); ++j) add_point(0, first.nodes[j], first.weights[j]);
    const quad::Rule& gl = quad::gauss_legendre_unit(opts.gauss_points);
    for (std::size_t i = 1; i + 1 < nodes; ++i) {
        const double a = g.r[i], b = g.r[i + 1];
        for (std::size_t j = 0; j < gl.nodes.size(); ++j)
            add_point(static_cast<std::uint32_t>(i), a + (b - a) * gl.nodes[j], (b - a) * gl.weights[j]);
    }
    return grid;
}

DiscreteState DiscreteState::zero(std::shared_ptr<const VarGrid> grid)
{
    DiscreteState x;
    x.f.assign(grid->nodes(), 0.0);
    x.grid = std::move(grid);
    return x;
}

std::vector<double> DiscreteState::u_nodes() const
{
    std::vector<double> u(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double r = grid->r[i];
        if (r == 0.0) u[i] = q == 0.0 ? f[i] : std::numeric_limits<double>::quiet_NaN();
        else u[i] = f[i] + (q == 0.0 ? 0.0 : q * green(grid->d, grid->lambda, r));
    }
    return u;
}

DiscreteState operator*(double s, const DiscreteState& x)
{
    DiscreteState y = x;
    for (auto& v : y.f) v *= s;
    y.q *= s;
    return y;
}

DiscreteState operator+(const DiscreteState& x, const DiscreteState& y)
{
    require_same_grid(x, y);
    DiscreteState z = x;
    kernels::axpy(1.0, y.f, z.f);
    z.q += y.q;
    return z;
}

DiscreteState operator-(const DiscreteState& x) { return -1.0 * x; }

FunctionalParts functional_parts(const Params& params, const DiscreteState& x)
{
    require_strong(params, "action");
    const VarGrid& g = *x.grid;
    if (x.f.size() != g.nodes()) throw std::invalid_argument("state size does not match its grid");
    FunctionalParts parts;
    parts.quad_f = kernels::diff_energy(g.c, x.f) + g.lambda * kernels::wdot(g.w, x.f, x.f);
    parts.charge = beta_of(params) * x.q * x.q;
    if (params.nonlinear) {
        const std::vector<double> u = quad_u(x);
        double s = 0.0;
        for (std::size_t j = 0; j < u.size(); ++j)
            if (u[j] != 0.0) s += std::exp(g.qlogw[j] + (params.p + 1.0) * std::log(std::abs(u[j])));
        parts.power = s;
    }
    return parts;
}

double action(const Params& params, const DiscreteState& x)
{
    const FunctionalParts parts = functional_parts(params, x);
    return 0.5 * parts.d_norm2() - params.sigma * parts.power / (params.p + 1.0);
}

DiscreteState action_gradient(const Params& params, const DiscreteState& x)
{
    require_strong(params, "action_gradient");
    const VarGrid& g = *x.grid;
    DiscreteState grad = DiscreteState::zero(x.grid);
    grad.f = stiffness_apply(g, x.f);
    grad.q = beta_of(params) * x.q;
    if (params.nonlinear) {
        const std::vector<double> u = quad_u(x);
        const double p = params.p;
        const double sig = params.sigma;
        for (std::size_t j = 0; j < u.size(); ++j) {
            if (u[j] == 0.0) continue;
            const double lt = g.qlogw[j] + p * std::log(std::abs(u[j]));
            const double t = sig * std::copysign(std::exp(lt), u[j]);
            const std::uint32_t c = g.qcell[j];
            grad.f[c] -= t * g.qphi0[j];
            grad.f[c + 1] -= t * g.qphi1[j];
            grad.q -= sig * std::copysign(std::exp(lt + std::log(g.qgreen[j])), u[j]);
        }
    }
    grad.f.back() = 0.0;
    return grad;
}

double pairing(const DiscreteState& g, const DiscreteState& x)
{
    require_same_grid(g, x);
    return kernels::dot(g.f, x.f) + g.q * x.q;
}

double d_inner(const Params& params, const DiscreteState& x, const DiscreteState& y)
{
    require_same_grid(x, y);
    const VarGrid& g = *x.grid;
    const std::vector<double> ky = stiffness_apply(g, y.f);
    std::vector<double> fx = x.f;
    fx.back() = 0.0;
    return kernels::dot(fx, ky) + beta_of(params) * x.q * y.q;
}

DiscreteState riesz(const Params& params, const DiscreteState& cot)
{
    const double b = beta_of(params);
    if (!(b > 0)) throw std::domain_error("riesz: the D form is not positive (lambda <= lambda_alpha)");
    const VarGrid& g = *cot.grid;
    const std::size_t n = g.nodes() - 1;  // unknowns 0..N-1
    std::vector<double> diag(n), off(n), rhs(cot.f.begin(), cot.f.begin() + static_cast<std::ptrdiff_t>(n));
    for (std::size_t i = 0; i < n; ++i) {
        diag[i] = g.c[i] + (i > 0 ? g.c[i - 1] : 0.0) + g.lambda * g.w[i];
        off[i] = -g.c[i];  // couples i and i+1
    }
    // Thomas elimination
    for (std::size_t i = 1; i < n; ++i) {
        const double m = off[i - 1] / diag[i - 1];
        diag[i] -= m * off[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    DiscreteState out = DiscreteState::zero(cot.grid);
    out.f[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) out.f[i] = (rhs[i] - off[i] * out.f[i + 1]) / diag[i];
    out.q = cot.q / b;
    return out;
}

double nehari_factor(const Params& params, const DiscreteState& x)
{
    if (params.sigma != 1) throw std::domain_error("nehari_project: needs sigma = +1");
    const FunctionalParts parts = functional_parts(params, x);
    if (!(parts.power > 0)) throw std::domain_error("nehari_project: zero state");
    if (!(parts.d_norm2() > 0)) throw std::domain_error("nehari_project: D^2 <= 0");
    return std::pow(parts.d_norm2() / parts.power, 1.0 / (params.p - 1.0));
}

DiscreteState nehari_project(const Params& params, const DiscreteState& x)
{
    return nehari_factor(params, x) * x;
}

FunctionalReport functional_report(const Params& params, const DiscreteState& x)
{
    const FunctionalParts parts = functional_parts(params, x);
    FunctionalReport rep;
    rep.action = 0.5 * parts.d_norm2() - params.sigma * parts.power / (params.p + 1.0);
    rep.d_norm = std::sqrt(std::max(parts.d_norm2(), 0.0));
    rep.lp_norm = std::pow(parts.power, 1.0 / (params.p + 1.0));
    const DiscreteState grad = action_gradient(params, x);
    if (beta_of(params) > 0) rep.grad_norm = std::sqrt(std::max(pairing(grad, riesz(params, grad)), 0.0));
    else rep.grad_norm = std::sqrt(pairing(grad, grad));  // Euclidean when the D form is indefinite
    const double sig = params.nonlinear ? params.sigma : 0.0;
    rep.nehari_residual =
        parts.d_norm2() != 0.0 ? std::abs(parts.d_norm2() - sig * parts.power) / std::abs(parts.d_norm2()) : 0.0;
    return rep;
}

MinimizeResult minimize_ground_state(const Params& params, const DiscreteState& init, const MinimizeOptions& opts)
{
    require_strong(params, "minimize_ground_state");
    if (params.sigma != 1) throw VariationalRejected("minimize_ground_state: needs sigma = +1");
    if (!params.nonlinear) throw VariationalRejected("minimize_ground_state: needs the nonlinear term");
    const double lam_a = lambda_alpha(params);
    if (!(params.lambda > lam_a))
        throw VariationalRejected("minimize_ground_state: lambda <= lambda_alpha (lambda = " +
                                  format_double(params.lambda) + ", lambda_alpha = " + format_double(lam_a) + ")");

    MinimizeResult res;
    DiscreteState x = nehari_project(params, init);
    double s_cur = action(params, x);
    DiscreteState grad = action_gradient(params, x);
    DiscreteState g = riesz(params, grad);
    double gn2 = pairing(grad, g);
    double tau = opts.initial_step;
    for (int it = 0;; ++it) {
        const double dn = std::sqrt(d_inner(params, x, x));
        const double gnorm = std::sqrt(std::max(gn2, 0.0));
        res.trace.push_back({s_cur, gnorm});
        res.iterations = it;
        if (gnorm <= opts.gtol * dn) {
            res.converged = true;
            res.message = "converged";
            break;
        }
        if (it >= opts.max_iter) {
            res.message = "iteration cap reached";
            break;
        }
        bool accepted = false;
        DiscreteState xt;
        double st = 0.0;
        for (int bt = 0; bt < 60; ++bt) {
            xt = nehari_project(params, x + (-tau) * g);
            st = action(params, xt);
            if (st <= s_cur - opts.armijo * tau * gn2 + 1e-14 * std::abs(s_cur)) {
                accepted = true;
                break;
            }
            tau *= 0.5;
        }
        if (!accepted) {
            res.message = "line search failed";
            break;
        }
        const DiscreteState grad_t = action_gradient(params, xt);
        const DiscreteState s = xt + (-x);
        const DiscreteState y = grad_t + (-grad);
        const double sy = pairing(y, s);
        const double ss = d_inner(params, s, s);
        tau = sy > 0 ? std::clamp(ss / sy, 1e-8, 1e8) : 2.0 * tau;
        x = std::move(xt);
        s_cur = st;
        grad = grad_t;
        g = riesz(params, grad);
        gn2 = pairing(grad, g);
    }
    res.report = functional_report(params, x);
    res.state = std::move(x);
    return res;
}

DiscreteState bump_seed(const Params& params, std::shared_ptr<const VarGrid> grid, double amplitude, double q)
{
    DiscreteState x = DiscreteState::zero(std::move(grid));
    const double k = std::sqrt(params.lambda);
    for (std::size_t i = 0; i + 1 < x.f.size(); ++i) {
        const double z = k * x.grid->r[i];
        x.f[i] = amplitude * std::exp(-z * z);
    }
    x.q = q;
    return x;
}

DiscreteState state_from_profile(const RadialProfile& profile, std::shared_ptr<const VarGrid> grid)
{
    DiscreteState x = DiscreteState::zero(std::move(grid));
    const auto& rp = profile.grid.radii;
    const auto& fp = profile.f;
    if (rp.empty()) throw std::invalid_argument("state_from_profile: empty profile");
    const double f0 = [&] {
        const RegularTerm s0 = start_data(profile.params, profile.q, profile.a, rp.front());
        return fp.front() - (s0.value - profile.a);
    }();
    for (std::size_t i = 0; i + 1 < x.f.size(); ++i) {
        const double r = x.grid->r[i];
        if (r <= rp.front()) {
            x.f[i] = f0;
        } else if (r >= rp.back()) {
            x.f[i] = 0.0;
        } else {
            const auto it = std::upper_bound(rp.begin(), rp.end(), r);
            const std::size_t j = static_cast<std::size_t>(it - rp.begin());
            const double t = (r - rp[j - 1]) / (rp[j] - rp[j - 1]);
            x.f[i] = (1 - t) * fp[j - 1] + t * fp[j];
        }
    }
    x.q = profile.q;
    return x;
}

std::vector<DiscreteState> random_directions(std::shared_ptr<const VarGrid> grid, int n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> centre(0.0, 4.0), width(0.5, 2.0);
    const double s = 1.0 / std::sqrt(grid->lambda);
    std::vector<DiscreteState> dirs;
    for (int k = 0; k < n; ++k) {
        DiscreteState x = DiscreteState::zero(grid);
        for (int b = 0; b < 3; ++b) {
            const double amp = normal(rng), c = centre(rng) * s, w = width(rng) * s;
            for (std::size_t i = 0; i + 1 < x.f.size(); ++i) {
                const double z = (grid->r[i] - c) / w;
                x.f[i] += amp * std::exp(-z * z);
            }
        }
        x.q = normal(rng);
        dirs.push_back(std::move(x));
    }
    return dirs;
}

DiscreteState normalize_direction(const Params& params, const DiscreteState& x)
{
    const double n2 = d_inner(params, x, x);
    if (!(n2 > 0)) throw std::domain_error("normalize_direction: D^2 <= 0");
    return (1.0 / std::sqrt(n2)) * x;
}

GeometryReport mountain_pass_probe(const Params& params, const std::vector<DiscreteState>& directions,
                                   const std::vector<double>& radii)
{
    require_strong(params, "mountain_pass_probe");
    if (!std::is_sorted(radii.begin(), radii.end()))
        throw std::invalid_argument("mountain_pass_probe: radii must be ascending");
    GeometryReport rep;
    rep.radii = radii;
    rep.min_values.assign(radii.size(), std::numeric_limits<double>::infinity());
    rep.all_rays_negative = true;
    double best_level = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < directions.size(); ++k) {
        DirectionProbe dp;
        dp.d_norm2 = d_inner(params, directions[k], directions[k]);
        if (!(dp.d_norm2 > 0)) {
            dp.normalizable = false;
            ++rep.non_normalizable;
            rep.all_rays_negative = false;
            rep.directions.push_back(std::move(dp));
            continue;
        }
        const DiscreteState g = (1.0 / std::sqrt(dp.d_norm2)) * directions[k];
        for (std::size_t j = 0; j < radii.size(); ++j) {
            const double v = action(params, radii[j] * g);
            dp.values.push_back(v);
            rep.min_values[j] = std::min(rep.min_values[j], v);
        }
        // smallest R with S(R g) < 0: doubling, then bisection on the sign change
        double hi = 1.0;
        while (action(params, hi * g) >= 0.0 && hi < 1e12) hi *= 2.0;
        if (action(params, hi * g) < 0.0) {
            double lo = hi > 1.0 ? 0.5 * hi : 0.0;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (action(params, mid * g) < 0.0) hi = mid;
                else lo = mid;
            }
            dp.r_star = hi;
            double mx = 0.0;
            constexpr int kSamples = 400;
            for (int i = 1; i <= kSamples; ++i) mx = std::max(mx, action(params, (hi * i / kSamples) * g));
            dp.ray_max = mx;
            if (mx < best_level) {
                best_level = mx;
                rep.best_direction = static_cast<int>(k);
            }
        } else {
            rep.all_rays_negative = false;
        }
        rep.directions.push_back(std::move(dp));
    }
    if (rep.best_direction >= 0) rep.mountain_pass_level = best_level;
    rep.rho_star = 0.0;
    if (rep.non_normalizable == 0 && !directions.empty()) {
        for (std::size_t j = 0; j < radii.size(); ++j) {
            if (!(rep.min_values[j] > 0)) break;
            rep.rho_star = radii[j];
        }
    }
    rep.small_sphere_positive = rep.rho_star > 0;
    return rep;
}

}  // namespace ptint
