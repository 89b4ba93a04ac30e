#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <functional>

#include "ptint/greens.hpp"
#include "ptint/radial_ode.hpp"

using namespace ptint;

namespace {

Params linear(int d, double lam)
{
    Params p;
    p.d = d;
    p.p = d == 2 ? 3.0 : 1.5;
    p.lambda = lam;
    p.nonlinear = false;
    return p;
}

Params focusing(int d, double p_exp, double lam = 1.0)
{
    Params p;
    p.d = d;
    p.p = p_exp;
    p.lambda = lam;
    p.alpha = Alpha::finite(0.0);
    return p;
}

// regular solution of the linear equation with f(0) = 1
double regular_linear(int d, double lam, double r)
{
    const double z = std::sqrt(lam) * r;
    return d == 2 ? boost::math::cyl_bessel_i(0, z) : std::sinh(z) / z;
}

RadialProfile synthetic(std::function<double(double)> u, std::function<double(double)> du, double r0, double r1,
                        int n)
{
    RadialProfile pr;
    pr.params = linear(2, 1.0);
    for (int i = 0; i < n; ++i) {
        const double r = r0 + (r1 - r0) * i / (n - 1);
        pr.grid.radii.push_back(r);
        pr.u.push_back(u(r));
        pr.du.push_back(du(r));
        pr.f.push_back(u(r));
    }
    return pr;
}

}  // namespace

TEST_CASE("ode_rhs")
{
    for (int d : {2, 3})
        for (double r : {0.01, 0.5, 3.0}) {
            const auto p = linear(d, 1.0);
            const double want = green_deriv2(d, 1.0, r);
            CHECK(ode_rhs(p, r, green(d, 1.0, r), green_deriv(d, 1.0, r)) == doctest::Approx(want).epsilon(1e-12));
        }
    CHECK(ode_rhs(focusing(2, 3), 0.7, 0.0, 0.0) == 0.0);
    CHECK(ode_rhs(focusing(2, 3), 1.0, 1.0, 0.0) == 0.0);
    CHECK(ode_rhs(focusing(3, 1.5), 2.0, -1.0, 0.5) == doctest::Approx(-0.5 - 1.0 + 1.0));
}

TEST_CASE("local expansion coefficients")
{
    auto e = local_expansion(focusing(3, 2.0), 1.0, 0.3);
    CHECK(e.kind == SingularKind::Log);
    CHECK(e.A == doctest::Approx(-1 / (16 * kPi * kPi)).epsilon(1e-14));
    CHECK(e.value(0.5) == doctest::Approx(0.3 + e.A * std::log(0.5)));
    e = local_expansion(focusing(3, 2.5), 1.0, 0.0);
    CHECK(e.kind == SingularKind::Power);
    CHECK(e.A == doctest::Approx(4 * std::pow(4 * kPi, -2.5)).epsilon(1e-14));
    CHECK(e.A > 0);
    // odd in q
    CHECK(local_expansion(focusing(3, 2.5), -1.0, 0.0).A == doctest::Approx(-e.A));
    e = local_expansion(focusing(2, 5.0), 2.0, 1.0);
    CHECK(e.kind == SingularKind::None);
    CHECK(e.A == 0.0);
    CHECK_THROWS_AS(local_expansion(focusing(3, 3.0), 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("regular term closed forms")
{
    // constant source lambda a
    for (double lam : {0.5, 2.0}) {
        const double a = 0.7, r = 1e-3;
        auto w = regular_term(linear(2, lam), 1.0, a, r);
        CHECK(w.value == doctest::Approx(lam * a * r * r / 4).epsilon(1e-10));
        CHECK(w.deriv == doctest::Approx(lam * a * r / 2).epsilon(1e-10));
        w = regular_term(linear(3, lam), 1.0, a, r);
        CHECK(w.value == doctest::Approx(lam * a * r * r / 6).epsilon(1e-10));
        CHECK(w.deriv == doctest::Approx(lam * a * r / 3).epsilon(1e-10));
    }
    // d = 3, p < 2: leading term q^p r^{2-p} / ((4 pi)^p (2-p)(3-p))
    const double p = 1.5;
    const auto prm = focusing(3, p);
    const auto e = local_expansion(focusing(3, p), 1.0, 0.0);
    double prev = 1;
    for (double r : {1e-3, 1e-4, 1e-5}) {
        const double ratio = regular_term(prm, 1.0, 0.0, r).value / (e.A * std::pow(r, 2 - p));
        CHECK(std::abs(ratio - 1) < prev);
        prev = std::abs(ratio - 1);
    }
    CHECK(prev < 1e-4);
    CHECK_THROWS_AS(regular_term(focusing(3, 2.5), 1.0, 0.0, 1e-4), std::invalid_argument);
    // start data: a + w in the strong regime
    const auto sd = start_data(focusing(2, 3), 1.0, 0.2, 1e-6);
    CHECK(sd.value == doctest::Approx(0.2 + regular_term(focusing(2, 3), 1.0, 0.2, 1e-6).value).epsilon(1e-15));
}

TEST_CASE("linear mode reproduces the green function")
{
    for (int d : {2, 3})
        for (double lam : {0.25, 1.0, 4.0}) {
            const auto res = integrate(linear(d, lam), 1.0, 0.0);
            CHECK(res.outcome.kind == OutcomeKind::Decay);
            CHECK(res.outcome.zeros == 0);
            double err = 0;
            for (std::size_t i = 0; i < res.profile.size(); ++i) {
                const double r = res.profile.grid.radii[i];
                err = std::max(err, std::abs(res.profile.u[i] / green(d, lam, r) - 1));
            }
            CHECK(err <= 1e-8);
        }
}

TEST_CASE("linear regular component against the closed form")
{
    IntegrateControls c;
    c.stop_on_negative_energy = false;
    c.r_max = 6.0;
    for (int d : {2, 3})
        for (double lam : {0.25, 1.0, 4.0}) {
            const double a = 0.3;
            const auto res = integrate(linear(d, lam), 1.0, a, c);
            const auto& pr = res.profile;
            double err = 0;
            for (std::size_t i = 0; i < pr.size(); ++i)
                err = std::max(err, std::abs(pr.f[i] / (a * regular_linear(d, lam, pr.grid.radii[i])) - 1));
            CHECK(pr.grid.radii.back() > 2.0);
            CHECK(err <= 1e-8);
        }
}

TEST_CASE("zero data gives the zero profile")
{
    const auto res = integrate(focusing(2, 3), 0.0, 0.0);
    for (double v : res.profile.u) CHECK(v == 0.0);
    CHECK(res.outcome.zeros == 0);
    const auto ly = lyapunov_monitor(res.profile);
    for (double e : ly.energy) CHECK(e == 0.0);
}

TEST_CASE("large data in the absorbing case escapes with its sign")
{
    auto p = focusing(2, 3);
    p.sigma = -1;
    CHECK(integrate(p, 1.0, 1e6).outcome.kind == OutcomeKind::BlowUpPlus);
    CHECK(integrate(p, 1.0, -1e6).outcome.kind == OutcomeKind::BlowUpMinus);
    // the focusing flow oscillates instead of escaping
    const auto osc = integrate(focusing(2, 3), 1.0, 1e6);
    CHECK(osc.outcome.kind == OutcomeKind::Undetermined);
    CHECK(osc.outcome.zeros > 10);
}

TEST_CASE("sign equivariance")
{
    for (auto prm : {focusing(2, 3), focusing(3, 1.5), focusing(3, 2.5)}) {
        IntegrateControls c;
        c.r_max = 8.0;
        const auto x = integrate(prm, 0.8, 0.37, c), y = integrate(prm, -0.8, -0.37, c);
        REQUIRE(x.profile.size() == y.profile.size());
        CHECK(x.outcome.zeros == y.outcome.zeros);
        for (std::size_t i = 0; i < x.profile.size(); ++i) {
            CHECK(x.profile.grid.radii[i] == y.profile.grid.radii[i]);
            CHECK(x.profile.u[i] == -y.profile.u[i]);
        }
        if (x.outcome.kind == OutcomeKind::BlowUpPlus) CHECK(y.outcome.kind == OutcomeKind::BlowUpMinus);
    }
}

TEST_CASE("lyapunov monitor")
{
    // regular positive start, focusing: E' = -(d-1) u'^2 / r
    IntegrateControls c;
    c.stop_on_negative_energy = false;
    c.r_max = 10.0;
    const auto reg = integrate(focusing(2, 3), 0.0, 0.5, c);
    const auto ly = lyapunov_monitor(reg.profile);
    CHECK(ly.nonincreasing);
    CHECK(ly.max_increase <= 1e-7);
    // green in linear mode beyond r = 1
    const auto g = integrate(linear(3, 1.0), 1.0, 0.0);
    CHECK(lyapunov_monitor(g.profile, 1.0).nonincreasing);
    CHECK(lyapunov_monitor(g.profile, 1.0).gradient_bound);  // E > 0 everywhere, vacuous
    CHECK(ly.gradient_bound);
    // the |u|^p / p variant is not a Lyapunov function in general
    const auto lp = lyapunov_monitor(reg.profile, 0.0, true);
    CHECK(lp.energy.size() == ly.energy.size());
    MESSAGE("paper-exponent variant max increase: " << lp.max_increase);
    CHECK(lyapunov_energy(focusing(2, 3), 2.0, 1.0) == doctest::Approx(0.5 + 4.0 - 2.0));
    CHECK(lyapunov_energy(focusing(2, 3), 2.0, 1.0, true) == doctest::Approx(0.5 + 8.0 / 3 - 2.0));
}

TEST_CASE("zero finding")
{
    const auto pr = synthetic([](double r) { return std::sin(r); }, [](double r) { return std::cos(r); }, 0.5, 10.0,
                              400);
    const auto z = find_zeros(pr);
    REQUIRE(z.size() == 3);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(z[k] - (k + 1) * kPi) < 1e-9);
    auto neg = pr;
    for (auto& v : neg.u) v = -v;
    for (auto& v : neg.du) v = -v;
    CHECK(count_zeros(neg) == 3);
    // a triple zero has no slope
    const auto deg = synthetic([](double r) { return std::pow(r - 1.0, 3); },
                               [](double r) { return 3 * std::pow(r - 1.0, 2); }, 0.5, 1.5, 101);
    CHECK_THROWS_AS(find_zeros(deg), DegenerateZero);
}

TEST_CASE("ode residual")
{
    const auto g = integrate(linear(2, 1.0), 1.0, 0.0);
    CHECK(ode_residual(g.profile) <= 1e-5);
    IntegrateControls c;
    c.stop_on_negative_energy = false;
    c.r_max = 6.0;
    const auto reg = integrate(focusing(3, 1.5), 0.5, 0.2, c);
    CHECK(ode_residual(reg.profile) <= 1e-5);
    // a wrong profile is caught
    auto bad = synthetic([](double r) { return std::exp(-r); }, [](double r) { return -std::exp(-r); }, 1.0, 5.0, 200);
    CHECK(ode_residual(bad) > 1e-2);
}

TEST_CASE("grid")
{
    const auto g = RadialGrid::graded(1e-6, 40.0, 1.01, 0.01);
    CHECK(g.valid());
    CHECK(g.radii.front() == 1e-6);
    CHECK(g.radii.back() == doctest::Approx(40.0).epsilon(1e-15));
    RadialGrid bad;
    bad.radii = {1e-13, 1.0};
    CHECK_FALSE(bad.valid());
    bad.radii = {0.1, 0.1};
    CHECK_FALSE(bad.valid());
}
