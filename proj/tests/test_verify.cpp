#include <doctest.h>

#include <cmath>

#include "ptint/greens.hpp"
#include "ptint/radial_ode.hpp"
#include "ptint/shooting.hpp"
#include "ptint/verify.hpp"

using namespace ptint;

namespace {

Params cubic2(double alpha)
{
    Params p;
    p.d = 2;
    p.p = 3;
    p.lambda = 1;
    p.alpha = Alpha::finite(alpha);
    return p;
}

RadialProfile sampled(int d, double lam, const std::function<double(double)>& u,
                      const std::function<double(double)>& du)
{
    RadialProfile pr;
    pr.params.d = d;
    pr.params.lambda = lam;
    pr.grid = RadialGrid::graded(1e-6, 20.0, 1.01, 0.01);
    for (double r : pr.grid.radii) {
        pr.u.push_back(u(r));
        pr.du.push_back(du(r));
        pr.f.push_back(u(r));
    }
    return pr;
}

}  // namespace

TEST_CASE("charge fit on exact samples")
{
    for (int d : {2, 3}) {
        const auto pr = sampled(
            d, 1.0, [d](double r) { return 2 * green(d, 1.0, r) + 0.3; },
            [d](double r) { return 2 * green_deriv(d, 1.0, r); });
        const auto fit = fit_charge(pr, 1.0, d);
        CHECK(fit.q == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(fit.a == doctest::Approx(0.3).epsilon(1e-10));
        CHECK_FALSE(fit.ill_conditioned);
        CHECK(fit.window_lo == doctest::Approx(1e-6));
    }
}

TEST_CASE("charge fit with a linear perturbation")
{
    // G + 0.1 r: the error is set by the size of 0.1 r on the window
    const auto pr = sampled(
        2, 1.0, [](double r) { return green(2, 1.0, r) + 0.1 * r; },
        [](double r) { return green_deriv(2, 1.0, r) + 0.1; });
    const auto fit = fit_charge(pr, 1.0, 2);
    CHECK(std::abs(fit.q - 1) <= 1e-5);
    CHECK(std::abs(fit.a) <= 1e-5);
    // the answer barely depends on where the window starts
    FitOptions o;
    o.r_start = 1e-5;
    const auto fit2 = fit_charge(pr, 1.0, 2, o);
    CHECK(std::abs(fit2.q - 1) <= 1e-4);
    CHECK(fit2.window_lo >= 1e-5);
    // subtracting the perturbation removes the error
    o.correction = [](double r) { return 0.1 * r; };
    CHECK(fit_charge(pr, 1.0, 2, o).q == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("weak fits on synthetic samples")
{
    std::vector<double> r, f, g;
    for (int i = 0; i <= 60; ++i) {
        const double x = 1e-5 * std::pow(10.0, i / 60.0);
        r.push_back(x);
        f.push_back(3 * std::pow(x, -0.5) + 1);
        g.push_back(2 * std::log(x) + 0.5);
    }
    auto w = weak_fit_samples(r, f, 2.5);
    CHECK_FALSE(w.log_flag);
    CHECK(w.exponent == doctest::Approx(-0.5).epsilon(1e-6));
    CHECK(w.coefficient == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(w.constant == doctest::Approx(1.0).epsilon(1e-8));
    w = weak_fit_samples(r, g, 2.0);
    CHECK(w.log_flag);
    CHECK(w.coefficient == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(w.constant == doctest::Approx(0.5).epsilon(1e-10));
    CHECK_THROWS(weak_fit_samples({1, 2}, {1, 2}, 2.5));
}

TEST_CASE("flux charge on the green function")
{
    for (int d : {2, 3}) {
        Params p = cubic2(0.0);
        p.d = d;
        p.p = d == 2 ? 3 : 1.5;
        p.nonlinear = false;
        const auto res = integrate(p, 1.0, 0.0);
        const auto fl = charge_from_flux(res.profile, p);
        CHECK(std::abs(fl.q - 1) <= 1e-6);
        CHECK(fl.converged);
        CHECK(fl.values.size() >= 3);
    }
}

TEST_CASE("regular profile has no charge")
{
    IntegrateControls c;
    c.stop_on_negative_energy = false;
    c.r_max = 5.0;
    const auto p = cubic2(0.0);
    const auto res = integrate(p, 0.0, 0.4, c);
    const auto fit = fit_charge_corrected(res.profile, p);
    CHECK(std::abs(fit.q) <= 1e-8);
    CHECK(fit.a == doctest::Approx(0.4).epsilon(1e-8));
    CHECK(std::abs(charge_from_flux(res.profile, p).q) <= 1e-6);
}

TEST_CASE("report on a ground state")
{
    const auto p = cubic2(0.5);
    const auto g = ground_state_shoot(p);
    const auto rep = equivalence_report(g, p, "ground");
    CHECK(rep.pass);
    CHECK(rep.alpha_kind == AlphaKind::Finite);
    CHECK(rep.fit.q == doctest::Approx(g.q).epsilon(1e-6));
    CHECK(rep.q_agreement <= 1e-3);
    CHECK(rep.relation_residual <= 1e-6);
    CHECK(rep.decay_rate >= 0.9);
    CHECK(rep.summary_line().rfind("PASS ground:", 0) == 0);
    // a wrong alpha is caught by the relation check
    auto bad = g;
    bad.alpha += 1e-3;
    const auto rb = equivalence_report(bad, p, "tampered");
    CHECK_FALSE(rb.pass);
    CHECK(rb.summary_line().rfind("FAIL", 0) == 0);
}

TEST_CASE("weak regime report")
{
    Params p;
    p.d = 3;
    p.p = 2.5;
    p.lambda = 1;
    p.alpha = Alpha::finite(0.0);
    const auto pts = match_decay(p, 0.5);
    REQUIRE(!pts.empty());
    const auto& pt = pts.front();
    CHECK_FALSE(pt.f0.has_value());
    CHECK(pt.alpha_kind == AlphaKind::Unconstrained);
    const auto rep = equivalence_report(pt, p, "weak");
    REQUIRE(rep.weak.has_value());
    CHECK(rep.weak->exponent == doctest::Approx(-0.5).epsilon(0.05));
    CHECK(rep.weak->coefficient == doctest::Approx(rep.weak->predicted_coefficient).epsilon(0.05));
    CHECK(rep.weak->predicted_coefficient == doctest::Approx(4 * std::pow(0.5, 2.5) * std::pow(4 * kPi, -2.5)));
    CHECK(rep.pass);
    CHECK_THROWS(weak_singularity_fit(pt.profile, cubic2(0.0), 0.5));
}
