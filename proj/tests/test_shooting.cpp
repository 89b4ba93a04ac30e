#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <optional>

#include "ptint/greens.hpp"
#include "ptint/shooting.hpp"

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

std::optional<BranchPoint> first_with(const std::vector<BranchPoint>& pts, int k)
{
    for (const auto& p : pts)
        if (p.zero_count == k) return p;
    return std::nullopt;
}

bool same_class(const Outcome& x, const Outcome& y) { return x.kind == y.kind && x.zeros == y.zeros; }

}  // namespace

TEST_CASE("linear source gives the green function")
{
    auto p = cubic2(0.0);
    p.nonlinear = false;
    const auto pts = match_decay(p, 1.0);
    REQUIRE(pts.size() == 1);
    CHECK(std::abs(pts[0].a) < 1e-10);
    CHECK(pts[0].zero_count == 0);
    const auto& pr = pts[0].profile;
    for (std::size_t i = 0; i < pr.size(); i += 50)
        CHECK(pr.u[i] == doctest::Approx(green(2, 1.0, pr.grid.radii[i])).epsilon(1e-8));
}

TEST_CASE("fixed charge separators")
{
    const auto p = cubic2(0.0);
    const auto pts = match_decay(p, 1.0);
    REQUIRE(!pts.empty());
    CHECK(pts.front().zero_count == 0);
    const auto g = first_with(pts, 0);
    REQUIRE(g);
    for (double v : g->profile.u) CHECK(v > 0);

    for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].zero_count >= pts[i - 1].zero_count);

    for (const auto& pt : pts) {
        CAPTURE(pt.zero_count);
        CAPTURE(pt.a);
        CHECK(pt.certified);
        // the bracket ends fall in different classes
        const auto lo = integrate(p, pt.q, pt.bracket_lo), hi = integrate(p, pt.q, pt.bracket_hi);
        CHECK_FALSE(same_class(lo.outcome, hi.outcome));
        const double span = 10 * std::max(pt.bracket_hi - pt.bracket_lo, 1e-15 * std::abs(pt.a));
        const auto lo2 = integrate(p, pt.q, pt.a - span), hi2 = integrate(p, pt.q, pt.a + span);
        CHECK_FALSE(same_class(lo2.outcome, hi2.outcome));
        // alpha is defined by the relation
        REQUIRE(pt.f0);
        CHECK(std::abs(*pt.f0 - beta(2, pt.alpha, 1.0) * pt.q) <= 1e-8 * std::max(1.0, std::abs(*pt.f0)));
        CHECK(alpha_from_charge(pt.q, *pt.f0, 1.0, 2) == doctest::Approx(pt.alpha).epsilon(1e-10));
        CHECK(pt.residuals.ode <= 1e-5);
    }

    // mirror
    const auto neg = match_decay(p, -1.0);
    REQUIRE(neg.size() == pts.size());
    for (const auto& pt : pts) {
        const auto it = std::find_if(neg.begin(), neg.end(), [&](const BranchPoint& x) {
            return x.zero_count == pt.zero_count && std::abs(x.a + pt.a) <= 1e-12 * std::abs(pt.a);
        });
        REQUIRE(it != neg.end());
        CHECK(it->alpha == doctest::Approx(pt.alpha).epsilon(1e-9));
    }
}

TEST_CASE("start radius robustness")
{
    const auto p = cubic2(0.0);
    ShootControls c1, c2;
    c1.integ.r0 = 1e-6;
    c2.integ.r0 = 5e-7;
    const auto x = first_with(match_decay(p, 1.0, c1), 0);
    const auto y = first_with(match_decay(p, 1.0, c2), 0);
    REQUIRE(x);
    REQUIRE(y);
    // start error O(r0^2 |ln r0|^3)
    const double budget = 1e-12 * std::pow(-std::log(1e-6), 3);
    CHECK(std::abs(*x->f0 - *y->f0) <= 10 * budget + 1e-9);
}

TEST_CASE("ground state at positive alpha")
{
    const auto p = cubic2(0.5);
    const auto g = ground_state_shoot(p);
    CHECK(g.q > 0);
    CHECK(g.zero_count == 0);
    CHECK(g.alpha == doctest::Approx(0.5).epsilon(1e-8));
    const auto& u = g.profile.u;
    for (std::size_t i = 0; i < u.size(); ++i) {
        CHECK(u[i] > 0);
        if (i) CHECK(u[i] < u[i - 1]);
    }
    CHECK(g.action > 0);
    CHECK(g.action == doctest::Approx((0.5 - 1.0 / 4) * g.d_norm2).epsilon(1e-3));
    CHECK(g.residuals.nehari <= 1e-3);
    CHECK(g.residuals.relation <= 1e-8);

    const auto n = negate(g);
    CHECK(n.q == -g.q);
    CHECK(n.action == g.action);
    CHECK(n.alpha == g.alpha);

    // round trip through match_decay at the found charge
    const auto pts = match_decay(p, g.q);
    bool hit = false;
    for (const auto& pt : pts)
        if (pt.zero_count == 0 && std::abs(pt.a - g.a) <= 1e-8 * std::max(1.0, std::abs(g.a))) hit = true;
    CHECK(hit);
}

TEST_CASE("round trip at fixed alpha")
{
    const auto p0 = cubic2(0.0);
    ShootControls c;
    const auto pts = match_decay(p0, 1.0, c);
    const auto g = first_with(pts, 0);
    REQUIRE(g);
    auto p = p0;
    p.alpha = Alpha::finite(g->alpha);
    REQUIRE(lambda_alpha(p) < 1.0);
    const auto res = solve_fixed_alpha(p, 0, c);
    REQUIRE(res.found);
    CHECK(res.point.q == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(res.point.a == doctest::Approx(g->a).epsilon(1e-8));
}

TEST_CASE("rejection below lambda_alpha")
{
    const auto p = cubic2(0.0);
    REQUIRE(p.lambda <= lambda_alpha(p));
    CHECK_THROWS_AS(solve_fixed_alpha(p, 0), ShootingRejected);
    CHECK_THROWS_AS(ground_state_shoot(p), ShootingRejected);
    auto w = p;
    w.d = 3;
    w.p = 2.5;
    CHECK_THROWS_AS(solve_fixed_alpha(w, 1), ShootingRejected);
}

TEST_CASE("first nodal solution at alpha zero")
{
    const auto res = solve_fixed_alpha(cubic2(0.0), 1);
    REQUIRE(res.found);
    const auto& pt = res.point;
    CHECK(pt.zero_count == 1);
    CHECK(count_zeros(pt.profile) + (pt.outcome.origin_sign_change ? 1 : 0) == 1);
    CHECK(pt.q != 0);
    CHECK(pt.alpha == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(pt.residuals.relation <= 1e-8);
}

TEST_CASE("branch scan symmetry and small charge trend")
{
    const auto p = cubic2(0.0);
    const auto qs = geometric_q_grid(0.3, 3.0, 3);
    auto neg = qs;
    for (auto& q : neg) q = -q;
    const auto a = branch_scan(p, qs, 0), b = branch_scan(p, neg, 0);
    REQUIRE(a.size() == 3);
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].ok);
        REQUIRE(b[i].ok);
        CHECK(b[i].point.alpha == doctest::Approx(a[i].point.alpha).epsilon(1e-9));
        CHECK(b[i].point.a == doctest::Approx(-a[i].point.a).epsilon(1e-12));
        CHECK(*b[i].point.f0 == doctest::Approx(-*a[i].point.f0).epsilon(1e-12));
    }
    // alpha grows as q -> 0 on the ground branch
    const auto small = branch_scan(p, geometric_q_grid(1e-2, 1e-3, 4), 0);
    for (std::size_t i = 1; i < small.size(); ++i) {
        REQUIRE(small[i].ok);
        CHECK(small[i].point.alpha > small[i - 1].point.alpha);
    }
}

TEST_CASE("q grid")
{
    const auto g = geometric_q_grid(0.1, 10.0, 3);
    REQUIRE(g.size() == 3);
    CHECK(g[0] == 0.1);
    CHECK(g[1] == doctest::Approx(1.0));
    CHECK(g[2] == 10.0);
    const auto n = geometric_q_grid(-0.1, -10.0, 3);
    CHECK(n[1] == doctest::Approx(-1.0));
}
