#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <sstream>

#include "ptint/bessel.hpp"
#include "ptint/greens.hpp"
#include "ptint/model.hpp"

using namespace ptint;

namespace {

// K0(z) = int_0^inf exp(-z cosh t) dt
double k0_integral(double z)
{
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate([z](double t) { return std::exp(-z * std::cosh(t)); });
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("K0 and K1 against integral and library oracles")
{
    for (double z : {1e-8, 1e-3, 0.1, 0.5, 1.0, 1.9, 2.0, 2.1, 3.0, 7.5, 20.0, 80.0}) {
        CHECK(rel(bessel::k0(z), boost::math::cyl_bessel_k(0, z)) < 1e-13);
        CHECK(rel(bessel::k1(z), boost::math::cyl_bessel_k(1, z)) < 1e-13);
        if (z > 1e-3 && z < 50) CHECK(rel(bessel::k0(z), k0_integral(z)) < 1e-12);
        CHECK(rel(bessel::i0(z < 50 ? z : 1.0), boost::math::cyl_bessel_i(0, z < 50 ? z : 1.0)) < 1e-13);
    }
    // switch continuity
    const double s = bessel::kSeriesSwitch;
    const double lo = std::nextafter(s, 0.0), hi = std::nextafter(s, 10.0);
    CHECK(rel(bessel::k0(lo), bessel::k0(hi)) < 1e-12);
    CHECK(rel(bessel::k1(lo), bessel::k1(hi)) < 1e-12);
}

TEST_CASE("green values")
{
    CHECK(green(3, 1, 1) == doctest::Approx(std::exp(-1.0) / (4 * kPi)).epsilon(1e-15));
    CHECK(green(3, 1, 1) == doctest::Approx(0.0292749).epsilon(1e-6));
    CHECK(green(2, 1, 1) == doctest::Approx(boost::math::cyl_bessel_k(0, 1.0) / (2 * kPi)).epsilon(1e-14));
    CHECK(green(2, 1, 1) == doctest::Approx(0.0670081).epsilon(1e-6));
    const double r = 1e-9;
    CHECK(green(2, 4, r) / (-std::log(r) / (2 * kPi)) == doctest::Approx(1.0).epsilon(0.03));
    CHECK_THROWS(green(2, 1, 0.0));
    CHECK_THROWS(green(3, 1, -1.0));
}

TEST_CASE("green derivative")
{
    CHECK(green_deriv(3, 1, 1) == doctest::Approx(-2 * std::exp(-1.0) / (4 * kPi)).epsilon(1e-14));
    CHECK(green_deriv(2, 1, 1e-7) * (-2 * kPi * 1e-7) == doctest::Approx(1.0).epsilon(1e-10));
    for (int d : {2, 3})
        for (double lam : {0.25, 1.0, 9.0})
            for (double r : {1e-6, 0.01, 0.3, 1.0, 5.0, 30.0}) {
                CHECK(green_deriv(d, lam, r) < 0);
                const double h = 1e-5 * r;
                const double fd = (green(d, lam, r + h) - green(d, lam, r - h)) / (2 * h);
                CHECK(rel(green_deriv(d, lam, r), fd) < 1e-6);
                const double fd2 = (green_deriv(d, lam, r + h) - green_deriv(d, lam, r - h)) / (2 * h);
                CHECK(rel(green_deriv2(d, lam, r), fd2) < 1e-6);
            }
}

TEST_CASE("singular part")
{
    CHECK(singular_part(2, 4, 0.3) == doctest::Approx(-(std::log(0.3) + kEulerGamma) / (2 * kPi)).epsilon(1e-15));
    CHECK(std::abs(green(2, 1, 1e-8) - singular_part(2, 1, 1e-8)) <= 1e-12);
    // d = 3 differences shrink linearly
    const double e1 = std::abs(green(3, 1, 1e-3) - singular_part(3, 1, 1e-3));
    const double e2 = std::abs(green(3, 1, 1e-4) - singular_part(3, 1, 1e-4));
    CHECK(e2 < 0.2 * e1);
    CHECK(std::abs(green(3, 1, 1e-6) - 1 / (4 * kPi * 1e-6)) == doctest::Approx(1 / (4 * kPi)).epsilon(1e-5));
}

TEST_CASE("green norms")
{
    for (double lam : {0.25, 1.0, 9.0}) {
        const double n2 = green_norm(2, lam, 2.0), n3 = green_norm(3, lam, 2.0);
        CHECK(rel(n2 * n2, 1 / (4 * kPi * lam)) < 1e-8);
        CHECK(rel(n3 * n3, 1 / (8 * kPi * std::sqrt(lam))) < 1e-8);
        // L^1: lambda int G = 1
        CHECK(rel(green_norm(2, lam, 1.0), 1 / lam) < 1e-8);
        CHECK(rel(green_norm(3, lam, 1.0), 1 / lam) < 1e-8);
    }
    // d = 3: int G^s = (4 pi)^{1-s} Gamma(3-s) / (s sqrt(lambda))^{3-s}
    for (double s : {1.5, 2.6, 2.9})
        for (double lam : {0.5, 2.0}) {
            const double want = std::pow(4 * kPi, 1 - s) * boost::math::tgamma(3 - s) / std::pow(s * std::sqrt(lam), 3 - s);
            CHECK(rel(std::pow(green_norm(3, lam, s), s), want) < 1e-8);
        }
    CHECK_THROWS_AS(green_norm(3, 1, 3.0), std::domain_error);
    CHECK_NOTHROW(green_norm(3, 1, 2.9));
}

TEST_CASE("flux normalization")
{
    for (int d : {2, 3})
        for (double lam : {0.25, 1.0, 9.0}) {
            const double r = 1e-4 / std::sqrt(lam);
            CHECK(std::abs(flux_normalization(d, lam, r) - 1) <= 1e-3);
            // halving r shrinks the defect
            double prev = std::abs(flux_normalization(d, lam, 0.1 / std::sqrt(lam)) - 1);
            for (int i = 1; i <= 3; ++i) {
                const double cur = std::abs(flux_normalization(d, lam, 0.1 / std::sqrt(lam) / std::pow(2.0, i)) - 1);
                CHECK(cur < prev);
                prev = cur;
            }
        }
    CHECK(std::abs(flux_normalization(3, 1, 1e-4) - 1) <= 1e-4);
    // far out the flux vanishes and the enclosed mass tends to 1
    CHECK(std::abs(green_enclosed_mass(3, 1, 50) - 1) < 1e-10);
    CHECK(std::abs(green_enclosed_mass(2, 1, 50) - 1) < 1e-10);
    CHECK(std::abs(flux_normalization(3, 1, 50) + 1) < 1e-10);
}

TEST_CASE("green samples")
{
    for (int d : {2, 3}) {
        const auto s = GreenSamples::make(d, 2.0);
        CHECK(s.invariants_hold());
        CHECK(s.grid.front() == doctest::Approx(1e-10 / std::sqrt(2.0)));
        std::ostringstream os;
        s.write_csv(os);
        CHECK(os.str().rfind("r,value\n", 0) == 0);
    }
}
