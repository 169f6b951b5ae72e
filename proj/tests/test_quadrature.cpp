#include <doctest.h>

#include "displace/error.hpp"
#include "displace/quadrature.hpp"

#include <cmath>
#include <limits>
#include <vector>

using namespace displace;

TEST_CASE("gauss-kronrod panel is exact on low-degree polynomials") {
    auto r = gauss_kronrod15([](double t) { return 3 * t * t; }, 0.0, 2.0);
    CHECK(r.value == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(r.error < 1e-13);
    CHECK(r.evaluations == 15);
}

TEST_CASE("adaptive integration of smooth and kinked integrands") {
    CHECK(integrate([](double t) { return std::exp(t); }, 0.0, 1.0).value ==
          doctest::Approx(std::exp(1.0) - 1).epsilon(1e-14));
    CHECK(integrate([](double t) { return std::abs(t - 0.3); }, 0.0, 1.0).value ==
          doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-12));
    CHECK(integrate([](double t) { return std::sqrt(t); }, 0.0, 1.0).value ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(integrate([](double) { return 1.0; }, 0.5, 0.5).value == 0.0);
}

TEST_CASE("non-finite integrand values raise NumericalError") {
    CHECK_THROWS_AS(integrate([](double) { return std::numeric_limits<double>::quiet_NaN(); }, 0.0, 1.0),
                    NumericalError);
}

TEST_CASE("panels tile the interval and sum to the integral") {
    double prev = 0.0, sum = 0.0;
    auto f = [](double t) { return std::sin(10 * t); };
    integrate_panels(f, 0.0, 1.0, {}, [&](double lo, double hi, double v) {
        CHECK(lo == prev);
        CHECK(hi > lo);
        prev = hi;
        sum += v;
    });
    CHECK(prev == 1.0);
    CHECK(sum == doctest::Approx((1 - std::cos(10.0)) / 10).epsilon(1e-12));
}

TEST_CASE("five-point Gauss-Legendre is exact to degree 9") {
    CHECK(gauss_legendre5([](double t) { return std::pow(t, 9); }, 0.0, 1.0) == doctest::Approx(0.1).epsilon(1e-14));
    auto rule = gauss_legendre5_rule(2.0, 4.0);
    double w = 0;
    for (double x : rule.weights) w += x;
    CHECK(w == doctest::Approx(2.0).epsilon(1e-15));
    for (double x : rule.nodes) CHECK((x > 2.0 && x < 4.0));
}
