#include <doctest.h>

#include "displace/displacement.hpp"
#include "displace/error.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace displace;

namespace {

const double kE = std::numbers::e;
const double kPi = std::numbers::pi;

// Root of e^{y^2} - e^{-y} = 1 on (0,1) by plain bisection.
double ball_oracle() {
    double lo = 0, hi = 1;
    for (int i = 0; i < 200; ++i) {
        double m = 0.5 * (lo + hi);
        (std::exp(m * m) - std::exp(-m) < 1 ? lo : hi) = m;
    }
    return lo;
}

double exp_d2(double x, double y) { return 2 * y * std::exp(y * y - x * x) + std::exp(x - y); }

} // namespace

TEST_CASE("builtin values") {
    auto ex = make_builtin(Builtin::Exponential);
    // Values of the formula as written; they are the negatives of each other.
    CHECK(std::abs(ex(1, 0) - (1 / kE - kE)) <= 1e-12);
    CHECK(std::abs(ex(0, 1) - (kE - 1 / kE)) <= 1e-12);
    CHECK(ex(0.4, 0.4) == 0.0);

    auto graph = make_builtin("santiago_graph");
    CHECK(graph(0, 2) == 4.0);
    CHECK(graph.vertex_count() == 4);
    CHECK_THROWS_AS(graph(0.5, 1), OutOfDomain);
    CHECK_THROWS_AS(graph(0, 4), OutOfDomain);

    auto id = make_builtin(Builtin::IdentityGauge);
    CHECK(id(0.25, 0.75) == 0.5);
    CHECK_THROWS_AS(id(0, 1.5), OutOfDomain);

    auto round = make_builtin(Builtin::Roundabout);
    CHECK(round(0, kPi / 2) == doctest::Approx(kPi / 2));
    CHECK(round(kPi / 2, 0) == doctest::Approx(3 * kPi / 2));
    CHECK(round(1, 1 + 2 * kPi) == doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_AS(make_builtin("nope"), InvalidArgument);
    CHECK(builtin_from_name("roundabout") == Builtin::Roundabout);
}

TEST_CASE("expression-backed smooth specs agree with the builtin") {
    auto text = DisplacementSpec::smooth({0, 1}, "exp(y^2 - x^2) - exp(x - y)");
    auto ex = make_builtin(Builtin::Exponential);
    for (double x : {0.0, 0.3, 1.0})
        for (double y : {0.0, 0.6, 1.0}) CHECK(text(x, y) == doctest::Approx(ex(x, y)).epsilon(1e-15));
    CHECK_THROWS_AS(DisplacementSpec::smooth({0, 1}, "z"), ParseError);
}

TEST_CASE("D2 of the exponential against its closed form") {
    auto ex = make_builtin(Builtin::Exponential);
    auto numeric = DisplacementSpec::smooth({0, 1}, "exp(y^2 - x^2) - exp(x - y)");
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 50; ++i) {
        double x = u(rng), y = u(rng);
        CHECK(d2_delta(ex, x, y) == doctest::Approx(exp_d2(x, y)).epsilon(1e-14));
        CHECK(std::abs(d2_delta(numeric, x, y) - exp_d2(x, y)) <= 1e-8);
    }
    CHECK_THROWS_AS(d2_delta(make_builtin(Builtin::Roundabout), 0, 1), UnsupportedVariant);
}

TEST_CASE("H1") {
    CHECK(check_h1(make_builtin(Builtin::Exponential), 101).verdict == Verdict::Pass);
    CHECK(check_h1(make_builtin(Builtin::IdentityGauge), 11).verdict == Verdict::Pass);
    auto bad = DisplacementSpec::graph({{1, 2}, {3, 0}});
    auto r = check_h1(bad, 0);
    CHECK(r.verdict == Verdict::Fail);
    REQUIRE_FALSE(r.witnesses.empty());
    CHECK(r.witnesses[0].point[0] == 0.0);
}

TEST_CASE("H2 prime") {
    auto id = [](double r) { return r; };
    CHECK(check_h2prime(make_builtin(Builtin::IdentityGauge), id, 21).verdict == Verdict::Pass);
    CHECK(check_h2prime(make_builtin(Builtin::Roundabout), id, 32).verdict == Verdict::Pass);
    auto jump = DisplacementSpec::stieltjes(Gauge({0, 1}, [](double t) { return t; }, {{0.5, 1.0}}));
    CHECK(check_h2prime(jump, id, 21).verdict == Verdict::Pass);

    auto graph = make_builtin(Builtin::SantiagoGraph);
    auto sq = check_h2prime(graph, [](double r) { return std::sqrt(r); }, 0);
    CHECK(sq.verdict == Verdict::Pass);
    CHECK(sq.sample_count == 64);

    auto plain = check_h2prime(graph, id, 0);
    CHECK(plain.sample_count == 64);
    CHECK(plain.verdict == Verdict::Fail);
    REQUIRE_FALSE(plain.witnesses.empty());
    CHECK(plain.witnesses[0].point == std::vector<double>{0, 2, 3});

    CHECK(check_h2prime(graph, [](double r) { return r + 1; }, 0).verdict == Verdict::Inconclusive);
}

TEST_CASE("H2 upper semicontinuity") {
    CHECK(check_h2_usc(make_builtin(Builtin::Exponential), 21, 8).verdict == Verdict::Pass);
    auto jump = DisplacementSpec::stieltjes(Gauge({0, 1}, {}, {{0.5, 1.0}}));
    CHECK(check_h2_usc(jump, 21, 8).verdict == Verdict::Pass);
    CHECK_THROWS_AS(check_h2_usc(make_builtin(Builtin::SantiagoGraph), 4, 4), UnsupportedVariant);
}

TEST_CASE("H3 and H5") {
    CHECK(check_h3(make_builtin(Builtin::Exponential), 21).verdict == Verdict::Pass);
    CHECK(check_h3(make_builtin(Builtin::IdentityGauge), 21).verdict == Verdict::Pass);
    auto sine = DisplacementSpec::smooth({0, kPi}, "sin(y) - sin(x)");
    auto r = check_h3(sine, 21);
    CHECK(r.verdict == Verdict::Fail);
    REQUIRE_FALSE(r.witnesses.empty());
    CHECK(r.witnesses[0].point[1] >= kPi / 2 - 0.2);

    CHECK(check_h5(make_builtin(Builtin::Exponential), 21).verdict == Verdict::Pass);
    auto jump = DisplacementSpec::stieltjes(Gauge({0, 1}, {}, {{0.5, 1.0}}));
    CHECK(check_h5(jump, 21).verdict == Verdict::Pass);
    // Right-continuous step stored as a raw callable.
    auto rc = DisplacementSpec::smooth({0, 1}, [](double x, double y) {
        auto step = [](double t) { return t >= 0.5 ? 1.0 : 0.0; };
        return step(y) - step(x);
    });
    CHECK(check_h5(rc, 21).verdict == Verdict::Fail);
}

TEST_CASE("D2 positivity") {
    auto r = check_d2_positive(make_builtin(Builtin::Exponential), 64);
    CHECK(r.verdict == Verdict::Pass);
    REQUIRE(r.r_estimate);
    CHECK(*r.r_estimate >= 1 / kE - 1e-9);
    CHECK(check_d2_positive(DisplacementSpec::smooth({-1, 1}, "y^3 - x^3"), 64).verdict == Verdict::Fail);
    auto lin = check_d2_positive(DisplacementSpec::smooth({0, 1}, "y - x"), 16);
    CHECK(lin.verdict == Verdict::Pass);
    CHECK(*lin.r_estimate == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("gamma and Radon-Nikodym densities") {
    auto ex = make_builtin(Builtin::Exponential);
    CHECK(gamma_estimate(ex, 0.5, 0.5, 64).value == 1.0);
    auto lin = DisplacementSpec::smooth({0, 1}, "y - x");
    CHECK(gamma_estimate(lin, 0.1, 0.9, 64).value == doctest::Approx(1.0).epsilon(1e-9));

    auto g = gamma_estimate(ex, 0, 1, 256);
    auto back = gamma_estimate(ex, 1, 0, 256);
    CHECK(g.value >= 1);
    CHECK(g.value * back.value >= 1);
    // Independent grid oracle: the refined value is at least the best node.
    double oracle = 1;
    for (int i = 0; i <= 4096; ++i) {
        double xi = i / 4096.0;
        oracle = std::max(oracle, exp_d2(0, xi) / exp_d2(1, xi));
    }
    CHECK(g.value >= oracle - 1e-12);
    CHECK(g.value <= oracle * (1 + 1e-6));

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 50; ++i) {
        double z = u(rng), zb = u(rng), t = u(rng);
        CHECK(rn_density(ex, z, z, t) == 1.0);
        CHECK(std::abs(rn_density(ex, z, zb, t) * rn_density(ex, zb, z, t) - 1) <= 1e-12);
    }
    CHECK(check_h4_gamma(ex, 11, 64).verdict == Verdict::Pass);
}

TEST_CASE("delta balls") {
    auto id = make_builtin(Builtin::IdentityGauge);
    auto b = delta_ball(id, 0.5, 0.2);
    CHECK(b.lo == doctest::Approx(0.3).epsilon(1e-10));
    CHECK(b.hi == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(b.contains(0.5));

    auto ex = make_builtin(Builtin::Exponential);
    auto eb = delta_ball(ex, 0, 1);
    CHECK(eb.lo == 0.0);
    CHECK(std::abs(eb.hi - ball_oracle()) <= 1e-10);
    CHECK(eb.contains(0.0));

    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 30; ++i) {
        double x = u(rng), r = 0.05 + u(rng);
        auto ball = delta_ball(ex, x, r);
        CHECK(ball.contains(x));
        CHECK(std::abs(ex(x, 0.5 * (ball.lo + ball.hi))) < r);
    }
    CHECK_THROWS_AS(delta_ball(make_builtin(Builtin::SantiagoGraph), 0, 1), UnsupportedVariant);
}
