#include <doctest.h>

#include "displace/error.hpp"
#include "displace/expr.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <string>

using namespace displace;

namespace {

double at(const Expr& e, Expr::Bindings b) { return e.eval(b); }

// Random expression text over x and y; depth-limited.
std::string random_expr(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 9);
    std::uniform_real_distribution<double> num(0.0, 10.0);
    switch (pick(rng)) {
    case 0: return "x";
    case 1: return "y";
    case 2: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", num(rng));
        return buf;
    }
    case 3: return "(" + random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1) + ")";
    case 4: return random_expr(rng, depth - 1) + " - " + random_expr(rng, depth - 1);
    case 5: return random_expr(rng, depth - 1) + " * " + random_expr(rng, depth - 1);
    case 6: return "-" + random_expr(rng, depth - 1);
    case 7: return "exp(" + random_expr(rng, depth - 1) + ")";
    case 8: return "max(" + random_expr(rng, depth - 1) + ", " + random_expr(rng, depth - 1) + ")";
    default: return random_expr(rng, depth - 1) + " ^ 2";
    }
}

} // namespace

TEST_CASE("parse and evaluate the exponential displacement") {
    auto e = parse("exp(y^2 - x^2) - exp(x - y)", {"x", "y"});
    CHECK(e.free_variables() == std::vector<std::string>{"x", "y"});
    // The formula itself gives e^{-1} - e at (1,0).
    CHECK(at(e, {{"x", 1.0}, {"y", 0.0}}) == doctest::Approx(std::exp(-1.0) - std::exp(1.0)).epsilon(1e-15));
    CHECK(at(e, {{"x", 0.0}, {"y", 1.0}}) == doctest::Approx(2.3504023872876028).epsilon(1e-15));
    CHECK(at(e, {{"x", 0.3}, {"y", 0.3}}) == 0.0);
}

TEST_CASE("constants, literals, and simple arithmetic") {
    CHECK(parse("0", {"x", "y"}).free_variables().empty());
    CHECK(at(parse("0", {"x", "y"}), {}) == 0.0);
    CHECK(at(parse("2*t + 1", {"t"}), {{"t", 1.0}}) == 3.0);
    CHECK(at(parse("pi", {}), {}) == doctest::Approx(3.141592653589793));
    CHECK(at(parse("e", {}), {}) == doctest::Approx(2.718281828459045));
    CHECK(at(parse("1.5e2", {}), {}) == 150.0);
    CHECK(at(parse(".5", {}), {}) == 0.5);
}

TEST_CASE("precedence and associativity") {
    auto sub = parse("x - y - 1", {"x", "y"});
    CHECK(at(sub, {{"x", 0.0}, {"y", 0.0}}) == -1.0);
    CHECK(at(parse("2 ^ 3 ^ 2", {}), {}) == 512.0);
    CHECK(at(parse("-2 ^ 2", {}), {}) == -4.0);
    CHECK(at(parse("2 ^ -1", {}), {}) == 0.5);
    CHECK(at(parse("8 / 4 / 2", {}), {}) == 1.0);
    CHECK(at(parse("1 + 2 * 3", {}), {}) == 7.0);
    CHECK(at(parse("--3", {}), {}) == 3.0);
}

TEST_CASE("built-in functions") {
    CHECK(at(parse("ln(e)", {}), {}) == doctest::Approx(1.0));
    CHECK(at(parse("sqrt(16)", {}), {}) == 4.0);
    CHECK(at(parse("abs(-3)", {}), {}) == 3.0);
    CHECK(at(parse("min(2, 3)", {}), {}) == 2.0);
    CHECK(at(parse("max(2, 3)", {}), {}) == 3.0);
    CHECK(at(parse("sin(0) + cos(0)", {}), {}) == 1.0);
}

TEST_CASE("syntax errors carry a position and the expected tokens") {
    try {
        parse("exp(y^2 - x^2) - ", {"x", "y"});
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.kind() == ParseError::Kind::Syntax);
        CHECK(e.position() == 17);
        CHECK_FALSE(e.expected().empty());
    }
    CHECK_THROWS_AS(parse("", {}), ParseError);
    CHECK_THROWS_AS(parse("(1 + 2", {}), ParseError);
    CHECK_THROWS_AS(parse("1 2", {}), ParseError);
    CHECK_THROWS_AS(parse("2e", {}), ParseError);
}

TEST_CASE("unknown identifiers and arity mismatches") {
    try {
        parse("z + 1", {"x"});
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.kind() == ParseError::Kind::UnknownIdentifier);
        CHECK(e.position() == 0);
    }
    try {
        parse("max(1)", {});
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.kind() == ParseError::Kind::Arity);
    }
    try {
        parse("exp(1, 2)", {});
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.kind() == ParseError::Kind::Arity);
    }
    CHECK_THROWS_AS(parse("foo(1)", {}), ParseError);
}

TEST_CASE("domain errors name the offending sub-expression") {
    auto e = parse("ln(t)", {"t"});
    try {
        e.eval(Expr::Bindings{{"t", 0.0}});
        FAIL("expected DomainError");
    } catch (const DomainError& err) {
        CHECK(err.subexpression().find("ln") != std::string::npos);
    }
    CHECK_THROWS_AS(parse("sqrt(t)", {"t"}).eval(Expr::Bindings{{"t", -1.0}}), DomainError);
    CHECK_THROWS_AS(parse("1 / t", {"t"}).eval(Expr::Bindings{{"t", 0.0}}), DomainError);
    CHECK_THROWS_AS(parse("t ^ 0.5", {"t"}).eval(Expr::Bindings{{"t", -1.0}}), DomainError);
    CHECK_THROWS_AS(parse("exp(t) - exp(t)", {"t"}).eval(Expr::Bindings{{"t", 1000.0}}), DomainError);
}

TEST_CASE("missing bindings are reported only for variables in use") {
    auto e = parse("x + 1", {"x", "y"});
    CHECK(at(e, {{"x", 1.0}}) == 2.0);
    CHECK_THROWS_AS(at(e, {{"y", 1.0}}), MissingBinding);
}

TEST_CASE("evaluation is bit-identical across repeats and copies") {
    auto e = parse("exp(y^2 - x^2) - exp(x - y)", {"x", "y"});
    Expr copy = e;
    const double v[2] = {0.123, 0.789};
    double a = e.eval(v), b = copy.eval(v), c = e.eval(Expr::Bindings{{"x", 0.123}, {"y", 0.789}});
    CHECK(std::memcmp(&a, &b, sizeof a) == 0);
    CHECK(std::memcmp(&a, &c, sizeof a) == 0);
}

TEST_CASE("pretty-printing round-trips to an equal tree") {
    std::mt19937 rng(7);
    for (int i = 0; i < 300; ++i) {
        std::string src = random_expr(rng, 4);
        auto e = parse(src, {"x", "y"});
        auto back = parse(e.to_string(), {"x", "y"});
        INFO(src, " -> ", e.to_string());
        CHECK(e.same_tree(back));
    }
}

TEST_CASE("renaming while printing") {
    auto e = parse("2*y*exp(y^2 - x^2) + exp(x - y)", {"x", "y"});
    auto renamed = parse(e.to_string({{"x", "t"}, {"y", "t"}}), {"t"});
    for (double t : {0.0, 0.25, 0.5, 1.0}) CHECK(at(renamed, {{"t", t}}) == doctest::Approx(2 * t + 1).epsilon(1e-15));
}

TEST_CASE("reserved names cannot be variables") {
    CHECK_THROWS_AS(parse("1", {"pi"}), InvalidArgument);
    CHECK_THROWS_AS(parse("1", {"e"}), InvalidArgument);
}
