#include <doctest.h>

#include "displace/cli.hpp"
#include "displace/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace displace;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& body) {
    std::string path = "displace_test_" + name;
    std::ofstream(path) << body;
    return path;
}

std::vector<std::pair<double, double>> parse_csv(const std::string& text) {
    std::vector<std::pair<double, double>> rows;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        auto comma = line.find(',');
        rows.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    }
    return rows;
}

} // namespace

TEST_CASE("check exit codes") {
    CHECK(run({"check", "--builtin", "exponential", "--which", "d2"}).code == kExitOk);
    CHECK(run({"check", "--builtin", "identity_gauge"}).code == kExitOk);
    CHECK(run({"check", "--builtin", "santiago_graph", "--which", "h2prime", "--phi", "sqrt(r)"}).code == kExitOk);

    auto graph = run({"check", "--builtin", "santiago_graph", "--which", "h2prime"});
    CHECK(graph.code == kExitFailed);
    CHECK(graph.out.find("[0,2,3]") != std::string::npos);

    CHECK(run({"check", "--builtin", "santiago_graph", "--which", "h2prime", "--phi", "r + 1"}).code ==
          kExitInconclusive);

    auto bad = temp_file("bad.json", "{ not json");
    auto r = run({"check", "--spec", bad});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("error") != std::string::npos);
    std::remove(bad.c_str());

    CHECK(run({"check"}).code == kExitUsage);
    CHECK(run({"check", "--builtin", "exponential", "--spec", "x.json"}).code == kExitUsage);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK(run({}).code == kExitUsage);
}

TEST_CASE("check reads a spec file") {
    auto path = temp_file("sine.json", R"J({"kind":"smooth","domain":[0,3.141592653589793],"delta":"sin(y) - sin(x)"})J");
    CHECK(run({"check", "--spec", path, "--which", "h3"}).code == kExitFailed);
    std::remove(path.c_str());
}

TEST_CASE("gauge tables") {
    auto r = run({"gauge", "--builtin", "exponential", "--format", "csv"});
    REQUIRE(r.code == kExitOk);
    auto rows = parse_csv(r.out);
    CHECK(rows.size() == 101);
    for (auto [t, g] : rows) CHECK(std::abs(g - (t * t + t)) <= 1e-6);

    auto path = temp_file("expdiff.json", R"J({"kind":"smooth","domain":[0,1],"delta":"exp(y) - exp(x)"})J");
    auto e = run({"gauge", "--spec", path, "--format", "csv"});
    REQUIRE(e.code == kExitOk);
    for (auto [t, g] : parse_csv(e.out)) CHECK(std::abs(g - std::expm1(t)) <= 1e-6);
    std::remove(path.c_str());

    auto id = run({"gauge", "--builtin", "identity_gauge", "--format", "csv"});
    for (auto [t, g] : parse_csv(id.out)) CHECK(std::abs(g - t) <= 1e-12);

    auto json = run({"gauge", "--builtin", "exponential"});
    CHECK(json.code == kExitOk);
    CHECK(Json::parse(json.out).is_object());
}

TEST_CASE("calculus commands") {
    auto d = run({"derive", "--f", "t", "--gauge", "extract:exponential", "--x", "0.5"});
    REQUIRE(d.code == kExitOk);
    CHECK(Json::parse(d.out)["value"].get<double>() == doctest::Approx(0.5).epsilon(1e-7));

    auto i = run({"integrate", "--f", "1", "--gauge", "extract:exponential"});
    REQUIRE(i.code == kExitOk);
    CHECK(Json::parse(i.out)["value"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));

    CHECK(run({"ftc", "--f", "t", "--gauge", "extract:exponential", "--grid", "101", "--tol", "1e-4"}).code ==
          kExitOk);
    CHECK(run({"ftc2", "--f", "g", "--gauge", "identity", "--grid", "50"}).code == kExitOk);
    CHECK(run({"ftc", "--f", "t +", "--gauge", "identity"}).code == kExitUsage);

    auto ball = run({"ball", "--builtin", "identity_gauge", "--x", "0.5", "--r", "0.2"});
    REQUIRE(ball.code == kExitOk);
    CHECK(Json::parse(ball.out)["lo"].get<double>() == doctest::Approx(0.3).epsilon(1e-10));
}

TEST_CASE("solvers") {
    auto ivp = run({"solve-ivp", "--rhs", "u", "--gauge", "identity", "--u0", "1", "--step", "1e-4"});
    REQUIRE(ivp.code == kExitOk);
    auto rows = parse_csv(ivp.out);
    CHECK(std::abs(rows.back().second - std::exp(1.0)) <= 1e-3);

    auto tight = run({"solve-ivp", "--rhs", "u", "--gauge", "identity", "--u0", "1", "--step", "1e-1", "--tol",
                      "1e-12"});
    CHECK(tight.code == kExitFailed);

    auto surf = run({"solve-surface", "--h", "1", "--gauge", "identity", "--C", "0"});
    REQUIRE(surf.code == kExitOk);
    for (auto [x, u] : parse_csv(surf.out)) CHECK(std::abs(u - (1 - x * x) / 2) <= 1e-6);
}

TEST_CASE("output is byte-identical across runs") {
    std::vector<std::string> args = {"check", "--builtin", "exponential", "--which", "h1,d2"};
    CHECK(run(args).out == run(args).out);
    auto a = run({"solve-ivp", "--rhs", "u", "--gauge", "identity", "--u0", "1", "--step", "1e-2", "--format", "json"});
    auto b = run({"solve-ivp", "--rhs", "u", "--gauge", "identity", "--u0", "1", "--step", "1e-2", "--format", "json"});
    CHECK(a.out == b.out);
}
