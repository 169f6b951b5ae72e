#include <doctest.h>

#include "displace/error.hpp"
#include "displace/serialize.hpp"

#include <cmath>
#include <limits>

using namespace displace;

TEST_CASE("numbers print with 17 significant digits") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(2.0) == "2");
    Json j = Json::object();
    j["b"] = 0.1;
    j["a"] = std::numeric_limits<double>::infinity();
    j["c"] = 3;
    CHECK(dump(j) == R"J({"b":0.10000000000000001,"a":null,"c":3})J");
}

TEST_CASE("gauge round trip") {
    auto in = Json::parse(R"J({"domain":[0,1],"density":"2*t + 1","jumps":[[0.5,0.25]],"flats":[]})J");
    auto g = gauge_from_json(in);
    CHECK(g(1.0) == doctest::Approx(2.25).epsilon(1e-13));
    auto out = gauge_to_json(g);
    auto again = gauge_from_json(out);
    for (double t : {0.0, 0.3, 0.5, 0.7, 1.0}) CHECK(again(t) == g(t));

    auto pure = gauge_from_json(Json::parse(R"J({"domain":[0,1],"density":null,"jumps":[[0.5,1]]})J"));
    CHECK(pure(0.6) == 1.0);
    CHECK_THROWS_AS(gauge_to_json(Gauge({0, 1}, [](double t) { return t; })), UnsupportedVariant);
    CHECK_THROWS_AS(gauge_from_json(Json::parse(R"J({"domain":[1]})J")), InvalidArgument);
}

TEST_CASE("spec round trip for every kind") {
    const char* docs[] = {
        R"J({"kind":"smooth","domain":[0,1],"delta":"exp(y^2 - x^2) - exp(x - y)","d2":null})J",
        R"J({"kind":"stieltjes","gauge":{"domain":[0,1],"density":"1","jumps":[[0.5,0.5]]}})J",
        R"J({"kind":"graph","weights":[[0,1],[2,0]]})J",
        R"J({"kind":"angular"})J",
    };
    for (const char* doc : docs) {
        auto spec = spec_from_json(Json::parse(doc));
        auto back = spec_from_json(spec_to_json(spec));
        CHECK(back.kind() == spec.kind());
        CHECK(back(0, 1) == spec(0, 1));
        CHECK(dump(spec_to_json(back)) == dump(spec_to_json(spec)));
    }
    CHECK_THROWS_AS(spec_from_json(Json::parse(R"J({"kind":"weird"})J")), InvalidArgument);
    CHECK_THROWS_AS(spec_from_json(Json::parse(R"J({"kind":"smooth","domain":[0,1],"delta":"x +"})J")), ParseError);
    CHECK_THROWS_AS(read_json_file("/nonexistent/file.json"), InvalidArgument);
}

TEST_CASE("reports") {
    FtcReport r;
    r.max_error = 1e-5;
    r.worst_point = 0.5;
    r.grid = 101;
    r.excluded = {0.25};
    auto j = to_json(r);
    CHECK(j["max_error"].get<double>() == 1e-5);
    CHECK(j["excluded"].size() == 1);
    auto keys = std::vector<std::string>{};
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    CHECK(keys[0] == "max_error");
    CHECK(keys[1] == "worst_point");
    CHECK(keys[2] == "grid");

    Ball b{0.25, 0.75, true, false};
    CHECK(dump(to_json(b)) == dump(to_json(b)));
}

TEST_CASE("csv duplicates jump rows") {
    IvpSolution s;
    s.nodes = {{0.0, 1.0}, {0.5, 2.0}, {1.0, 4.0}};
    s.jumps = {{0.5, 2.0, 3.0}};
    s.method = "g-euler";
    CHECK(to_csv(s) == "t,u\n0,1\n0.5,2\n0.5,3\n1,4\n");
    auto j = to_json(s);
    CHECK(j["jumps"].size() == 1);
}
