#include "displace/serialize.hpp"

#include "displace/error.hpp"
#include "displace/expr.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace displace {

namespace {

void write(const Json& j, std::string& out) {
    switch (j.type()) {
    case Json::value_t::object: {
        out += '{';
        bool first = true;
        for (const auto& [k, v] : j.items()) {
            if (!first) out += ',';
            first = false;
            out += Json(k).dump();
            out += ':';
            write(v, out);
        }
        out += '}';
        break;
    }
    case Json::value_t::array: {
        out += '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) out += ',';
            write(j[i], out);
        }
        out += ']';
        break;
    }
    case Json::value_t::number_float: {
        double v = j.get<double>();
        out += std::isfinite(v) ? format_number(v) : "null";
        break;
    }
    default: out += j.dump();
    }
}

Interval read_domain(const Json& j) {
    if (!j.contains("domain")) throw InvalidArgument("missing \"domain\"");
    const auto& d = j.at("domain");
    if (!d.is_array() || d.size() != 2 || !d[0].is_number() || !d[1].is_number())
        throw InvalidArgument("\"domain\" must be [a, b]");
    Interval iv{d[0].get<double>(), d[1].get<double>()};
    if (!(iv.lo < iv.hi)) throw InvalidArgument("\"domain\" must satisfy a < b");
    return iv;
}

std::vector<std::pair<double, double>> read_pairs(const Json& j, const char* key) {
    std::vector<std::pair<double, double>> out;
    if (!j.contains(key) || j.at(key).is_null()) return out;
    const auto& arr = j.at(key);
    if (!arr.is_array()) throw InvalidArgument(std::string("\"") + key + "\" must be an array of pairs");
    for (const auto& p : arr) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw InvalidArgument(std::string("entries of \"") + key + "\" must be [number, number]");
        out.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return out;
}

std::string require_string(const Json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_string())
        throw InvalidArgument(std::string("\"") + key + "\" must be an expression string");
    return j.at(key).get<std::string>();
}

Json numbers(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(x);
    return a;
}

} // namespace

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string dump(const Json& j) {
    std::string out;
    write(j, out);
    return out;
}

Gauge gauge_from_json(const Json& j) {
    if (!j.is_object()) throw InvalidArgument("gauge must be a JSON object");
    Interval dom = read_domain(j);
    Gauge::Density density;
    std::optional<std::string> source;
    if (j.contains("density") && !j.at("density").is_null()) {
        source = require_string(j, "density");
        auto e = parse(*source, {"t"});
        density = [e](double t) { return e.eval(std::span<const double>(&t, 1)); };
    }
    std::vector<Jump> jumps;
    for (auto [tau, size] : read_pairs(j, "jumps")) jumps.push_back({tau, size});
    std::vector<OpenInterval> flats;
    for (auto [lo, hi] : read_pairs(j, "flats")) flats.push_back({lo, hi});
    Gauge g(dom, std::move(density), std::move(jumps), std::move(flats));
    return source ? g.with_density_source(*source) : g;
}

Json gauge_to_json(const Gauge& g) {
    Json j;
    j["domain"] = {g.domain().lo, g.domain().hi};
    if (g.has_density()) {
        if (!g.density_source()) throw UnsupportedVariant("gauge density has no expression text to serialize");
        j["density"] = *g.density_source();
    } else {
        j["density"] = nullptr;
    }
    Json jumps = Json::array();
    for (const auto& jp : g.jumps()) jumps.push_back({jp.tau, jp.size});
    j["jumps"] = jumps;
    Json flats = Json::array();
    for (const auto& f : g.flats()) flats.push_back({f.lo, f.hi});
    j["flats"] = flats;
    return j;
}

DisplacementSpec spec_from_json(const Json& j) {
    if (!j.is_object()) throw InvalidArgument("displacement spec must be a JSON object");
    if (!j.contains("kind") || !j.at("kind").is_string()) throw InvalidArgument("missing \"kind\"");
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "smooth") {
        Interval dom = read_domain(j);
        auto delta_src = require_string(j, "delta");
        std::optional<std::string> d2;
        if (j.contains("d2") && !j.at("d2").is_null()) d2 = require_string(j, "d2");
        return DisplacementSpec::smooth(dom, delta_src, d2 ? std::optional<std::string_view>(*d2) : std::nullopt);
    }
    if (kind == "stieltjes") {
        if (!j.contains("gauge")) throw InvalidArgument("stieltjes spec needs a \"gauge\" object");
        Json gj = j.at("gauge");
        if (!gj.contains("domain") && j.contains("domain")) gj["domain"] = j.at("domain");
        return DisplacementSpec::stieltjes(gauge_from_json(gj));
    }
    if (kind == "graph") {
        if (!j.contains("weights") || !j.at("weights").is_array()) throw InvalidArgument("graph spec needs \"weights\"");
        std::vector<std::vector<double>> w;
        for (const auto& row : j.at("weights")) {
            if (!row.is_array()) throw InvalidArgument("\"weights\" must be a matrix");
            auto& r = w.emplace_back();
            for (const auto& x : row) {
                if (!x.is_number()) throw InvalidArgument("graph weights must be numbers");
                r.push_back(x.get<double>());
            }
        }
        return DisplacementSpec::graph(std::move(w));
    }
    if (kind == "angular") return DisplacementSpec::angular();
    throw InvalidArgument("unknown displacement kind '" + kind + "'");
}

Json spec_to_json(const DisplacementSpec& spec) {
    Json j;
    j["domain"] = {spec.domain().lo, spec.domain().hi};
    switch (spec.kind()) {
    case DisplacementSpec::Kind::Smooth: {
        const auto& s = *spec.as_smooth();
        if (!s.delta_source) throw UnsupportedVariant("callable displacement has no expression text to serialize");
        j["kind"] = "smooth";
        j["delta"] = *s.delta_source;
        j["d2"] = s.d2_source ? Json(*s.d2_source) : Json(nullptr);
        break;
    }
    case DisplacementSpec::Kind::Stieltjes:
        j["kind"] = "stieltjes";
        j["gauge"] = gauge_to_json(spec.as_stieltjes()->gauge);
        break;
    case DisplacementSpec::Kind::Graph: j["kind"] = "graph"; j["weights"] = spec.as_graph()->weights; break;
    case DisplacementSpec::Kind::Angular: j["kind"] = "angular"; break;
    }
    return j;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return Json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidArgument("'" + path + "' is not valid JSON: " + e.what());
    }
}

Json to_json(const AxiomReport& r) {
    Json j;
    j["hypothesis"] = std::string(to_string(r.hypothesis));
    j["verdict"] = std::string(to_string(r.verdict));
    j["sample_count"] = r.sample_count;
    j["violations"] = r.violations;
    j["tolerance"] = r.tolerance;
    Json w = Json::array();
    for (const auto& x : r.witnesses) w.push_back({{"point", numbers(x.point)}, {"values", numbers(x.values)}});
    j["witnesses"] = w;
    if (r.r_estimate) j["r_estimate"] = *r.r_estimate;
    j["note"] = r.note;
    return j;
}

Json to_json(const GammaEstimate& g) {
    return {{"z", g.z}, {"zbar", g.zbar}, {"value", g.value}, {"grid_size", g.grid_size}};
}

Json to_json(const Ball& b) {
    return {{"lo", b.lo}, {"hi", b.hi}, {"lo_closed", b.lo_closed}, {"hi_closed", b.hi_closed}};
}

Json to_json(const DerivativeResult& d) {
    Json j;
    j["value"] = d.value ? Json(*d.value) : Json(nullptr);
    j["point_class"] = std::string(to_string(d.point_class));
    j["error_estimate"] = d.error_estimate;
    j["samples_used"] = d.samples_used;
    return j;
}

Json to_json(const FtcReport& r) {
    Json j;
    j["max_error"] = r.max_error;
    j["worst_point"] = r.worst_point;
    j["grid"] = r.grid;
    j["checked"] = r.checked;
    j["excluded"] = numbers(r.excluded);
    j["failures"] = numbers(r.failures);
    return j;
}

Json to_json(const ResidualReport& r) {
    return {{"max_residual", r.max_residual}, {"worst_point", r.worst_point}, {"grid", r.grid}};
}

Json to_json(const IvpSolution& s) {
    Json j;
    j["method"] = s.method;
    j["step_stat"] = s.step_stat;
    Json t = Json::array(), u = Json::array();
    for (const auto& n : s.nodes) {
        t.push_back(n.t);
        u.push_back(n.u);
    }
    j["t"] = t;
    j["u"] = u;
    Json jumps = Json::array();
    for (const auto& r : s.jumps) jumps.push_back({{"tau", r.tau}, {"before", r.before}, {"after", r.after}});
    j["jumps"] = jumps;
    return j;
}

std::string to_csv(const IvpSolution& s) {
    std::string out = "t,u\n";
    for (const auto& n : s.nodes) {
        out += format_number(n.t) + ',' + format_number(n.u) + '\n';
        if (const auto* r = s.jump_at(n.t)) out += format_number(n.t) + ',' + format_number(r->after) + '\n';
    }
    return out;
}

} // namespace displace
