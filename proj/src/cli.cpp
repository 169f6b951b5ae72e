#include "displace/cli.hpp"

#include "displace/calculus.hpp"
#include "displace/displacement.hpp"
#include "displace/error.hpp"
#include "displace/expr.hpp"
#include "displace/extraction.hpp"
#include "displace/serialize.hpp"
#include "displace/solver.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

namespace displace {

namespace {

class UsageError : public Error {
public:
    using Error::Error;
};

struct Options {
    std::string spec, builtin, gauge;
    std::string f, rhs, h, alpha = "t", phi = "r";
    std::vector<std::string> which;
    std::optional<int> grid, samples, levels;
    std::optional<double> tol, x, r, upper, lower;
    int sweeps = 0;
    double step = 1e-3, u0 = 0.0, C = 0.0;
    unsigned long seed = 0;
    std::string out, format;
};

// DISPLACE_LOG: 0/quiet (default), 1/info, 2/debug.
int log_level() {
    const char* v = std::getenv("DISPLACE_LOG");
    if (!v) return 0;
    std::string s(v);
    if (s == "debug" || s == "2") return 2;
    if (s == "info" || s == "1") return 1;
    return 0;
}

class Log {
public:
    explicit Log(std::ostream& err) : err_(err), level_(log_level()) {}
    void info(const std::string& m) const {
        if (level_ >= 1) err_ << "[info] " << m << '\n';
    }
    void debug(const std::string& m) const {
        if (level_ >= 2) err_ << "[debug] " << m << '\n';
    }

private:
    std::ostream& err_;
    int level_;
};

DisplacementSpec resolve_spec(const Options& o) {
    if (!o.spec.empty() && !o.builtin.empty()) throw UsageError("give either --spec or --builtin, not both");
    if (!o.builtin.empty()) return make_builtin(o.builtin);
    if (!o.spec.empty()) return spec_from_json(read_json_file(o.spec));
    throw UsageError("a displacement is required: --spec <path> or --builtin <name>");
}

Gauge gauge_of(const DisplacementSpec& spec) {
    if (const auto* s = spec.as_stieltjes()) return s->gauge;
    if (spec.as_smooth()) return gauge_from_smooth(spec);
    throw UnsupportedVariant("graph and angular displacements have no gauge");
}

Gauge resolve_gauge_ref(const std::string& ref) {
    if (ref == "identity") return Gauge::identity();
    if (ref.rfind("extract:", 0) == 0) return gauge_of(make_builtin(ref.substr(8)));
    Json j = read_json_file(ref);
    if (j.is_object() && j.contains("kind")) return gauge_of(spec_from_json(j));
    return gauge_from_json(j);
}

Gauge resolve_gauge(const Options& o) {
    if (!o.gauge.empty()) {
        if (!o.spec.empty() || !o.builtin.empty()) throw UsageError("give either --gauge or a displacement, not both");
        return resolve_gauge_ref(o.gauge);
    }
    if (!o.spec.empty() || !o.builtin.empty()) return gauge_of(resolve_spec(o));
    throw UsageError("a gauge is required: --gauge <path|extract:name|identity>, --spec or --builtin");
}

std::string require_expr(const std::string& src, const char* flag) {
    if (src.empty()) throw UsageError(std::string(flag) + " <expr> is required");
    return src;
}

/// Expression in t, optionally also in g (bound to the gauge value). The right
/// limit reads g(t+), exact for expressions continuous in (t, g).
ScalarFunction function_of_t(const std::string& src, std::optional<Gauge> g) {
    auto e = parse(src, {"t", "g"});
    if (e.uses("g") && !g) throw UsageError("expression uses g but no gauge is available");
    auto value = [e, g](double t) {
        const double v[2] = {t, g ? g->eval(t) : 0.0};
        return e.eval(v);
    };
    auto right = [e, g](double t) {
        const double v[2] = {t, g ? g->eval_right(t) : 0.0};
        return e.eval(v);
    };
    return ScalarFunction(value, right);
}

void emit(const Options& o, std::ostream& out, const std::string& text) {
    if (o.out.empty()) {
        out << text;
        return;
    }
    std::ofstream file(o.out);
    if (!file) throw UsageError("cannot write '" + o.out + "'");
    file << text;
}

std::string json_line(const Json& j) { return dump(j) + '\n'; }

std::vector<std::string> default_checks(const DisplacementSpec& spec) {
    switch (spec.kind()) {
    // H2' needs a rescaling φ that is not known in general for smooth displacements.
    case DisplacementSpec::Kind::Smooth: return {"h1", "h2usc", "h3", "h5", "d2", "h4"};
    case DisplacementSpec::Kind::Stieltjes: return {"h1", "h2usc", "h2prime", "h3", "h5"};
    default: return {"h1", "h2prime"};
    }
}

int cmd_check(const Options& o, std::ostream& out, const Log& log) {
    const auto spec = resolve_spec(o);
    const auto which = o.which.empty() ? default_checks(spec) : o.which;
    const int samples = o.samples.value_or(21);
    std::string text;
    bool failed = false, inconclusive = false;
    for (const auto& name : which) {
        AxiomReport r;
        if (name == "h1") {
            r = check_h1(spec, samples);
        } else if (name == "h2prime") {
            auto phi = parse(o.phi, {"r"});
            r = check_h2prime(spec, [phi](double v) { return phi.eval(std::span<const double>(&v, 1)); }, samples);
        } else if (name == "h2usc") {
            r = check_h2_usc(spec, samples, o.levels.value_or(8));
        } else if (name == "h3") {
            r = check_h3(spec, samples);
        } else if (name == "h5") {
            r = check_h5(spec, samples, o.levels.value_or(10));
        } else if (name == "d2") {
            r = check_d2_positive(spec, o.grid.value_or(64));
        } else if (name == "h4") {
            r = check_h4_gamma(spec, samples, o.grid.value_or(64));
        } else {
            throw UsageError("unknown check '" + name + "'");
        }
        log.info(std::string(to_string(r.hypothesis)) + ": " + std::string(to_string(r.verdict)) + " over " +
                 std::to_string(r.sample_count) + " samples");
        failed = failed || r.verdict == Verdict::Fail;
        inconclusive = inconclusive || r.verdict == Verdict::Inconclusive;
        text += json_line(to_json(r));
    }
    emit(o, out, text);
    if (failed) return kExitFailed;
    return inconclusive ? kExitInconclusive : kExitOk;
}

int cmd_gauge(const Options& o, std::ostream& out, const Log& log) {
    const Gauge g = resolve_gauge(o);
    const int n = o.grid.value_or(101);
    if (n < 2) throw UsageError("--grid must be at least 2");
    const Interval dom = g.domain();
    std::vector<double> ts, gs;
    for (int i = 0; i < n; ++i) {
        double t = i == n - 1 ? dom.hi : dom.lo + dom.length() * i / (n - 1);
        ts.push_back(t);
        gs.push_back(g(t));
    }
    log.info("gauge tabulated on " + std::to_string(n) + " points");
    if (o.format == "csv") {
        std::string text = "t,g\n";
        for (std::size_t i = 0; i < ts.size(); ++i) text += format_number(ts[i]) + ',' + format_number(gs[i]) + '\n';
        emit(o, out, text);
        return kExitOk;
    }
    Json j;
    if (g.has_density() && !g.density_source()) {
        j["gauge"] = nullptr;
        j["note"] = "density has no expression form (finite-difference D2); see the table";
    } else {
        j["gauge"] = gauge_to_json(g);
    }
    j["table"] = {{"t", ts}, {"g", gs}};
    emit(o, out, json_line(j));
    return kExitOk;
}

int cmd_ball(const Options& o, std::ostream& out, const Log&) {
    const auto spec = resolve_spec(o);
    if (!o.x || !o.r) throw UsageError("ball needs --x and --r");
    Ball b = delta_ball(spec, *o.x, *o.r, o.tol.value_or(1e-12));
    Json j;
    j["x"] = *o.x;
    j["r"] = *o.r;
    j.update(to_json(b));
    emit(o, out, json_line(j));
    return kExitOk;
}

int cmd_derive(const Options& o, std::ostream& out, const Log&) {
    if (!o.x) throw UsageError("derive needs --x");
    const int levels = o.levels.value_or(12);
    DerivativeResult d;
    if (o.gauge.empty() && (!o.spec.empty() || !o.builtin.empty())) {
        auto spec = resolve_spec(o);
        if (spec.as_smooth()) {
            d = delta_derivative(function_of_t(require_expr(o.f, "--f"), std::nullopt), spec, *o.x, levels);
        } else {
            Gauge g = gauge_of(spec);
            d = delta_derivative(function_of_t(require_expr(o.f, "--f"), g), g, *o.x, levels);
        }
    } else {
        Gauge g = resolve_gauge(o);
        d = delta_derivative(function_of_t(require_expr(o.f, "--f"), g), g, *o.x, levels);
    }
    Json j;
    j["x"] = *o.x;
    j.update(to_json(d));
    emit(o, out, json_line(j));
    return kExitOk;
}

int cmd_integrate(const Options& o, std::ostream& out, const Log&) {
    const Gauge g = resolve_gauge(o);
    const double lo = o.lower.value_or(g.domain().lo), hi = o.upper.value_or(g.domain().hi);
    double v = stieltjes_integral(function_of_t(require_expr(o.f, "--f"), g), g, lo, hi);
    emit(o, out, json_line({{"lower", lo}, {"upper", hi}, {"value", v}}));
    return kExitOk;
}

int cmd_path_integrate(const Options& o, std::ostream& out, const Log&) {
    const auto spec = resolve_spec(o);
    auto alpha_expr = parse(o.alpha, {"t"});
    MeasurePath path{[alpha_expr](double t) { return alpha_expr.eval(std::span<const double>(&t, 1)); }, o.alpha};
    const double hi = o.upper.value_or(spec.domain().hi);
    double v = path_integral(function_of_t(require_expr(o.f, "--f"), std::nullopt), path, spec, hi);
    emit(o, out, json_line({{"alpha", o.alpha}, {"upper", hi}, {"value", v}}));
    return kExitOk;
}

int finish_ftc(const Options& o, std::ostream& out, const Log& log, const FtcReport& r, double tol) {
    Json j = to_json(r);
    j["tol"] = tol;
    emit(o, out, json_line(j));
    log.info("max error " + format_number(r.max_error) + " at t=" + format_number(r.worst_point));
    return r.max_error <= tol && r.failures.empty() ? kExitOk : kExitFailed;
}

int cmd_ftc(const Options& o, std::ostream& out, const Log& log) {
    const Gauge g = resolve_gauge(o);
    auto r = ftc_forward_check(function_of_t(require_expr(o.f, "--f"), g), g, o.grid.value_or(101),
                               o.levels.value_or(12));
    return finish_ftc(o, out, log, r, o.tol.value_or(1e-4));
}

int cmd_ftc2(const Options& o, std::ostream& out, const Log& log) {
    const Gauge g = resolve_gauge(o);
    auto r = ftc2_check(function_of_t(require_expr(o.f, "--f"), g), g, o.grid.value_or(100), o.levels.value_or(12));
    return finish_ftc(o, out, log, r, o.tol.value_or(1e-6));
}

int finish_solution(const Options& o, std::ostream& out, const IvpSolution& sol,
                    const std::optional<ResidualReport>& res) {
    if (o.format == "json") {
        Json j = to_json(sol);
        if (res) j["residual"] = to_json(*res);
        emit(o, out, json_line(j));
    } else {
        emit(o, out, to_csv(sol));
    }
    if (res && o.tol && res->max_residual > *o.tol) return kExitFailed;
    return kExitOk;
}

int cmd_solve_ivp(const Options& o, std::ostream& out, const Log& log) {
    const Gauge g = resolve_gauge(o);
    auto e = parse(require_expr(o.rhs, "--rhs"), {"t", "u"});
    IvpProblem p{g, [e](double t, double u) {
                     const double v[2] = {t, u};
                     return e.eval(v);
                 },
                 o.u0, g.domain()};
    auto sol = solve_ivp(p, o.step, o.sweeps);
    std::optional<ResidualReport> res;
    if (o.tol || o.format == "json") res = verify_solution(p, sol, o.grid.value_or(101));
    log.info("u(b) = " + format_number(sol.final_value()) + " on " + std::to_string(sol.nodes.size()) + " nodes");
    if (res) log.info("max residual " + format_number(res->max_residual));
    return finish_solution(o, out, sol, res);
}

int cmd_solve_surface(const Options& o, std::ostream& out, const Log& log) {
    const Gauge g = resolve_gauge(o);
    SurfaceProblem p{g, function_of_t(require_expr(o.h, "--h"), std::nullopt), o.C, g.domain()};
    auto sol = solve_surface(p, o.step);
    log.info("u(a) = " + format_number(sol.nodes.front().u));
    return finish_solution(o, out, sol, std::nullopt);
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Displacement calculus toolkit"};
    app.name("displace");
    app.require_subcommand(1);
    // "-h" is left free: solve-surface takes --h for the source term.
    app.set_help_flag("--help", "print help and exit");
    Options o;

    const std::vector<std::string> builtins{"exponential", "roundabout", "santiago_graph", "identity_gauge"};
    auto displacement = [&](CLI::App* c) {
        c->add_option("--spec", o.spec, "displacement spec JSON file");
        c->add_option("--builtin", o.builtin, "built-in displacement")->check(CLI::IsMember(builtins));
    };
    auto gauge = [&](CLI::App* c) {
        c->add_option("--gauge", o.gauge, "gauge: JSON path, extract:<builtin>, or identity");
    };
    auto common = [&](CLI::App* c) {
        c->add_option("--out", o.out, "write output to this file instead of stdout");
        c->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv"}));
        c->add_option("--seed", o.seed, "seed for sampled checks (sampling is on fixed grids)");
        c->add_option("--tol", o.tol, "tolerance");
    };

    auto* check = app.add_subcommand("check", "run hypothesis checks on a displacement");
    displacement(check);
    check->add_option("--which", o.which, "subset of h1,h2usc,h2prime,h3,h5,d2,h4")
        ->delimiter(',')
        ->check(CLI::IsMember({"h1", "h2usc", "h2prime", "h3", "h5", "d2", "h4"}));
    check->add_option("--samples", o.samples, "sample grid size");
    check->add_option("--levels", o.levels, "shrink levels for limit checks");
    check->add_option("--grid", o.grid, "lattice size for d2 and h4");
    check->add_option("--phi", o.phi, "rescaling phi(r) for h2prime");

    auto* gauge_cmd = app.add_subcommand("gauge", "extract or load a gauge and tabulate it");
    displacement(gauge_cmd);
    gauge(gauge_cmd);
    gauge_cmd->add_option("--grid", o.grid, "number of table points");

    auto* ball = app.add_subcommand("ball", "delta-ball around a point");
    displacement(ball);
    ball->add_option("--x", o.x, "centre");
    ball->add_option("--r", o.r, "radius");

    auto* derive = app.add_subcommand("derive", "delta-derivative of an expression at a point");
    displacement(derive);
    gauge(derive);
    derive->add_option("--f", o.f, "expression in t (and g)");
    derive->add_option("--x", o.x, "evaluation point");
    derive->add_option("--levels", o.levels, "shrink levels");

    auto* integ = app.add_subcommand("integrate", "Stieltjes integral over [lower, upper)");
    displacement(integ);
    gauge(integ);
    integ->add_option("--f", o.f, "expression in t (and g)");
    integ->add_option("--lower", o.lower, "lower bound (default a)");
    integ->add_option("--upper", o.upper, "upper bound (default b)");

    auto* pint = app.add_subcommand("path-integrate", "integral along a path of local measures");
    displacement(pint);
    pint->add_option("--f", o.f, "expression in t");
    pint->add_option("--alpha", o.alpha, "path alpha(t) as an expression in t");
    pint->add_option("--upper", o.upper, "upper bound (default b)");

    auto* ftc = app.add_subcommand("ftc", "forward fundamental theorem check");
    displacement(ftc);
    gauge(ftc);
    ftc->add_option("--f", o.f, "integrand expression in t (and g)");
    ftc->add_option("--grid", o.grid, "interior grid points");
    ftc->add_option("--levels", o.levels, "shrink levels");

    auto* ftc2 = app.add_subcommand("ftc2", "reconstruction check F(x) = F(a) + integral of its derivative");
    displacement(ftc2);
    gauge(ftc2);
    ftc2->add_option("--f", o.f, "F as an expression in t (and g)");
    ftc2->add_option("--grid", o.grid, "mesh cells");
    ftc2->add_option("--levels", o.levels, "shrink levels");

    auto* ivp = app.add_subcommand("solve-ivp", "solve u'_g = rhs(t,u), u(a) = u0");
    displacement(ivp);
    gauge(ivp);
    ivp->add_option("--rhs", o.rhs, "right-hand side in t and u");
    ivp->add_option("--u0", o.u0, "initial value");
    ivp->add_option("--step", o.step, "mesh step");
    ivp->add_option("--sweeps", o.sweeps, "Picard sweeps after Euler");
    ivp->add_option("--grid", o.grid, "residual check points");

    auto* surface = app.add_subcommand("solve-surface", "stationary surface problem with terminal value C");
    displacement(surface);
    gauge(surface);
    surface->add_option("--h", o.h, "source term in t");
    surface->add_option("--C", o.C, "terminal value u(b)");
    surface->add_option("--step", o.step, "mesh step");

    for (auto* c : {check, gauge_cmd, ball, derive, integ, pint, ftc, ftc2, ivp, surface}) common(c);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front())
            err << "run 'displace " << sub->get_name() << " --help' for usage\n";
        return kExitUsage;
    }

    Log log(err);
    auto* chosen = app.get_subcommands().front();
    if (o.format.empty()) o.format = (chosen == ivp || chosen == surface) ? "csv" : "json";
    log.debug("command " + chosen->get_name());
    try {
        if (chosen == check) return cmd_check(o, out, log);
        if (chosen == gauge_cmd) return cmd_gauge(o, out, log);
        if (chosen == ball) return cmd_ball(o, out, log);
        if (chosen == derive) return cmd_derive(o, out, log);
        if (chosen == integ) return cmd_integrate(o, out, log);
        if (chosen == pint) return cmd_path_integrate(o, out, log);
        if (chosen == ftc) return cmd_ftc(o, out, log);
        if (chosen == ftc2) return cmd_ftc2(o, out, log);
        if (chosen == ivp) return cmd_solve_ivp(o, out, log);
        if (chosen == surface) return cmd_solve_surface(o, out, log);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace displace
