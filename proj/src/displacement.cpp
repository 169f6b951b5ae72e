#include "displace/displacement.hpp"

#include "displace/error.hpp"
#include "displace/expr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace displace {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double normalize_angle(double theta) {
    double r = std::fmod(theta, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

Function2D from_expr(const Expr& e) {
    return [e](double x, double y) {
        const double v[2] = {x, y};
        return e.eval(v);
    };
}

std::string fmt(double v) { return std::to_string(v); }

const SmoothDisplacement& require_smooth(const DisplacementSpec& spec, const char* op) {
    const auto* s = spec.as_smooth();
    if (!s) throw UnsupportedVariant(std::string(op) + " requires a smooth displacement");
    return *s;
}

void require_interval(const DisplacementSpec& spec, const char* op) {
    if (!spec.is_interval_variant())
        throw UnsupportedVariant(std::string(op) + " requires a smooth or Stieltjes displacement");
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    v.back() = hi;
    return v;
}

/// Points the sampled checks iterate over.
std::vector<double> sample_points(const DisplacementSpec& spec, int samples) {
    switch (spec.kind()) {
    case DisplacementSpec::Kind::Graph: {
        std::vector<double> v(spec.vertex_count());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
        return v;
    }
    case DisplacementSpec::Kind::Angular: {
        std::vector<double> v(static_cast<std::size_t>(samples));
        for (int i = 0; i < samples; ++i) v[static_cast<std::size_t>(i)] = kTwoPi * i / samples;
        return v;
    }
    default:
        return linspace(spec.domain().lo, spec.domain().hi, samples);
    }
}

void require_samples(int samples, int minimum = 1) {
    if (samples < minimum) throw InvalidArgument("need at least " + std::to_string(minimum) + " samples");
}

void add_witness(AxiomReport& r, std::vector<double> point, std::vector<double> values) {
    ++r.violations;
    if (r.witnesses.size() < AxiomReport::kMaxWitnesses) r.witnesses.push_back({std::move(point), std::move(values)});
}

AxiomReport make_report(Hypothesis h, double tol) {
    AxiomReport r;
    r.hypothesis = h;
    r.verdict = Verdict::Pass;
    r.tolerance = tol;
    return r;
}

void finish(AxiomReport& r) {
    if (r.violations > 0) r.verdict = Verdict::Fail;
}

} // namespace

// ---------------------------------------------------------------------------
// DisplacementSpec
// ---------------------------------------------------------------------------

DisplacementSpec DisplacementSpec::smooth(Interval domain, Function2D delta_fn, Function2D d2) {
    if (!(domain.lo < domain.hi)) throw InvalidArgument("displacement domain must be non-degenerate");
    if (!delta_fn) throw InvalidArgument("smooth displacement needs a delta callable");
    return DisplacementSpec(domain, SmoothDisplacement{std::move(delta_fn), std::move(d2), {}, {}});
}

DisplacementSpec DisplacementSpec::smooth(Interval domain, std::string_view delta_src,
                                          std::optional<std::string_view> d2_src) {
    auto delta_expr = parse(delta_src, {"x", "y"});
    Function2D d2;
    std::optional<std::string> d2_text;
    if (d2_src) {
        d2 = from_expr(parse(*d2_src, {"x", "y"}));
        d2_text = std::string(*d2_src);
    }
    return smooth(domain, from_expr(delta_expr), std::move(d2)).with_sources(std::string(delta_src), std::move(d2_text));
}

DisplacementSpec DisplacementSpec::with_sources(std::optional<std::string> delta_src,
                                                std::optional<std::string> d2_src) const {
    if (kind() != Kind::Smooth) throw UnsupportedVariant("only smooth displacements carry expression sources");
    auto copy = *this;
    auto& s = std::get<SmoothDisplacement>(copy.variant_);
    s.delta_source = std::move(delta_src);
    s.d2_source = std::move(d2_src);
    return copy;
}

DisplacementSpec DisplacementSpec::stieltjes(Gauge gauge) {
    Interval dom = gauge.domain();
    return DisplacementSpec(dom, StieltjesDisplacement{std::move(gauge)});
}

DisplacementSpec DisplacementSpec::graph(std::vector<std::vector<double>> weights) {
    if (weights.empty()) throw InvalidArgument("graph needs at least one vertex");
    for (const auto& row : weights) {
        if (row.size() != weights.size()) throw InvalidArgument("graph weight matrix must be square");
        for (double w : row)
            if (!std::isfinite(w)) throw InvalidArgument("graph weights must be finite");
    }
    double n = static_cast<double>(weights.size());
    return DisplacementSpec({0.0, n - 1.0}, GraphDisplacement{std::move(weights)});
}

DisplacementSpec DisplacementSpec::angular() { return DisplacementSpec({0.0, kTwoPi}, AngularDisplacement{}); }

std::size_t DisplacementSpec::vertex_count() const {
    if (const auto* g = as_graph()) return g->weights.size();
    return 0;
}

double DisplacementSpec::raw(double x, double y) const {
    switch (kind()) {
    case Kind::Smooth: return std::get<SmoothDisplacement>(variant_).delta(x, y);
    case Kind::Stieltjes: {
        const auto& g = std::get<StieltjesDisplacement>(variant_).gauge;
        return g.eval(y) - g.eval(x);
    }
    case Kind::Graph: {
        const auto& w = std::get<GraphDisplacement>(variant_).weights;
        return w[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
    }
    case Kind::Angular: return normalize_angle(normalize_angle(y) - normalize_angle(x));
    }
    return 0.0;
}

double DisplacementSpec::operator()(double x, double y) const {
    switch (kind()) {
    case Kind::Graph: {
        auto n = static_cast<double>(vertex_count());
        for (double v : {x, y})
            if (!(v >= 0.0 && v < n && std::floor(v) == v))
                throw OutOfDomain("vertex index " + fmt(v) + " is not a vertex of the graph");
        break;
    }
    case Kind::Angular:
        if (!std::isfinite(x) || !std::isfinite(y)) throw OutOfDomain("angles must be finite");
        break;
    default:
        for (double v : {x, y})
            if (!domain_.contains(v))
                throw OutOfDomain("point " + fmt(v) + " outside [" + fmt(domain_.lo) + ", " + fmt(domain_.hi) + "]");
    }
    return raw(x, y);
}

double delta(const DisplacementSpec& spec, double x, double y) { return spec(x, y); }

double d2_delta(const DisplacementSpec& spec, double x, double y) {
    const auto& s = require_smooth(spec, "D2 delta");
    if (s.d2) return s.d2(x, y);
    const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::fabs(y));
    auto central = [&](double step) { return (s.delta(x, y + step) - s.delta(x, y - step)) / (2.0 * step); };
    return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

// ---------------------------------------------------------------------------
// Built-ins
// ---------------------------------------------------------------------------

std::optional<Builtin> builtin_from_name(std::string_view name) {
    if (name == "exponential") return Builtin::Exponential;
    if (name == "roundabout") return Builtin::Roundabout;
    if (name == "santiago_graph") return Builtin::SantiagoGraph;
    if (name == "identity_gauge") return Builtin::IdentityGauge;
    return std::nullopt;
}

DisplacementSpec make_builtin(Builtin which) {
    switch (which) {
    case Builtin::Exponential: {
        return DisplacementSpec::smooth(
                   {0.0, 1.0}, [](double x, double y) { return std::exp(y * y - x * x) - std::exp(x - y); },
                   [](double x, double y) { return 2.0 * y * std::exp(y * y - x * x) + std::exp(x - y); })
            .with_sources("exp(y^2 - x^2) - exp(x - y)", "2*y*exp(y^2 - x^2) + exp(x - y)");
    }
    case Builtin::Roundabout: return DisplacementSpec::angular();
    case Builtin::SantiagoGraph:
        return DisplacementSpec::graph({
            {0, 9, 4, 10},
            {10, 0, 14, 8},
            {7, 9, 0, 5},
            {11, 6, 7, 0},
        });
    case Builtin::IdentityGauge: return DisplacementSpec::stieltjes(Gauge::identity({0.0, 1.0}));
    }
    throw InvalidArgument("unknown built-in");
}

DisplacementSpec make_builtin(std::string_view name) {
    auto b = builtin_from_name(name);
    if (!b) throw InvalidArgument("unknown built-in '" + std::string(name) + "'");
    return make_builtin(*b);
}

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

std::string_view to_string(Hypothesis h) {
    switch (h) {
    case Hypothesis::H1: return "H1";
    case Hypothesis::H2Usc: return "H2-usc";
    case Hypothesis::H2Prime: return "H2'";
    case Hypothesis::H3: return "H3";
    case Hypothesis::H4Gamma: return "H4-gamma";
    case Hypothesis::H5: return "H5";
    case Hypothesis::D2Positive: return "D2-positive";
    }
    return "?";
}

std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

AxiomReport check_h1(const DisplacementSpec& spec, int samples, double tol) {
    if (spec.kind() != DisplacementSpec::Kind::Graph) require_samples(samples);
    AxiomReport r = make_report(Hypothesis::H1, tol);
    for (double p : sample_points(spec, samples)) {
        double v = spec.raw(p, p);
        ++r.sample_count;
        if (!(std::fabs(v) <= tol)) add_witness(r, {p}, {v});
    }
    if (spec.kind() == DisplacementSpec::Kind::Graph) r.note = "exhaustive over all vertices";
    finish(r);
    return r;
}

AxiomReport check_h2prime(const DisplacementSpec& spec, const std::function<double(double)>& phi, int samples,
                          double tol) {
    if (spec.kind() != DisplacementSpec::Kind::Graph) require_samples(samples);
    AxiomReport r = make_report(Hypothesis::H2Prime, tol);
    const auto pts = sample_points(spec, samples);
    const std::size_t n = pts.size();

    std::vector<double> abs_delta(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) abs_delta[i * n + j] = std::fabs(spec.raw(pts[i], pts[j]));

    std::vector<double> psi(n * n);
    try {
        double phi0 = phi(0.0);
        if (!(std::fabs(phi0) <= tol)) {
            r.verdict = Verdict::Inconclusive;
            r.note = "phi(0) = " + fmt(phi0) + " is not 0";
            return r;
        }
        std::vector<double> levels(abs_delta);
        levels.push_back(0.0);
        std::sort(levels.begin(), levels.end());
        levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
        double prev = phi0;
        for (std::size_t k = 1; k < levels.size(); ++k) {
            double v = phi(levels[k]);
            if (!(v > prev)) {
                r.verdict = Verdict::Inconclusive;
                r.note = "phi is not strictly increasing near r = " + fmt(levels[k]);
                return r;
            }
            prev = v;
        }
        for (std::size_t k = 0; k < n * n; ++k) psi[k] = phi(abs_delta[k]);
    } catch (const Error& e) {
        r.verdict = Verdict::Inconclusive;
        r.note = std::string("phi could not be evaluated: ") + e.what();
        return r;
    }

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                ++r.sample_count;
                double lhs = psi[i * n + k];
                double rhs = psi[i * n + j] + psi[j * n + k];
                if (!(lhs <= rhs + tol)) add_witness(r, {pts[i], pts[j], pts[k]}, {lhs, psi[i * n + j], psi[j * n + k]});
            }
    finish(r);
    if (spec.kind() == DisplacementSpec::Kind::Graph)
        r.note = "exhaustive over all vertex triples";
    else if (r.verdict == Verdict::Pass)
        r.note = "no violation found on the sample grid";
    return r;
}

AxiomReport check_h2_usc(const DisplacementSpec& spec, int samples, int shrink_levels, double tol) {
    require_interval(spec, "check_h2_usc");
    require_samples(samples);
    if (shrink_levels < 2) throw InvalidArgument("check_h2_usc needs at least 2 shrink levels");
    AxiomReport r = make_report(Hypothesis::H2Usc, tol);
    const Interval dom = spec.domain();
    const auto pts = sample_points(spec, samples);

    double scale = 0.0;
    for (double x : pts)
        for (double y : pts) scale = std::max(scale, std::fabs(spec.raw(x, y)));

    long long unstable = 0;
    for (double x : pts) {
        for (double y : pts) {
            const double base = std::fabs(spec.raw(x, y));
            double prev = base, last = base;
            for (int k = 0; k < shrink_levels; ++k) {
                const double unit = std::pow(10.0, -(k + 1));
                const double radius = dom.length() * unit;
                const double eps = std::sqrt(unit) * (1.0 + scale);
                double sup = base;
                for (int m = 1; m <= 4; ++m) {
                    for (double sign : {-1.0, 1.0}) {
                        double z = y + sign * radius * m / 4.0;
                        if (!dom.contains(z)) continue;
                        if (std::fabs(spec.raw(y, z)) < eps) sup = std::max(sup, std::fabs(spec.raw(x, z)));
                    }
                }
                prev = last;
                last = sup;
            }
            ++r.sample_count;
            if (last > base + tol)
                add_witness(r, {x, y}, {last, base});
            else if (std::fabs(last - prev) > tol)
                ++unstable;
        }
    }
    finish(r);
    if (r.verdict == Verdict::Pass && unstable > 0) {
        r.verdict = Verdict::Inconclusive;
        r.note = std::to_string(unstable) + " sample pairs did not stabilise over the shrinking neighbourhoods";
    } else if (r.verdict == Verdict::Pass) {
        r.note = "no violation found at this resolution";
    }
    return r;
}

AxiomReport check_h3(const DisplacementSpec& spec, int samples, double tol) {
    require_interval(spec, "check_h3");
    require_samples(samples, 2);
    AxiomReport r = make_report(Hypothesis::H3, tol);
    const auto pts = sample_points(spec, samples);
    for (double x : pts) {
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            double lo = spec.raw(x, pts[i]);
            double hi = spec.raw(x, pts[i + 1]);
            ++r.sample_count;
            if (!(lo <= hi + tol)) add_witness(r, {x, pts[i], pts[i + 1]}, {lo, hi});
        }
    }
    finish(r);
    return r;
}

AxiomReport check_h5(const DisplacementSpec& spec, int samples, int levels, double tol) {
    require_interval(spec, "check_h5");
    require_samples(samples, 2);
    if (levels < 1) throw InvalidArgument("check_h5 needs at least one level");
    AxiomReport r = make_report(Hypothesis::H5, tol);
    const double a = spec.domain().lo;
    for (double x : sample_points(spec, samples)) {
        if (x <= a) continue;
        double last = 0.0;
        for (int k = 1; k <= levels; ++k) last = spec.raw(x, x - (x - a) * std::pow(10.0, -k));
        ++r.sample_count;
        if (!(std::fabs(last) <= tol)) add_witness(r, {x, x - (x - a) * std::pow(10.0, -levels)}, {last});
    }
    finish(r);
    return r;
}

AxiomReport check_d2_positive(const DisplacementSpec& spec, int grid) {
    require_smooth(spec, "check_d2_positive");
    require_samples(grid);
    AxiomReport r = make_report(Hypothesis::D2Positive, 0.0);
    const auto pts = linspace(spec.domain().lo, spec.domain().hi, grid + 1);
    double lowest = std::numeric_limits<double>::infinity();
    double at_x = 0.0, at_y = 0.0;
    for (double x : pts) {
        for (double y : pts) {
            double v = d2_delta(spec, x, y);
            ++r.sample_count;
            if (!(v > 0.0)) add_witness(r, {x, y}, {v});
            if (v < lowest) {
                lowest = v;
                at_x = x;
                at_y = y;
            }
        }
    }
    r.r_estimate = lowest;
    r.note = "lattice minimum at (" + fmt(at_x) + ", " + fmt(at_y) + ")";
    finish(r);
    return r;
}

GammaEstimate gamma_estimate(const DisplacementSpec& spec, double z, double zbar, int grid) {
    require_smooth(spec, "gamma_estimate");
    require_samples(grid);
    const Interval dom = spec.domain();
    if (!dom.contains(z) || !dom.contains(zbar)) throw OutOfDomain("gamma_estimate base points outside the domain");
    auto ratio = [&](double xi) {
        double num = d2_delta(spec, z, xi);
        double den = d2_delta(spec, zbar, xi);
        if (!(num > 0.0) || !(den > 0.0))
            throw NumericalError("nonpositive D2 delta met while estimating gamma at xi=" + fmt(xi), {z, zbar, xi});
        return num / den;
    };
    const auto pts = linspace(dom.lo, dom.hi, grid + 1);
    std::size_t best_i = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double v = ratio(pts[i]);
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    // Golden-section search on the two cells around the best node.
    double lo = pts[best_i == 0 ? 0 : best_i - 1];
    double hi = pts[std::min(best_i + 1, pts.size() - 1)];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo), d = lo + inv_phi * (hi - lo);
    double fc = ratio(c), fd = ratio(d);
    for (int it = 0; it < 80 && hi - lo > 1e-15 * (1.0 + std::fabs(hi)); ++it) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = ratio(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = ratio(d);
        }
    }
    best = std::max({best, fc, fd});
    return {z, zbar, std::max(1.0, best), grid};
}

double rn_density(const DisplacementSpec& spec, double z, double zbar, double t) {
    require_smooth(spec, "rn_density");
    double den = d2_delta(spec, zbar, t);
    if (!(den > 0.0)) throw NumericalError("nonpositive D2 delta in the density denominator at t=" + fmt(t), {zbar, t, den});
    return d2_delta(spec, z, t) / den;
}

AxiomReport check_h4_gamma(const DisplacementSpec& spec, int samples, int grid, double tol) {
    require_smooth(spec, "check_h4_gamma");
    require_samples(samples);
    AxiomReport r = make_report(Hypothesis::H4Gamma, tol);
    const Interval dom = spec.domain();
    double largest = 1.0;
    for (double z : sample_points(spec, samples)) {
        double self = gamma_estimate(spec, z, z, grid).value;
        ++r.sample_count;
        if (self != 1.0) add_witness(r, {z, z}, {self});
        double last_fwd = 0.0, last_bwd = 0.0, zbar = z;
        for (int k = 1; k <= 20; ++k) {
            double step = dom.length() * std::pow(2.0, -k);
            zbar = z + step <= dom.hi ? z + step : z - step;
            last_fwd = gamma_estimate(spec, z, zbar, grid).value;
            last_bwd = gamma_estimate(spec, zbar, z, grid).value;
            largest = std::max({largest, last_fwd, last_bwd});
        }
        ++r.sample_count;
        if (!(last_fwd - 1.0 <= tol && last_bwd - 1.0 <= tol)) add_witness(r, {z, zbar}, {last_fwd, last_bwd});
    }
    r.note = "largest sampled gamma " + fmt(largest);
    finish(r);
    return r;
}

Ball delta_ball(const DisplacementSpec& spec, double x, double r, double tol) {
    require_interval(spec, "delta_ball");
    if (!(r > 0.0)) throw InvalidArgument("ball radius must be positive");
    if (!(tol > 0.0)) throw InvalidArgument("ball tolerance must be positive");
    const Interval dom = spec.domain();
    if (!dom.contains(x)) throw OutOfDomain("ball centre outside the domain");
    auto dx = [&](double t) { return spec.raw(x, t); };
    const double value_tol = tol * (1.0 + r);

    // Shrinks [in, out] (in: inside the ball, out: outside) until both the width and the
    // jump in Δ(x,·) across it are below tolerance, or the bracket can no longer split.
    auto bisect = [&](double in, double out, auto inside) {
        for (int it = 0; it < 2000; ++it) {
            bool wide = std::fabs(out - in) > tol;
            bool steep = std::fabs(dx(out) - dx(in)) > value_tol;
            if (!wide && !steep) break;
            double mid = 0.5 * (in + out);
            if (mid == in || mid == out) break;
            (inside(mid) ? in : out) = mid;
        }
        return std::pair{in, out};
    };

    Ball ball;
    auto above_lower = [&](double t) { return dx(t) > -r; };
    if (above_lower(dom.lo)) {
        ball.lo = dom.lo;
        ball.lo_closed = std::fabs(dx(dom.lo)) < r;
    } else {
        auto [in, out] = bisect(x, dom.lo, above_lower);
        // Across a jump the inside point is attained; otherwise Δ(x, a*) = -r is not in the ball.
        ball.lo = in;
        ball.lo_closed = dx(in) - dx(out) > value_tol;
    }
    auto below_upper = [&](double t) { return dx(t) < r; };
    if (below_upper(dom.hi)) {
        ball.hi = dom.hi;
        ball.hi_closed = std::fabs(dx(dom.hi)) < r;
    } else {
        auto [in, out] = bisect(x, dom.hi, below_upper);
        ball.hi = in;
        ball.hi_closed = dx(out) - dx(in) > value_tol;
    }
    return ball;
}

} // namespace displace
