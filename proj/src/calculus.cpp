#include "displace/calculus.hpp"

#include "displace/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace displace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Limit {
    double value = std::numeric_limits<double>::quiet_NaN();
    double error = kInf;
    int samples = 0;
    std::vector<double> sequence;
};

// Neville tableau over h0, h0/2, h0/4, ... for a quantity whose error expands
// in powers of h^order. Stops once the diagonal starts to drift.
Limit extrapolate(const std::function<double(double)>& q, double h0, int levels, int order) {
    const double c = std::pow(2.0, order);
    std::vector<std::vector<double>> t(static_cast<std::size_t>(levels));
    Limit out;
    double h = h0;
    for (std::size_t i = 0; i < t.size(); ++i, h *= 0.5) {
        double qi = q(h);
        ++out.samples;
        out.sequence.push_back(qi);
        if (!std::isfinite(qi)) break;
        t[i].push_back(qi);
        double fac = c;
        for (std::size_t j = 1; j <= i; ++j, fac *= c) {
            t[i].push_back((fac * t[i][j - 1] - t[i - 1][j - 1]) / (fac - 1.0));
            double err = std::max(std::fabs(t[i][j] - t[i][j - 1]), std::fabs(t[i][j] - t[i - 1][j - 1]));
            if (err <= out.error) {
                out.error = err;
                out.value = t[i][j];
            }
        }
        if (i > 0 && std::fabs(t[i][i] - t[i - 1][i - 1]) >= 2.0 * out.error) break;
    }
    return out;
}

enum class Side { Both, Right, Left };

struct Stencil {
    Side side = Side::Both;
    double h0 = 0.0;
};

// Largest first step that keeps every quotient away from the obstacles.
Stencil stencil(double x, const Interval& dom, const std::vector<double>& obstacles) {
    double dl = x - dom.lo, dr = dom.hi - x;
    for (double o : obstacles) {
        if (o < x) dl = std::min(dl, x - o);
        if (o > x) dr = std::min(dr, o - x);
    }
    const double len = dom.length();
    const double edge = 1e-6 * len;
    if (x - dom.lo <= edge) return {Side::Right, std::min(0.1 * len, 0.5 * dr)};
    if (dom.hi - x <= edge) return {Side::Left, std::min(0.1 * len, 0.5 * dl)};
    return {Side::Both, std::min(0.1 * len, 0.5 * std::min(dl, dr))};
}

// Quotient N(y)/D(y) where both vanish at y = x; symmetric version in the interior.
std::function<double(double)> quotient(Side side, double x, std::function<double(double)> num,
                                       std::function<double(double)> den) {
    switch (side) {
    case Side::Right: return [=](double h) { return num(x + h) / den(x + h); };
    case Side::Left: return [=](double h) { return num(x - h) / den(x - h); };
    case Side::Both: break;
    }
    return [=](double h) { return (num(x + h) - num(x - h)) / (den(x + h) - den(x - h)); };
}

DerivativeResult settle(const std::function<double(double)>& q, const Stencil& s, int levels, double x) {
    if (!(s.h0 > 0.0)) throw NumericalError("no room for a difference quotient at x=" + std::to_string(x), {x});
    Limit lim = extrapolate(q, s.h0, levels, s.side == Side::Both ? 2 : 1);
    if (!std::isfinite(lim.value) || !(lim.error <= kDerivativeTol * std::max(1.0, std::fabs(lim.value))))
        throw NumericalError("difference quotients did not converge at x=" + std::to_string(x), lim.sequence);
    return {lim.value, PointClass::Continuity, lim.error, lim.samples};
}

void require_levels(int levels) {
    if (levels < 2) throw InvalidArgument("need at least 2 shrink levels");
}

void require_in(const Interval& dom, double x) {
    if (!dom.contains(x)) throw OutOfDomain("point " + std::to_string(x) + " outside the domain");
}

std::vector<double> obstacles_of(const Gauge& g, const DistinguishedSets& sets, const std::vector<double>& breaks,
                                 double x) {
    std::vector<double> out;
    for (double t : sets.d_set) out.push_back(t);
    for (const auto& c : sets.c_set) {
        out.push_back(c.lo);
        out.push_back(c.hi);
    }
    for (const auto& c : g.flats()) {
        out.push_back(c.lo);
        out.push_back(c.hi);
    }
    for (double b : breaks) out.push_back(b);
    std::erase(out, x);
    return out;
}

// f(x+): exact when supplied, else extrapolated from the right.
std::pair<double, double> right_value(const ScalarFunction& f, const Gauge& g, const DistinguishedSets& sets,
                                      double x, int levels, int& samples) {
    if (f.right_limit) {
        ++samples;
        return {f.right_limit(x), 0.0};
    }
    const Interval dom = g.domain();
    if (x >= dom.hi) throw NumericalError("f(b+) is unknown without an explicit right limit", {x});
    double room = dom.hi - x;
    for (double o : obstacles_of(g, sets, f.breaks, x))
        if (o > x) room = std::min(room, o - x);
    Limit lim = extrapolate([&](double h) { return f(x + h); }, std::min(0.1 * dom.length(), 0.5 * room), levels, 1);
    samples += lim.samples;
    if (!std::isfinite(lim.value) || !(lim.error <= kDerivativeTol * std::max(1.0, std::fabs(lim.value))))
        throw NumericalError("right limit did not converge at x=" + std::to_string(x), lim.sequence);
    return {lim.value, lim.error};
}

const DistinguishedSets& ensure_sets(const Gauge& g, const DistinguishedSets* given, DistinguishedSets& storage) {
    if (given) return *given;
    storage = distinguished_sets(g);
    return storage;
}

double eps_rounding(double a, double b) { return std::numeric_limits<double>::epsilon() * (std::fabs(a) + std::fabs(b)); }

std::vector<double> cell_cuts(double lo, double hi, std::vector<double> extra) {
    std::vector<double> cuts{lo, hi};
    for (double t : extra)
        if (t > lo && t < hi) cuts.push_back(t);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

} // namespace

std::string_view to_string(PointClass c) {
    switch (c) {
    case PointClass::Continuity: return "continuity_point";
    case PointClass::Jump: return "jump_point";
    case PointClass::Excluded: return "excluded_point";
    }
    return "?";
}

DerivativeResult delta_derivative(const ScalarFunction& f, const Gauge& g, double x, int shrink_levels,
                                  const DistinguishedSets* sets) {
    require_levels(shrink_levels);
    require_in(g.domain(), x);
    DistinguishedSets storage;
    const auto& ds = ensure_sets(g, sets, storage);

    if (double jump = g.jump_at(x); jump > 0.0) {
        int samples = 1;
        double fx = f(x);
        auto [fp, err] = right_value(f, g, ds, x, shrink_levels, samples);
        double v = (fp - fx) / jump;
        return {v, PointClass::Jump, (err + eps_rounding(fp, fx)) / jump, samples};
    }
    if (ds.excluded(x)) return {std::nullopt, PointClass::Excluded, 0.0, 0};

    const double fx = f(x), gx = g(x);
    auto s = stencil(x, g.domain(), obstacles_of(g, ds, f.breaks, x));
    auto q = quotient(
        s.side, x, [&f, fx](double y) { return f(y) - fx; }, [&g, gx](double y) { return g(y) - gx; });
    return settle(q, s, shrink_levels, x);
}

DerivativeResult delta_derivative(const ScalarFunction& f, const DisplacementSpec& spec, double x, int shrink_levels) {
    if (!spec.as_smooth()) throw UnsupportedVariant("displacement quotient derivative requires a smooth displacement");
    require_levels(shrink_levels);
    require_in(spec.domain(), x);
    const double fx = f(x);
    auto s = stencil(x, spec.domain(), f.breaks);
    auto q = quotient(
        s.side, x, [&f, fx](double y) { return f(y) - fx; }, [&spec, x](double y) { return spec.raw(x, y); });
    return settle(q, s, shrink_levels, x);
}

DerivativeResult pair_derivative(const ScalarFunction& f, const Gauge& g1, const DisplacementSpec& delta2, double x,
                                 int shrink_levels, const DistinguishedSets* sets) {
    require_levels(shrink_levels);
    require_in(g1.domain(), x);
    DistinguishedSets storage;
    const auto& ds = ensure_sets(g1, sets, storage);
    const double fx = f(x);

    if (double jump = g1.jump_at(x); jump > 0.0) {
        int samples = 1;
        auto [fp, err] = right_value(f, g1, ds, x, shrink_levels, samples);
        double num = delta2(fx, fp);
        return {num / jump, PointClass::Jump, (err + eps_rounding(num, 0.0)) / jump, samples};
    }
    if (ds.excluded(x)) return {std::nullopt, PointClass::Excluded, 0.0, 0};

    const double gx = g1(x);
    auto s = stencil(x, g1.domain(), obstacles_of(g1, ds, f.breaks, x));
    auto q = quotient(
        s.side, x, [&](double y) { return delta2(fx, f(y)); }, [&g1, gx](double y) { return g1(y) - gx; });
    return settle(q, s, shrink_levels, x);
}

double stieltjes_integral(const ScalarFunction& f, const Gauge& g, double upper, const QuadratureOptions& opts) {
    return stieltjes_integral(f, g, g.domain().lo, upper, opts);
}

double stieltjes_integral(const ScalarFunction& f, const Gauge& g, double lower, double upper,
                          const QuadratureOptions& opts) {
    const Interval dom = g.domain();
    require_in(dom, lower);
    require_in(dom, upper);
    if (lower > upper) throw InvalidArgument("integration bounds out of order");
    if (lower == upper) return 0.0;

    double total = 0.0;
    if (g.has_density()) {
        std::vector<double> extra;
        for (const auto& j : g.jumps()) extra.push_back(j.tau);
        for (const auto& fl : g.flats()) {
            extra.push_back(fl.lo);
            extra.push_back(fl.hi);
        }
        extra.insert(extra.end(), f.breaks.begin(), f.breaks.end());
        auto cuts = cell_cuts(lower, upper, std::move(extra));
        auto integrand = [&](double t) { return f(t) * g.density(t); };
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            double lo = cuts[i], hi = cuts[i + 1];
            bool flat = std::any_of(g.flats().begin(), g.flats().end(),
                                    [&](const OpenInterval& fl) { return fl.lo <= lo && hi <= fl.hi; });
            if (flat) continue;
            QuadratureOptions local = opts;
            local.abs_tol = opts.abs_tol * (hi - lo) / (upper - lower);
            total += integrate(integrand, lo, hi, local).value;
        }
    }
    for (const auto& j : g.jumps()) {
        if (j.tau < lower || j.tau >= upper) continue;
        double v = f(j.tau);
        if (!std::isfinite(v)) throw NumericalError("non-finite integrand at jump t=" + std::to_string(j.tau), {j.tau, v});
        total += v * j.size;
    }
    return total;
}

double path_integral(const ScalarFunction& f, const MeasurePath& path, const DisplacementSpec& spec, double upper,
                     const QuadratureOptions& opts) {
    if (!spec.as_smooth()) throw UnsupportedVariant("path integral requires a smooth displacement");
    if (!path.alpha) throw InvalidArgument("measure path needs an alpha callable");
    const Interval dom = spec.domain();
    require_in(dom, upper);
    if (upper == dom.lo) return 0.0;
    auto integrand = [&](double t) {
        double z = path.alpha(t);
        if (!dom.contains(z)) throw OutOfDomain("measure path leaves the domain at t=" + std::to_string(t));
        return f(t) * d2_delta(spec, z, t);
    };
    auto cuts = cell_cuts(dom.lo, upper, f.breaks);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        QuadratureOptions local = opts;
        local.abs_tol = opts.abs_tol * (cuts[i + 1] - cuts[i]) / (upper - dom.lo);
        total += integrate(integrand, cuts[i], cuts[i + 1], local).value;
    }
    return total;
}

FtcReport ftc_forward_check(const ScalarFunction& f, const Gauge& g, int grid, int shrink_levels) {
    if (grid < 1) throw InvalidArgument("grid must be positive");
    const Interval dom = g.domain();
    const auto sets = distinguished_sets(g);

    ScalarFunction F;
    F.value = [&](double x) { return stieltjes_integral(f, g, x); };
    F.right_limit = [&](double x) {
        double j = g.jump_at(x);
        return j > 0.0 ? stieltjes_integral(f, g, x) + f(x) * j : stieltjes_integral(f, g, x);
    };
    F.breaks = f.breaks;

    std::vector<double> points;
    for (int i = 1; i <= grid; ++i) points.push_back(dom.lo + dom.length() * i / (grid + 1));
    for (double tau : sets.d_set) points.push_back(tau);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    FtcReport r;
    r.grid = grid;
    for (double x : points) {
        bool jump = sets.is_jump(x);
        bool on_break = std::any_of(f.breaks.begin(), f.breaks.end(),
                                    [&](double b) { return std::fabs(x - b) <= 1e-12 * (1.0 + std::fabs(b)); });
        if (!jump && (on_break || sets.excluded(x))) {
            r.excluded.push_back(x);
            continue;
        }
        ++r.checked;
        double err;
        try {
            auto d = delta_derivative(F, g, x, shrink_levels, &sets);
            err = std::fabs(*d.value - f(x));
        } catch (const NumericalError&) {
            r.failures.push_back(x);
            err = kInf;
        }
        if (r.checked == 1 || err > r.max_error) {
            r.max_error = err;
            r.worst_point = x;
        }
    }
    return r;
}

FtcReport ftc2_check(const ScalarFunction& F, const Gauge& g, int grid, int shrink_levels) {
    if (grid < 1) throw InvalidArgument("grid must be positive");
    const Interval dom = g.domain();
    const auto sets = distinguished_sets(g);

    std::vector<double> mesh;
    for (int i = 0; i <= grid; ++i) mesh.push_back(dom.lo + dom.length() * i / grid);
    mesh.back() = dom.hi;
    for (double tau : sets.d_set) mesh.push_back(tau);
    for (const auto& c : sets.c_set) {
        mesh.push_back(c.lo);
        mesh.push_back(c.hi);
    }
    mesh = cell_cuts(dom.lo, dom.hi, mesh);

    FtcReport r;
    r.grid = grid;
    r.worst_point = dom.lo;
    auto derivative = [&](double x) -> std::optional<double> {
        ++r.checked;
        try {
            auto d = delta_derivative(F, g, x, shrink_levels, &sets);
            if (d.point_class == PointClass::Excluded) r.excluded.push_back(x);
            return d.value;
        } catch (const NumericalError&) {
            r.failures.push_back(x);
            return std::nullopt;
        }
    };

    const double base = F(dom.lo);
    double recon = base;
    for (std::size_t k = 0; k + 1 < mesh.size(); ++k) {
        const double lo = mesh[k], hi = mesh[k + 1];
        double atom = g.jump_at(lo);
        double d_lo = 0.0;
        if (atom > 0.0 || k > 0) {
            auto v = derivative(lo);
            d_lo = v.value_or(0.0);
        }
        if (atom > 0.0) recon += d_lo * atom;
        bool flat = std::any_of(sets.c_set.begin(), sets.c_set.end(),
                                [&](const OpenInterval& c) { return c.lo <= lo && hi <= c.hi; });
        if (g.has_density() && !flat) {
            auto rule = gauss_legendre5_rule(lo, hi);
            double cell = 0.0;
            for (int i = 0; i < 5; ++i) {
                double dens = g.density(rule.nodes[i]);
                if (dens == 0.0) continue;
                cell += rule.weights[i] * derivative(rule.nodes[i]).value_or(0.0) * dens;
            }
            recon += cell;
        }
        double dev = std::fabs(recon - F(hi));
        if (dev > r.max_error) {
            r.max_error = dev;
            r.worst_point = hi;
        }
    }
    return r;
}

} // namespace displace
