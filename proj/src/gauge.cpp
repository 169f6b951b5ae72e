#include "displace/gauge.hpp"

#include "displace/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace displace {

struct Gauge::Impl {
    Interval domain;
    Density density;
    std::vector<Jump> jumps;
    std::vector<double> taus;
    std::vector<double> prefix;  // prefix[i] = size_0 + ... + size_{i-1}, summed left to right
    std::vector<OpenInterval> flats;
    QuadratureOptions quad;
    std::vector<double> xs;   // breakpoints of the cumulative table
    std::vector<double> cum;  // ∫_a^{xs[i]} density
    std::optional<std::string> density_source;
};

namespace {

bool inside_flat(const std::vector<OpenInterval>& flats, double lo, double hi) {
    return std::any_of(flats.begin(), flats.end(), [&](const OpenInterval& f) { return f.lo <= lo && hi <= f.hi; });
}

void build_table(Gauge::Density const& density, Interval domain, const std::vector<double>& taus,
                 const std::vector<OpenInterval>& flats, const QuadratureOptions& quad, std::vector<double>& xs,
                 std::vector<double>& cum) {
    std::vector<double> cuts{domain.lo, domain.hi};
    for (double t : taus)
        if (t > domain.lo && t < domain.hi) cuts.push_back(t);
    for (const auto& f : flats) {
        cuts.push_back(f.lo);
        cuts.push_back(f.hi);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    xs.assign(1, domain.lo);
    cum.assign(1, 0.0);
    if (!density) {
        xs.push_back(domain.hi);
        cum.push_back(0.0);
        return;
    }
    auto checked = [&density](double t) {
        double v = density(t);
        if (!(v >= 0.0))
            throw InvalidArgument("gauge density must be nonnegative; got " + std::to_string(v) + " at t=" +
                                  std::to_string(t));
        return v;
    };
    double width = domain.length();
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double lo = cuts[i], hi = cuts[i + 1];
        if (inside_flat(flats, lo, hi)) {
            xs.push_back(hi);
            cum.push_back(cum.back());
            continue;
        }
        QuadratureOptions local = quad;
        local.abs_tol = quad.abs_tol * (hi - lo) / width;
        integrate_panels(checked, lo, hi, local, [&](double, double panel_hi, double value) {
            xs.push_back(panel_hi);
            cum.push_back(cum.back() + value);
        });
        xs.back() = hi;
    }
}

} // namespace

Gauge::Gauge(Interval domain, Density density, std::vector<Jump> jumps, std::vector<OpenInterval> flats,
             QuadratureOptions quad) {
    if (!(domain.lo < domain.hi) || !std::isfinite(domain.lo) || !std::isfinite(domain.hi))
        throw InvalidArgument("gauge domain must be a non-degenerate finite interval");
    std::sort(jumps.begin(), jumps.end(), [](const Jump& x, const Jump& y) { return x.tau < y.tau; });
    for (std::size_t i = 0; i < jumps.size(); ++i) {
        const auto& j = jumps[i];
        if (!domain.contains(j.tau)) throw InvalidArgument("jump point " + std::to_string(j.tau) + " outside domain");
        if (!(j.size > 0.0) || !std::isfinite(j.size))
            throw InvalidArgument("jump sizes must be positive and finite");
        if (i > 0 && jumps[i - 1].tau == j.tau)
            throw InvalidArgument("duplicate jump point " + std::to_string(j.tau));
    }
    std::sort(flats.begin(), flats.end(), [](const OpenInterval& x, const OpenInterval& y) { return x.lo < y.lo; });
    for (std::size_t i = 0; i < flats.size(); ++i) {
        const auto& f = flats[i];
        if (!(f.lo < f.hi) || f.lo < domain.lo || f.hi > domain.hi)
            throw InvalidArgument("flat interval must be non-empty and inside the domain");
        if (i > 0 && flats[i - 1].hi > f.lo) throw InvalidArgument("flat intervals overlap");
        for (const auto& j : jumps)
            if (f.contains(j.tau)) throw InvalidArgument("jump point inside a declared flat interval");
        if (density) {
            for (int k = 1; k < 8; ++k) {
                double t = f.lo + (f.hi - f.lo) * k / 8.0;
                if (std::fabs(density(t)) > 1e-12)
                    throw InvalidArgument("density is not zero on declared flat interval at t=" + std::to_string(t));
            }
        }
    }

    auto impl = std::make_shared<Impl>();
    impl->domain = domain;
    impl->density = std::move(density);
    impl->jumps = std::move(jumps);
    impl->flats = std::move(flats);
    impl->quad = quad;
    impl->prefix.assign(1, 0.0);
    for (const auto& j : impl->jumps) {
        impl->taus.push_back(j.tau);
        impl->prefix.push_back(impl->prefix.back() + j.size);
    }
    build_table(impl->density, domain, impl->taus, impl->flats, quad, impl->xs, impl->cum);
    impl_ = std::move(impl);
}

Gauge Gauge::identity(Interval domain) {
    return Gauge(domain, [](double) { return 1.0; }).with_density_source("1");
}

double Gauge::continuous_part(double t) const {
    const auto& m = *impl_;
    if (!m.domain.contains(t))
        throw OutOfDomain("t=" + std::to_string(t) + " outside gauge domain [" + std::to_string(m.domain.lo) + ", " +
                          std::to_string(m.domain.hi) + "]");
    if (!m.density) return 0.0;
    auto it = std::upper_bound(m.xs.begin(), m.xs.end(), t);
    std::size_t k = static_cast<std::size_t>(it - m.xs.begin()) - 1;
    if (m.xs[k] == t || k + 1 >= m.xs.size()) return m.cum[k];
    double lo = m.cum[k], hi = m.cum[k + 1];
    if (lo == hi) return lo;
    double v = lo + gauss_kronrod15(m.density, m.xs[k], t).value;
    return std::clamp(v, lo, hi);
}

double Gauge::eval(double t) const {
    double cont = continuous_part(t);
    const auto& m = *impl_;
    auto k = static_cast<std::size_t>(std::lower_bound(m.taus.begin(), m.taus.end(), t) - m.taus.begin());
    return cont + m.prefix[k];
}

double Gauge::eval_right(double t) const {
    double cont = continuous_part(t);
    const auto& m = *impl_;
    auto k = static_cast<std::size_t>(std::upper_bound(m.taus.begin(), m.taus.end(), t) - m.taus.begin());
    return cont + m.prefix[k];
}

double Gauge::jump_at(double t) const {
    const auto& m = *impl_;
    auto it = std::lower_bound(m.taus.begin(), m.taus.end(), t);
    if (it == m.taus.end() || *it != t) return 0.0;
    return m.jumps[static_cast<std::size_t>(it - m.taus.begin())].size;
}

double Gauge::density(double t) const { return impl_->density ? impl_->density(t) : 0.0; }
bool Gauge::has_density() const noexcept { return static_cast<bool>(impl_->density); }
const Interval& Gauge::domain() const noexcept { return impl_->domain; }
const std::vector<Jump>& Gauge::jumps() const noexcept { return impl_->jumps; }
const std::vector<OpenInterval>& Gauge::flats() const noexcept { return impl_->flats; }
const QuadratureOptions& Gauge::quadrature() const noexcept { return impl_->quad; }
const std::optional<std::string>& Gauge::density_source() const noexcept { return impl_->density_source; }

Gauge Gauge::with_density_source(std::string source) const {
    auto copy = std::make_shared<Impl>(*impl_);
    copy->density_source = std::move(source);
    return Gauge(std::shared_ptr<const Impl>(std::move(copy)));
}

double measure(const Gauge& g, const MeasureSet& set) {
    using Kind = MeasureSet::Kind;
    double c = set.c, d = set.d;
    if (c > d) throw InvalidArgument("malformed interval: c > d");
    if (!g.domain().contains(c) || !g.domain().contains(d))
        throw OutOfDomain("measured set leaves the gauge domain");
    if (set.kind == Kind::Point || (c == d && set.kind == Kind::Closed)) return g.jump_at(c);
    if (c == d) return 0.0;
    switch (set.kind) {
    case Kind::ClosedOpen: return g.eval(d) - g.eval(c);
    case Kind::Open: return g.eval(d) - g.eval_right(c);
    case Kind::Closed: return g.eval_right(d) - g.eval(c);
    case Kind::OpenClosed: return g.eval_right(d) - g.eval_right(c);
    case Kind::Point: break;
    }
    return 0.0;
}

bool DistinguishedSets::excluded(double t, double snap) const {
    for (const auto& c : c_set)
        if (c.contains(t)) return true;
    return std::any_of(n_set.begin(), n_set.end(), [&](double n) { return std::fabs(t - n) <= snap; });
}

bool DistinguishedSets::is_jump(double t) const { return std::binary_search(d_set.begin(), d_set.end(), t); }

DistinguishedSets distinguished_sets(const Gauge& g, int samples) {
    if (samples < 2) throw InvalidArgument("distinguished_sets needs at least 2 samples");
    DistinguishedSets out;
    for (const auto& j : g.jumps()) out.d_set.push_back(j.tau);

    const Interval dom = g.domain();
    std::vector<OpenInterval> candidates(g.flats().begin(), g.flats().end());

    std::vector<double> ts(static_cast<std::size_t>(samples) + 1), dens(ts.size());
    double max_density = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        ts[i] = dom.lo + dom.length() * static_cast<double>(i) / samples;
        dens[i] = g.density(ts[i]);
        max_density = std::max(max_density, dens[i]);
    }
    const double threshold = 1e-12 * (1.0 + max_density);
    auto is_zero = [&](double t) { return g.density(t) < threshold; };
    // Boundary between a nonzero sample `nz` and a zero sample `z`.
    auto refine = [&](double nz, double z) {
        for (int it = 0; it < 60 && std::fabs(z - nz) > 1e-15 * (1.0 + std::fabs(z)); ++it) {
            double mid = 0.5 * (nz + z);
            (is_zero(mid) ? z : nz) = mid;
        }
        return z;
    };
    for (std::size_t i = 0; i < ts.size();) {
        if (!(dens[i] < threshold)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < ts.size() && dens[j + 1] < threshold) ++j;
        if (j > i) {
            double lo = i == 0 ? dom.lo : refine(ts[i - 1], ts[i]);
            double hi = j + 1 == ts.size() ? dom.hi : refine(ts[j + 1], ts[j]);
            candidates.push_back({lo, hi});
        }
        i = j + 1;
    }

    // Split at jumps, then merge overlapping or touching pieces (touching only across non-jump points).
    std::vector<OpenInterval> pieces;
    for (const auto& c : candidates) {
        double lo = c.lo;
        for (double tau : out.d_set) {
            if (tau > lo && tau < c.hi) {
                pieces.push_back({lo, tau});
                lo = tau;
            }
        }
        pieces.push_back({lo, c.hi});
    }
    std::sort(pieces.begin(), pieces.end(), [](const OpenInterval& x, const OpenInterval& y) { return x.lo < y.lo; });
    for (const auto& p : pieces) {
        if (!(p.lo < p.hi)) continue;
        if (!out.c_set.empty()) {
            auto& last = out.c_set.back();
            bool touching = p.lo <= last.hi && !(p.lo == last.hi && out.is_jump(p.lo));
            if (touching) {
                last.hi = std::max(last.hi, p.hi);
                continue;
            }
        }
        out.c_set.push_back(p);
    }
    for (const auto& c : out.c_set)
        for (double e : {c.lo, c.hi})
            if (!out.is_jump(e) && (out.n_set.empty() || out.n_set.back() != e)) out.n_set.push_back(e);
    std::sort(out.n_set.begin(), out.n_set.end());
    out.n_set.erase(std::unique(out.n_set.begin(), out.n_set.end()), out.n_set.end());
    return out;
}

} // namespace displace
