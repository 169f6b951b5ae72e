#include "displace/solver.hpp"

#include "displace/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace displace {

namespace {

void validate(const Gauge& g, const Interval& iv, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) throw InvalidArgument("step must be positive and finite");
    if (!(iv.lo < iv.hi)) throw InvalidArgument("solver interval must be non-degenerate");
    if (!g.domain().contains(iv.lo) || !g.domain().contains(iv.hi))
        throw OutOfDomain("solver interval must lie inside the gauge domain");
}

std::vector<double> build_mesh(const Interval& iv, double step, const Gauge& g, const std::vector<double>& extra) {
    const double cells = std::ceil(iv.length() / step);
    if (cells > 1e8) throw InvalidArgument("step too small for the interval: mesh would exceed 1e8 cells");
    const auto n = std::max<long long>(1, static_cast<long long>(cells));
    std::vector<double> mesh;
    mesh.reserve(static_cast<std::size_t>(n) + 1 + g.jumps().size());
    for (long long i = 0; i <= n; ++i) mesh.push_back(iv.lo + iv.length() * static_cast<double>(i) / static_cast<double>(n));
    mesh.back() = iv.hi;
    for (const auto& j : g.jumps())
        if (j.tau > iv.lo && j.tau < iv.hi) mesh.push_back(j.tau);
    for (const auto& f : g.flats())
        for (double e : {f.lo, f.hi})
            if (e > iv.lo && e < iv.hi) mesh.push_back(e);
    for (double e : extra)
        if (e > iv.lo && e < iv.hi) mesh.push_back(e);
    std::sort(mesh.begin(), mesh.end());
    mesh.erase(std::unique(mesh.begin(), mesh.end()), mesh.end());
    return mesh;
}

void require_finite(double u, double t_last, double u_last) {
    if (!std::isfinite(u))
        throw NumericalError("solution left the finite range after t=" + std::to_string(t_last), {t_last, u_last});
}

bool inside_flat(const Gauge& g, double lo, double hi) {
    return std::any_of(g.flats().begin(), g.flats().end(),
                       [&](const OpenInterval& f) { return f.lo <= lo && hi <= f.hi; });
}

double max_cell(const std::vector<double>& mesh) {
    double w = 0.0;
    for (std::size_t k = 0; k + 1 < mesh.size(); ++k) w = std::max(w, mesh[k + 1] - mesh[k]);
    return w;
}

} // namespace

const JumpRecord* IvpSolution::jump_at(double t) const {
    auto it = std::lower_bound(jumps.begin(), jumps.end(), t, [](const JumpRecord& j, double v) { return j.tau < v; });
    return it != jumps.end() && it->tau == t ? &*it : nullptr;
}

double IvpSolution::right(double t) const {
    if (const auto* j = jump_at(t)) return j->after;
    return at(t);
}

double IvpSolution::at(double t) const {
    if (nodes.empty() || t < nodes.front().t || t > nodes.back().t)
        throw OutOfDomain("t=" + std::to_string(t) + " outside the solution mesh");
    auto it = std::lower_bound(nodes.begin(), nodes.end(), t, [](const IvpNode& n, double v) { return n.t < v; });
    if (it->t == t) return it->u;
    const IvpNode& hi = *it;
    const IvpNode& lo = *(it - 1);
    const JumpRecord* j = jump_at(lo.t);
    double start = j ? j->after : lo.u;
    return start + (hi.u - start) * (t - lo.t) / (hi.t - lo.t);
}

IvpSolution solve_ivp(const IvpProblem& p, double step, int picard_sweeps) {
    validate(p.gauge, p.interval, step);
    if (!p.rhs) throw InvalidArgument("IVP needs a right-hand side");
    if (picard_sweeps < 0) throw InvalidArgument("picard_sweeps must be nonnegative");
    const Gauge& g = p.gauge;
    const auto mesh = build_mesh(p.interval, step, g, {});
    const std::size_t n = mesh.size();
    std::vector<double> gc(n);
    for (std::size_t k = 0; k < n; ++k) gc[k] = g.continuous_part(mesh[k]);

    IvpSolution sol;
    sol.method = "g-euler";
    sol.step_stat = max_cell(mesh);
    sol.nodes.reserve(n);

    double u = p.u0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double t = mesh[k];
        sol.nodes.push_back({t, u});
        double start = u;
        if (double size = g.jump_at(t); size > 0.0) {
            const double before = u;
            const double after = before + p.rhs(t, before) * size;
            require_finite(after, t, before);
            sol.jumps.push_back({t, before, after});
            start = after;
        }
        double next = start + p.rhs(t, start) * (gc[k + 1] - gc[k]);
        require_finite(next, t, start);
        u = next;
    }
    sol.nodes.push_back({mesh.back(), u});

    for (int sweep = 0; sweep < picard_sweeps; ++sweep) {
        const IvpSolution old = sol;
        sol.jumps.clear();
        sol.method = "g-euler+picard";
        double v = p.u0;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const double t = mesh[k];
            sol.nodes[k].u = v;
            double after = v;
            if (double size = g.jump_at(t); size > 0.0) {
                after = v + p.rhs(t, v) * size;
                require_finite(after, t, v);
                sol.jumps.push_back({t, v, after});
            }
            const double left = p.rhs(t, old.right(t));
            const double right = p.rhs(mesh[k + 1], old.nodes[k + 1].u);
            double next = after + 0.5 * (left + right) * (gc[k + 1] - gc[k]);
            require_finite(next, t, after);
            v = next;
        }
        sol.nodes.back().u = v;
    }
    return sol;
}

IvpSolution solve_surface(const SurfaceProblem& p, double step) {
    const Gauge& g = p.work_gauge;
    validate(g, p.interval, step);
    if (!p.source.value) throw InvalidArgument("surface problem needs a source term");
    const auto mesh = build_mesh(p.interval, step, g, p.source.breaks);
    const std::size_t n = mesh.size();
    const std::function<double(double)> h = p.source.value;

    std::vector<double> H(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) H[k + 1] = H[k] + gauss_legendre5(h, mesh[k], mesh[k + 1]);

    std::vector<double> left(n);
    left[n - 1] = p.terminal_value;
    std::vector<JumpRecord> records;
    for (std::size_t k = n - 1; k-- > 0;) {
        const double lo = mesh[k], hi = mesh[k + 1];
        double cont = 0.0;
        if (g.has_density() && !inside_flat(g, lo, hi)) {
            auto rule = gauss_legendre5_rule(lo, hi);
            for (int i = 0; i < 5; ++i) {
                double s = rule.nodes[i];
                double Hs = H[k] + gauss_legendre5(h, lo, s);
                cont += rule.weights[i] * Hs * g.density(s);
            }
        }
        const double right = left[k + 1] + cont;
        require_finite(right, hi, left[k + 1]);
        if (double size = g.jump_at(lo); size > 0.0) {
            left[k] = right + H[k] * size;
            records.push_back({lo, left[k], right});
        } else {
            left[k] = right;
        }
        require_finite(left[k], lo, right);
    }

    IvpSolution sol;
    sol.method = "terminal-reconstruction";
    sol.step_stat = max_cell(mesh);
    sol.nodes.reserve(n);
    for (std::size_t k = 0; k < n; ++k) sol.nodes.push_back({mesh[k], left[k]});
    std::reverse(records.begin(), records.end());
    sol.jumps = std::move(records);
    return sol;
}

ResidualReport verify_solution(const IvpProblem& p, const IvpSolution& sol, int grid) {
    if (grid < 1) throw InvalidArgument("grid must be positive");
    if (sol.nodes.size() < 2) throw InvalidArgument("solution has no mesh cells");
    const Gauge& g = p.gauge;
    auto integrand = [&](double s) { return p.rhs(s, sol.at(s)) * g.density(s); };
    auto cell_integral = [&](double lo, double hi) {
        if (!g.has_density() || inside_flat(g, lo, hi)) return 0.0;
        return gauss_legendre5(integrand, lo, hi);
    };
    auto atom = [&](double t) {
        double size = g.jump_at(t);
        return size > 0.0 ? p.rhs(t, sol.at(t)) * size : 0.0;
    };

    const auto& nodes = sol.nodes;
    std::vector<double> prefix(nodes.size(), 0.0);
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k)
        prefix[k + 1] = prefix[k] + atom(nodes[k].t) + cell_integral(nodes[k].t, nodes[k + 1].t);

    ResidualReport r;
    r.grid = grid;
    const double a = nodes.front().t, b = nodes.back().t;
    for (int i = 0; i <= grid; ++i) {
        double t = i == grid ? b : a + (b - a) * i / grid;
        auto it = std::upper_bound(nodes.begin(), nodes.end(), t, [](double v, const IvpNode& nd) { return v < nd.t; });
        auto k = static_cast<std::size_t>(it - nodes.begin()) - 1;
        double integral = prefix[k];
        if (nodes[k].t < t) integral += atom(nodes[k].t) + cell_integral(nodes[k].t, t);
        double res = std::fabs(sol.at(t) - p.u0 - integral);
        if (i == 0 || res > r.max_residual) {
            r.max_residual = res;
            r.worst_point = t;
        }
    }
    return r;
}

} // namespace displace
