#include "displace/quadrature.hpp"

#include "displace/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace displace {

namespace {

// Kronrod abscissae on [0,1]; odd indices are the embedded Gauss points.
constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
constexpr std::array<double, 4> kWg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

constexpr std::array<double, 5> kXgl5{
    -0.906179845938663992797626878299393, -0.538469310105683091036314420700208, 0.0,
    0.538469310105683091036314420700208, 0.906179845938663992797626878299393,
};
constexpr std::array<double, 5> kWgl5{
    0.236926885056189087514264040719918, 0.478628670499366468041291514835638,
    0.568888888888888888888888888888889, 0.478628670499366468041291514835638,
    0.236926885056189087514264040719918,
};

double checked(const std::function<double(double)>& f, double t) {
    double v = f(t);
    if (!std::isfinite(v)) throw NumericalError("non-finite integrand value at t=" + std::to_string(t), {t, v});
    return v;
}

struct Panel {
    double lo, hi;
    QuadratureResult r;
    int depth;
};

// Global adaptive bisection: always split the panel with the largest error
// estimate until the summed estimate meets the tolerance.
QuadratureResult run(const std::function<double(double)>& f, double lo, double hi, const QuadratureOptions& opts,
                     const std::function<void(double, double, double)>* visit) {
    QuadratureResult total;
    if (hi == lo) return total;
    if (hi < lo) throw InvalidArgument("integration bounds out of order");

    constexpr std::size_t kMaxPanels = 200000;
    std::vector<Panel> panels{{lo, hi, gauss_kronrod15(f, lo, hi), 0}};
    total.evaluations = panels.front().r.evaluations;
    auto worse = [](const Panel& a, const Panel& b) { return a.r.error < b.r.error; };
    // Heap of splittable panels; panels that cannot be split any further are set aside.
    std::vector<Panel> done;
    double value = panels.front().r.value, error = panels.front().r.error;
    while (!panels.empty() && error > std::max(opts.abs_tol, opts.rel_tol * std::fabs(value))) {
        std::pop_heap(panels.begin(), panels.end(), worse);
        Panel p = panels.back();
        panels.pop_back();
        double mid = 0.5 * (p.lo + p.hi);
        bool narrow = p.hi - p.lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(p.lo));
        if (p.depth >= opts.max_depth || narrow || mid <= p.lo || mid >= p.hi) {
            done.push_back(p);
            if (done.size() + panels.size() > kMaxPanels || p.r.error > opts.abs_tol) {
                throw NumericalError("quadrature did not converge on [" + std::to_string(p.lo) + ", " +
                                         std::to_string(p.hi) + "]",
                                     {p.lo, p.hi, p.r.value, p.r.error});
            }
            continue;
        }
        Panel left{p.lo, mid, gauss_kronrod15(f, p.lo, mid), p.depth + 1};
        Panel right{mid, p.hi, gauss_kronrod15(f, mid, p.hi), p.depth + 1};
        total.evaluations += left.r.evaluations + right.r.evaluations;
        value += left.r.value + right.r.value - p.r.value;
        error += left.r.error + right.r.error - p.r.error;
        for (Panel* q : {&left, &right}) {
            panels.push_back(*q);
            std::push_heap(panels.begin(), panels.end(), worse);
        }
        if (panels.size() + done.size() > kMaxPanels)
            throw NumericalError("quadrature exceeded the panel budget on [" + std::to_string(lo) + ", " +
                                     std::to_string(hi) + "]",
                                 {lo, hi, value, error});
    }

    // Deterministic left-to-right summation.
    panels.insert(panels.end(), done.begin(), done.end());
    std::sort(panels.begin(), panels.end(), [](const Panel& a, const Panel& b) { return a.lo < b.lo; });
    for (const auto& p : panels) {
        total.value += p.r.value;
        total.error += p.r.error;
        if (visit) (*visit)(p.lo, p.hi, p.r.value);
    }
    return total;
}

} // namespace

QuadratureResult gauss_kronrod15(const std::function<double(double)>& f, double lo, double hi) {
    double center = 0.5 * (lo + hi);
    double half = 0.5 * (hi - lo);
    double fc = checked(f, center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        double dx = half * kXgk[j];
        double f1 = checked(f, center - dx);
        double f2 = checked(f, center + dx);
        kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }
    QuadratureResult r;
    r.value = kronrod * half;
    r.error = std::fabs((kronrod - gauss) * half);
    r.evaluations = 15;
    return r;
}

QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           const QuadratureOptions& opts) {
    return run(f, lo, hi, opts, nullptr);
}

void integrate_panels(const std::function<double(double)>& f, double lo, double hi, const QuadratureOptions& opts,
                      const std::function<void(double, double, double)>& visit) {
    run(f, lo, hi, opts, &visit);
}

FixedRule gauss_legendre5_rule(double lo, double hi) {
    FixedRule rule{};
    double center = 0.5 * (lo + hi);
    double half = 0.5 * (hi - lo);
    for (int i = 0; i < 5; ++i) {
        rule.nodes[i] = center + half * kXgl5[i];
        rule.weights[i] = half * kWgl5[i];
    }
    return rule;
}

double gauss_legendre5(const std::function<double(double)>& f, double lo, double hi) {
    auto rule = gauss_legendre5_rule(lo, hi);
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) sum += rule.weights[i] * checked(f, rule.nodes[i]);
    return sum;
}

} // namespace displace
