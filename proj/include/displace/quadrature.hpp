#pragma once

#include <functional>

namespace displace {

struct QuadratureOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-13;
    int max_depth = 48;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
};

/// Single 15-point Gauss–Kronrod panel. `error` is |K15 - G7|.
QuadratureResult gauss_kronrod15(const std::function<double(double)>& f, double lo, double hi);

/**
 * Global adaptive bisection driven by gauss_kronrod15: the panel with the
 * largest error estimate is split until the summed estimate is at most
 * max(abs_tol, rel_tol·|value|). Panels sum left to right.
 *
 * Throws NumericalError on a non-finite integrand value, or when a panel at
 * max_depth still carries more than abs_tol of error.
 */
QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           const QuadratureOptions& opts = {});

/// Visits the accepted panels of integrate() left to right as (lo, hi, value).
void integrate_panels(const std::function<double(double)>& f, double lo, double hi, const QuadratureOptions& opts,
                      const std::function<void(double, double, double)>& visit);

/// Fixed 5-point Gauss–Legendre rule on [lo, hi]; exact for degree 9.
double gauss_legendre5(const std::function<double(double)>& f, double lo, double hi);

/// Nodes of the 5-point Gauss–Legendre rule mapped to [lo, hi], with weights.
struct FixedRule {
    double nodes[5];
    double weights[5];
};
FixedRule gauss_legendre5_rule(double lo, double hi);

} // namespace displace
