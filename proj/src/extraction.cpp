#include "displace/extraction.hpp"

#include "displace/error.hpp"
#include "displace/expr.hpp"

#include <algorithm>
#include <string>

namespace displace {

Gauge gauge_from_smooth(const DisplacementSpec& spec, double quad_tol) {
    const auto* s = spec.as_smooth();
    if (!s) throw UnsupportedVariant("gauge extraction requires a smooth displacement");
    if (!(quad_tol > 0.0)) throw InvalidArgument("quadrature tolerance must be positive");

    auto density = [spec](double t) {
        double v = d2_delta(spec, t, t);
        if (!(v > 0.0))
            throw NumericalError("D2 delta(t,t) is not positive at t=" + std::to_string(t), {t, v});
        return v;
    };
    // Finite-difference densities carry rounding noise near 1e-11 that no
    // panel split can remove.
    constexpr double kDifferencedTol = 1e-9;
    QuadratureOptions quad;
    quad.abs_tol = s->d2 ? quad_tol : std::max(quad_tol, kDifferencedTol);
    Gauge g(spec.domain(), density, {}, {}, quad);
    if (s->d2_source) {
        auto e = parse(*s->d2_source, {"x", "y"});
        return g.with_density_source(e.to_string({{"x", "t"}, {"y", "t"}}));
    }
    return g;
}

} // namespace displace
