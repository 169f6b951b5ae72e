#pragma once

#include "displace/displacement.hpp"
#include "displace/gauge.hpp"
#include "displace/quadrature.hpp"

#include <concepts>
#include <functional>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

namespace displace {

/**
 * Real function of one variable with optional one-sided data.
 *
 * `right_limit`, when set, returns f(t+) exactly; derivatives at jump points
 * use it instead of extrapolating. `breaks` lists declared discontinuities;
 * quadrature splits there and difference quotients never straddle them.
 */
struct ScalarFunction {
    std::function<double(double)> value;
    std::function<double(double)> right_limit;
    std::vector<double> breaks;

    ScalarFunction() = default;
    template <class F>
        requires std::invocable<F&, double> && (!std::same_as<std::remove_cvref_t<F>, ScalarFunction>)
    ScalarFunction(F f) : value(std::move(f)) {}
    ScalarFunction(std::function<double(double)> v, std::function<double(double)> right,
                   std::vector<double> brk = {})
        : value(std::move(v)), right_limit(std::move(right)), breaks(std::move(brk)) {}

    double operator()(double t) const { return value(t); }
};

enum class PointClass { Continuity, Jump, Excluded };
std::string_view to_string(PointClass c);

struct DerivativeResult {
    std::optional<double> value;  // absent for excluded points
    PointClass point_class = PointClass::Continuity;
    double error_estimate = 0.0;
    int samples_used = 0;
};

/// Relative spread of the extrapolation tableau above which a limit counts as non-convergent.
inline constexpr double kDerivativeTol = 1e-6;

/**
 * Δ-derivative of f for the Stieltjes displacement of g at x.
 *
 * Jump points: (f(x+) - f(x)) / (g(x+) - g(x)), with f(x+) from
 * f.right_limit or extrapolated from the right. Continuity points: symmetric
 * quotients (f(x+h) - f(x-h)) / (g(x+h) - g(x-h)) over halving h, with a
 * Richardson tableau; one-sided at the ends of the domain. Points of C ∪ N
 * come back as Excluded.
 *
 * `sets` may be passed to avoid recomputing distinguished_sets(g).
 * Throws NumericalError, carrying the quotient sequence, when the limit does
 * not settle.
 */
DerivativeResult delta_derivative(const ScalarFunction& f, const Gauge& g, double x, int shrink_levels = 12,
                                  const DistinguishedSets* sets = nullptr);

/// Δ-derivative for a smooth displacement, with quotients over Δ(x, ·) directly.
DerivativeResult delta_derivative(const ScalarFunction& f, const DisplacementSpec& spec, double x,
                                  int shrink_levels = 12);

/// Quotient Δ₂(f(x), f(y)) / (g1(y) - g1(x)) under the same limiting protocol;
/// right-sided at jump points of g1.
DerivativeResult pair_derivative(const ScalarFunction& f, const Gauge& g1, const DisplacementSpec& delta2, double x,
                                 int shrink_levels = 12, const DistinguishedSets* sets = nullptr);

/// ∫_{[a,upper)} f dμ_g. The jump at `upper` itself is excluded.
double stieltjes_integral(const ScalarFunction& f, const Gauge& g, double upper, const QuadratureOptions& opts = {});

/// ∫_{[lower,upper)} f dμ_g: density part cell by cell, then atoms left to right.
double stieltjes_integral(const ScalarFunction& f, const Gauge& g, double lower, double upper,
                          const QuadratureOptions& opts = {});

struct MeasurePath {
    std::function<double(double)> alpha;
    std::string description;

    static MeasurePath identity() { return {[](double t) { return t; }, "identity"}; }
    static MeasurePath constant(double z) { return {[z](double) { return z; }, "constant"}; }
};

/// ∫_{[a,upper)} f dμ_α = ∫ f(t)·D₂Δ(α(t), t) dt for a smooth spec.
double path_integral(const ScalarFunction& f, const MeasurePath& path, const DisplacementSpec& spec, double upper,
                     const QuadratureOptions& opts = {});

struct FtcReport {
    double max_error = 0.0;
    double worst_point = 0.0;
    int grid = 0;
    int checked = 0;
    std::vector<double> excluded;  // skipped points of C ∪ N (or declared breaks)
    std::vector<double> failures;  // points where the derivative did not settle
};

/// F(x) = ∫_{[a,x)} f dμ_g, then max |F^Δ(x) - f(x)| over `grid` interior
/// points plus every jump point.
FtcReport ftc_forward_check(const ScalarFunction& f, const Gauge& g, int grid, int shrink_levels = 12);

/// max over mesh points x of |F(a) + ∫_{[a,x)} F^Δ dμ_g - F(x)|, with F^Δ
/// sampled at 5 Gauss points per cell of a `grid`-cell mesh split at jumps.
FtcReport ftc2_check(const ScalarFunction& F, const Gauge& g, int grid, int shrink_levels = 12);

} // namespace displace
