#pragma once

#include "displace/gauge.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace displace {

using Function2D = std::function<double(double, double)>;

/// Differentiable displacement given by a callable Δ(x,y), optionally with D₂Δ.
struct SmoothDisplacement {
    Function2D delta;
    Function2D d2;  // empty: central differences with one Richardson level
    std::optional<std::string> delta_source;
    std::optional<std::string> d2_source;
};

/// Δ(x,y) = g(y) - g(x).
struct StieltjesDisplacement {
    Gauge gauge;
};

/// Complete weighted directed graph; vertices are 0..n-1.
struct GraphDisplacement {
    std::vector<std::vector<double>> weights;
};

/// Minimum counter-clockwise angle from x to y on the circle, in [0, 2π).
struct AngularDisplacement {};

class DisplacementSpec {
public:
    enum class Kind { Smooth, Stieltjes, Graph, Angular };
    using Variant = std::variant<SmoothDisplacement, StieltjesDisplacement, GraphDisplacement, AngularDisplacement>;

    static DisplacementSpec smooth(Interval domain, Function2D delta, Function2D d2 = {});
    /// Δ and (optionally) D₂Δ as expressions in x and y.
    static DisplacementSpec smooth(Interval domain, std::string_view delta, std::optional<std::string_view> d2 = {});
    static DisplacementSpec stieltjes(Gauge gauge);
    /// Square, finite matrix. Zero diagonal is not enforced here; check_h1 reports it.
    static DisplacementSpec graph(std::vector<std::vector<double>> weights);
    static DisplacementSpec angular();

    /// Smooth only: copy carrying expression text for Δ and D₂Δ (used for serialization).
    DisplacementSpec with_sources(std::optional<std::string> delta, std::optional<std::string> d2) const;

    Kind kind() const noexcept { return static_cast<Kind>(variant_.index()); }
    /// [a,b]; for graphs [0, n-1]; for the angular case [0, 2π].
    const Interval& domain() const noexcept { return domain_; }
    const Variant& variant() const noexcept { return variant_; }

    const SmoothDisplacement* as_smooth() const { return std::get_if<SmoothDisplacement>(&variant_); }
    const StieltjesDisplacement* as_stieltjes() const { return std::get_if<StieltjesDisplacement>(&variant_); }
    const GraphDisplacement* as_graph() const { return std::get_if<GraphDisplacement>(&variant_); }

    /// Δ(x,y). Throws OutOfDomain for points outside the domain (non-integer or
    /// out-of-range vertices for graphs). Angular inputs are reduced mod 2π.
    double operator()(double x, double y) const;
    /// Δ(x,y) without the domain check.
    double raw(double x, double y) const;
    /// Number of vertices for graphs; 0 otherwise.
    std::size_t vertex_count() const;

    /// True for Smooth and Stieltjes: both live on an ordered interval.
    bool is_interval_variant() const noexcept { return kind() == Kind::Smooth || kind() == Kind::Stieltjes; }

private:
    DisplacementSpec(Interval domain, Variant v) : domain_(domain), variant_(std::move(v)) {}
    Interval domain_;
    Variant variant_;
};

double delta(const DisplacementSpec& spec, double x, double y);

/// D₂Δ(x,y) for a Smooth spec: the supplied derivative, or central differences with
/// step cbrt(eps)·max(1,|y|) and one Richardson level. Throws UnsupportedVariant otherwise.
double d2_delta(const DisplacementSpec& spec, double x, double y);

enum class Builtin { Exponential, Roundabout, SantiagoGraph, IdentityGauge };

/// Built-in examples:
///   exponential    Δ(x,y) = e^{y²-x²} - e^{x-y} on [0,1]
///   roundabout     angular displacement on the circle
///   santiago_graph four-vertex travel-time graph
///   identity_gauge Stieltjes displacement with g(t) = t on [0,1]
DisplacementSpec make_builtin(Builtin which);
/// Throws InvalidArgument for unknown names.
DisplacementSpec make_builtin(std::string_view name);
std::optional<Builtin> builtin_from_name(std::string_view name);

// ---------------------------------------------------------------------------
// Hypothesis checks
// ---------------------------------------------------------------------------

enum class Hypothesis { H1, H2Usc, H2Prime, H3, H4Gamma, H5, D2Positive };
enum class Verdict { Pass, Fail, Inconclusive };

std::string_view to_string(Hypothesis h);
std::string_view to_string(Verdict v);

struct Witness {
    std::vector<double> point;
    std::vector<double> values;
};

struct AxiomReport {
    Hypothesis hypothesis = Hypothesis::H1;
    Verdict verdict = Verdict::Inconclusive;
    std::vector<Witness> witnesses;  // at most kMaxWitnesses counterexamples
    long long sample_count = 0;
    long long violations = 0;
    double tolerance = 0.0;
    std::string note;
    std::optional<double> r_estimate;  // D2Positive only: lattice minimum of D₂Δ

    static constexpr std::size_t kMaxWitnesses = 8;
};

inline constexpr double kAlgebraicTol = 1e-9;
inline constexpr double kLimitTol = 1e-6;

/// |Δ(x,x)| <= tol at `samples` equispaced points (every vertex for graphs).
AxiomReport check_h1(const DisplacementSpec& spec, int samples, double tol = kAlgebraicTol);

/// ψ(x,z) <= ψ(x,y) + ψ(y,z) + tol with ψ = φ(|Δ|), over all triples of a
/// `samples`-point grid (all n³ vertex triples for graphs). Inconclusive if φ
/// is not 0 at 0 or not strictly increasing on the sampled values.
AxiomReport check_h2prime(const DisplacementSpec& spec, const std::function<double(double)>& phi, int samples,
                          double tol = kAlgebraicTol);

/**
 * Sampled upper semicontinuity of |Δ(x,·)| in the Δ-topology. For each grid
 * pair (x,y) the supremum of |Δ(x,z)| is taken over points z within
 * (b-a)·10^-(k+1) of y that also satisfy |Δ(y,z)| < ε_k, for k < shrink_levels.
 * Fails when the final level exceeds |Δ(x,y)| + tol; inconclusive when the
 * last two levels differ by more than tol. Smooth and Stieltjes only.
 */
AxiomReport check_h2_usc(const DisplacementSpec& spec, int samples, int shrink_levels, double tol = kLimitTol);

/// Δ(x,·) nondecreasing along the sample grid. Smooth and Stieltjes only.
AxiomReport check_h3(const DisplacementSpec& spec, int samples, double tol = kAlgebraicTol);

/// Left continuity of Δ(x,·) at x: Δ(x, x-h) -> 0 for h = (x-a)·10^-k.
AxiomReport check_h5(const DisplacementSpec& spec, int samples, int levels = 10, double tol = kLimitTol);

/// Lattice of (grid+1)² points on [a,b]²; passes iff min D₂Δ > 0. Smooth only.
AxiomReport check_d2_positive(const DisplacementSpec& spec, int grid);

/// γ(z,z) = 1, γ >= 1, and γ(z, z±δ) -> 1 as δ -> 0, on `samples` base points. Smooth only.
AxiomReport check_h4_gamma(const DisplacementSpec& spec, int samples, int grid, double tol = kLimitTol);

struct GammaEstimate {
    double z = 0.0;
    double zbar = 0.0;
    double value = 1.0;
    int grid_size = 0;
};

/// max{1, max_ξ D₂Δ(z,ξ)/D₂Δ(z̄,ξ)} over grid+1 uniform nodes, with a local
/// golden-section refinement in the cells next to the best node.
/// Throws NumericalError if D₂Δ <= 0 is met.
GammaEstimate gamma_estimate(const DisplacementSpec& spec, double z, double zbar, int grid);

/// h_{z,z̄}(t) = D₂Δ(z,t) / D₂Δ(z̄,t). Throws NumericalError on a nonpositive denominator.
double rn_density(const DisplacementSpec& spec, double z, double zbar, double t);

struct Ball {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_closed = false;
    bool hi_closed = false;

    bool contains(double t) const noexcept {
        return (lo < t || (lo_closed && lo == t)) && (t < hi || (hi_closed && hi == t));
    }
};

/// B(x,r) = {y : |Δ(x,y)| < r} as an interval, endpoints located by bisection
/// to `tol`. Requires an interval variant satisfying (H3).
Ball delta_ball(const DisplacementSpec& spec, double x, double r, double tol = 1e-12);

} // namespace displace
