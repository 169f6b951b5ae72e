#pragma once

#include "displace/quadrature.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace displace {

/// Closed interval [lo, hi] of the real line.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    bool contains(double t) const noexcept { return lo <= t && t <= hi; }
    double length() const noexcept { return hi - lo; }
};

struct Jump {
    double tau = 0.0;
    double size = 0.0;
};

/// Open interval (lo, hi).
struct OpenInterval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double t) const noexcept { return lo < t && t < hi; }
};

/**
 * Left-continuous nondecreasing function on [a,b] with g(a) = 0:
 *
 *     g(t) = ∫_a^t density + Σ_{tau_i < t} size_i
 *
 * The continuous part is integrated once, at construction, into a table of
 * adaptively chosen breakpoints with cumulative values. Every later
 * evaluation reads that table, so g is monotone-consistent across calls.
 * Copies share the table; a Gauge is immutable.
 */
class Gauge {
public:
    using Density = std::function<double(double)>;

    /// `density` may be empty (pure-jump gauge). Jumps are sorted here; duplicates,
    /// non-positive sizes, out-of-domain points, or overlapping flats throw InvalidArgument.
    Gauge(Interval domain, Density density, std::vector<Jump> jumps = {}, std::vector<OpenInterval> flats = {},
          QuadratureOptions quad = {});

    /// g(t) = t - a.
    static Gauge identity(Interval domain = {0.0, 1.0});

    double operator()(double t) const { return eval(t); }
    /// Left-continuous value g(t). Throws OutOfDomain outside [a,b].
    double eval(double t) const;
    /// g(t+): eval(t) plus the jump at t, if any.
    double eval_right(double t) const;
    /// ∫_a^t density.
    double continuous_part(double t) const;
    /// Size of the jump at t, or 0.
    double jump_at(double t) const;
    /// density(t), or 0 for a pure-jump gauge.
    double density(double t) const;

    bool has_density() const noexcept;
    const Interval& domain() const noexcept;
    const std::vector<Jump>& jumps() const noexcept;
    const std::vector<OpenInterval>& flats() const noexcept;
    const QuadratureOptions& quadrature() const noexcept;

    /// Expression text (in `t`) that produced the density, when known.
    const std::optional<std::string>& density_source() const noexcept;
    Gauge with_density_source(std::string source) const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
    explicit Gauge(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
};

/// Interval shapes accepted by measure().
struct MeasureSet {
    enum class Kind { ClosedOpen, Open, Closed, OpenClosed, Point };
    Kind kind = Kind::ClosedOpen;
    double c = 0.0;
    double d = 0.0;

    static MeasureSet closed_open(double c, double d) { return {Kind::ClosedOpen, c, d}; }
    static MeasureSet open(double c, double d) { return {Kind::Open, c, d}; }
    static MeasureSet closed(double c, double d) { return {Kind::Closed, c, d}; }
    static MeasureSet open_closed(double c, double d) { return {Kind::OpenClosed, c, d}; }
    static MeasureSet point(double c) { return {Kind::Point, c, c}; }
};

/// Lebesgue–Stieltjes measure of an interval or singleton under g.
/// Throws InvalidArgument when c > d and OutOfDomain outside [a,b].
double measure(const Gauge& g, const MeasureSet& set);

struct DistinguishedSets {
    std::vector<double> d_set;        // jump points
    std::vector<OpenInterval> c_set;  // maximal constancy intervals
    std::vector<double> n_set;        // endpoints of c_set that are not jump points

    /// Membership in C ∪ N, with points within `snap` of an N point counted in.
    bool excluded(double t, double snap = 1e-12) const;
    bool is_jump(double t) const;
};

/**
 * Jump points, constancy intervals, and their non-jump endpoints. Constancy
 * intervals are the declared flats merged with zero-density, jump-free runs
 * detected on a uniform sample of `samples` cells (density below
 * 1e-12 * (1 + max sampled density)); run boundaries are refined by bisection.
 */
DistinguishedSets distinguished_sets(const Gauge& g, int samples = 1024);

} // namespace displace
