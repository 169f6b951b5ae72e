#pragma once

#include "displace/displacement.hpp"
#include "displace/gauge.hpp"

namespace displace {

/// Gauge of a smooth displacement: density t -> D₂Δ(t,t), no jumps, no flats.
/// The continuous part is integrated with absolute tolerance `quad_tol`, or
/// max(quad_tol, 1e-9) when D₂Δ comes from finite differences.
/// Throws NumericalError if D₂Δ(t,t) <= 0 at a quadrature node.
Gauge gauge_from_smooth(const DisplacementSpec& spec, double quad_tol = 1e-12);

} // namespace displace
