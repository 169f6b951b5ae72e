#pragma once

#include "displace/calculus.hpp"
#include "displace/gauge.hpp"

#include <functional>
#include <string>
#include <vector>

namespace displace {

/// u'_g = rhs(t, u) on `interval`, u(a) = u0.
struct IvpProblem {
    Gauge gauge;
    std::function<double(double, double)> rhs;
    double u0 = 0.0;
    Interval interval;
};

/// Stationary surface problem in integrated form: u'_g(x) = -∫_a^x h, u(b) = C.
struct SurfaceProblem {
    Gauge work_gauge;
    ScalarFunction source;
    double terminal_value = 0.0;
    Interval interval;
};

struct IvpNode {
    double t = 0.0;
    double u = 0.0;  // left value u(t)
};

struct JumpRecord {
    double tau = 0.0;
    double before = 0.0;
    double after = 0.0;
};

/**
 * Left-continuous piecewise trajectory. Between mesh nodes the value is the
 * linear interpolant from u(t_k+) to u(t_{k+1}).
 */
struct IvpSolution {
    std::vector<IvpNode> nodes;
    std::vector<JumpRecord> jumps;
    std::string method;
    double step_stat = 0.0;  // widest mesh cell

    /// u(t), the pre-jump value at jump points. Throws OutOfDomain outside the mesh.
    double at(double t) const;
    /// u(t+).
    double right(double t) const;
    const JumpRecord* jump_at(double t) const;
    double final_value() const { return nodes.back().u; }
};

/**
 * Explicit g-Euler on a uniform mesh of width <= step joined with every jump
 * point in [a, b). Continuous increments use the absolutely continuous part
 * of g; at a jump τ the atom update is
 *
 *     after = before + rhs(τ, before) * size
 *
 * `picard_sweeps` further iterations of u <- u0 + ∫_{[a,t)} rhs(s, u(s)) dμ_g
 * follow (trapezoid on the continuous part, exact atoms).
 *
 * Throws NumericalError on a non-finite state; diagnostics hold the last
 * good (t, u).
 */
IvpSolution solve_ivp(const IvpProblem& p, double step, int picard_sweeps = 0);

/// u(x) = C + ∫_{[x,b)} H dμ_g with H(x) = ∫_a^x h, on the solve_ivp mesh
/// conventions. u(b) = C exactly.
IvpSolution solve_surface(const SurfaceProblem& p, double step);

struct ResidualReport {
    double max_residual = 0.0;
    double worst_point = 0.0;
    int grid = 0;
};

/// max over grid+1 points of |u(t) - u0 - ∫_{[a,t)} rhs(s, u(s)) dμ_g|.
ResidualReport verify_solution(const IvpProblem& p, const IvpSolution& sol, int grid);

} // namespace displace
