#pragma once

// Reference values computed at 256-bit precision: both endpoints are
// evaluated, subtracted, and the result rounded once to double. Branch
// conventions (spline intervals, penalty cases, pow dispatch) mirror the
// working-precision interpreters.

#include <span>
#include <vector>

#include "cdd/expr.hpp"
#include "cdd/linalg.hpp"
#include "cdd/optim.hpp"
#include "cdd/spline.hpp"

namespace cdd {

/// Significand bits used by the oracle.
inline constexpr int kOracleBits = 256;

/// e(x+s) − e(x). Throws Errc::domain when either endpoint is outside the
/// domain, Errc::overflow when the rounded result is not finite.
double oracle_delta(const Expr& e, std::span<const double> x, std::span<const double> s);
double oracle_value(const Expr& e, std::span<const double> x);

/// ∇e(x)·s from a central difference taken at 256 bits.
double oracle_directional_derivative(const Expr& e, std::span<const double> x,
                                     std::span<const double> s);

double oracle_spline_delta(const CubicSpline& spline, double x, double dx);
double oracle_penalty_delta(double x, double dx);
double oracle_expm1(double d);

/// (A+ΔA)⁻¹(b+Δb) − A⁻¹b from two eliminations. Throws Errc::singular.
std::vector<double> oracle_solve_delta(const DeltaMatrix& a, const DeltaVector& b);

double oracle_quadratic_delta(const QuadraticObjective& q, std::span<const double> x,
                              std::span<const double> dx);

/// q with oracle_quadratic_delta as its evaluator.
DeltaObjective oracle_quadratic_objective(const QuadraticObjective& q);

}  // namespace cdd
