#pragma once

// Optimization decision primitives that consume accurate divided
// differences instead of f(x+s) − f(x) computed by subtraction.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "cdd/delta_scalar.hpp"
#include "cdd/expr.hpp"
#include "cdd/linalg.hpp"

namespace cdd {

/// An objective that reports (f(x), f(x+s) − f(x)) for any step s, plus its
/// gradient. The evaluator must return a zero delta for s = 0.
class DeltaObjective {
 public:
  using Evaluator =
      std::function<DeltaScalar(std::span<const double> x, std::span<const double> s)>;
  using Gradient = std::function<std::vector<double>(std::span<const double> x)>;

  DeltaObjective(std::size_t arity, Evaluator evaluator, Gradient gradient);

  std::size_t arity() const noexcept { return arity_; }

  /// Throws Errc::shape if x or s has the wrong length.
  DeltaScalar evaluate(std::span<const double> x, std::span<const double> s) const;
  std::vector<double> gradient(std::span<const double> x) const;

 private:
  std::size_t arity_;
  Evaluator evaluator_;
  Gradient gradient_;
};

/// Wraps an expression; the gradient is supplied by the caller.
DeltaObjective make_expr_objective(Expr e, DeltaObjective::Gradient gradient);

/// Sufficient decrease: D_f(x, αp) <= σ·α·∇f(x)ᵀp with the left side taken
/// from the evaluator. Requires α > 0 and 0 < σ < 1 (Errc::invalid_input).
bool armijo_accepts(const DeltaObjective& obj, std::span<const double> x,
                    std::span<const double> p, double alpha, double sigma);

/// (f(x+s) − f(x)) / (m(x+s) − m(x)). Throws Errc::degenerate_model when the
/// model delta is zero.
double trust_region_rho(const DeltaObjective& obj, double model_delta,
                        std::span<const double> x, std::span<const double> s);

/// f(x) = ½xᵀMx + dᵀx with M symmetric positive definite.
class QuadraticObjective {
 public:
  /// Throws Errc::shape on mismatched sizes, Errc::validation if M is not
  /// symmetric to 1e-14 relative or not positive definite.
  QuadraticObjective(Matrix m, std::vector<double> d);

  std::size_t size() const noexcept { return d_.size(); }
  const Matrix& hessian() const noexcept { return m_; }
  std::span<const double> linear() const noexcept { return d_; }

  double value(std::span<const double> x) const;
  std::vector<double> gradient(std::span<const double> x) const;  // Mx + d
  /// x* = −M⁻¹d by Cholesky.
  std::vector<double> minimizer() const;
  std::vector<double> solve(std::span<const double> rhs) const;  // M⁻¹ rhs

  DeltaObjective as_objective() const;

 private:
  Matrix m_;
  std::vector<double> d_;
  Matrix chol_;  // lower-triangular factor
};

/// (f(x), D_f(x, Δx)) with D_f = (Mx+d)ᵀΔx + ½ΔxᵀMΔx; the products with M
/// come from matvec_delta.
DeltaScalar quadratic_delta(const QuadraticObjective& q, const DeltaVector& x);

}  // namespace cdd
