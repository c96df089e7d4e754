#include "cdd/optim.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "cdd/error.hpp"

namespace cdd {
namespace {

void require_length(std::span<const double> v, std::size_t n, const char* what) {
  if (v.size() != n) {
    throw Error(Errc::shape, std::string(what) + " has length " + std::to_string(v.size()) +
                                 ", expected " + std::to_string(n));
  }
}

}  // namespace

DeltaObjective::DeltaObjective(std::size_t arity, Evaluator evaluator, Gradient gradient)
    : arity_(arity), evaluator_(std::move(evaluator)), gradient_(std::move(gradient)) {
  if (!evaluator_) throw Error(Errc::invalid_input, "objective needs an evaluator");
}

DeltaScalar DeltaObjective::evaluate(std::span<const double> x,
                                     std::span<const double> s) const {
  require_length(x, arity_, "x");
  require_length(s, arity_, "s");
  return evaluator_(x, s);
}

std::vector<double> DeltaObjective::gradient(std::span<const double> x) const {
  require_length(x, arity_, "x");
  if (!gradient_) throw Error(Errc::state, "objective has no gradient");
  auto g = gradient_(x);
  require_length(g, arity_, "gradient");
  return g;
}

DeltaObjective make_expr_objective(Expr e, DeltaObjective::Gradient gradient) {
  const std::size_t arity = e.arity();
  return DeltaObjective(
      arity,
      [e = std::move(e)](std::span<const double> x, std::span<const double> s) {
        return eval_delta(e, x, s);
      },
      std::move(gradient));
}

bool armijo_accepts(const DeltaObjective& obj, std::span<const double> x,
                    std::span<const double> p, double alpha, double sigma) {
  if (!(alpha > 0.0)) throw Error(Errc::invalid_input, "armijo: alpha must be positive");
  if (!(sigma > 0.0 && sigma < 1.0)) {
    throw Error(Errc::invalid_input, "armijo: sigma must lie in (0, 1)");
  }
  require_length(p, obj.arity(), "p");
  std::vector<double> step(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) step[i] = alpha * p[i];

  const double decrease = obj.evaluate(x, step).delta();
  const auto g = obj.gradient(x);
  const double slope = std::inner_product(g.begin(), g.end(), p.begin(), 0.0);
  return decrease <= sigma * alpha * slope;
}

double trust_region_rho(const DeltaObjective& obj, double model_delta,
                        std::span<const double> x, std::span<const double> s) {
  if (model_delta == 0.0) {
    throw Error(Errc::degenerate_model, "trust region: model predicts no change");
  }
  if (!std::isfinite(model_delta)) {
    throw Error(Errc::invalid_input, "trust region: model delta must be finite");
  }
  return obj.evaluate(x, s).delta() / model_delta;
}

QuadraticObjective::QuadraticObjective(Matrix m, std::vector<double> d)
    : m_(std::move(m)), d_(std::move(d)) {
  const std::size_t n = d_.size();
  if (!m_.square() || m_.rows() != n) throw Error(Errc::shape, "M must be n x n with n = |d|");
  for (double v : m_.data()) {
    if (!std::isfinite(v)) throw Error(Errc::validation, "M must be finite");
  }
  for (double v : d_) {
    if (!std::isfinite(v)) throw Error(Errc::validation, "d must be finite");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = m_(i, j), b = m_(j, i);
      if (std::fabs(a - b) > 1e-14 * std::fmax(std::fabs(a), std::fabs(b))) {
        throw Error(Errc::validation, "M must be symmetric");
      }
    }
  }
  chol_ = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = m_(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= chol_(j, k) * chol_(j, k);
    if (!(diag > 0.0)) throw Error(Errc::validation, "M must be positive definite");
    chol_(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = m_(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= chol_(i, k) * chol_(j, k);
      chol_(i, j) = v / chol_(j, j);
    }
  }
}

double QuadraticObjective::value(std::span<const double> x) const {
  require_length(x, size(), "x");
  const auto mx = m_ * x;
  double v = 0.0;
  for (std::size_t i = 0; i < size(); ++i) v += x[i] * (0.5 * mx[i] + d_[i]);
  return v;
}

std::vector<double> QuadraticObjective::gradient(std::span<const double> x) const {
  require_length(x, size(), "x");
  auto g = m_ * x;
  for (std::size_t i = 0; i < size(); ++i) g[i] += d_[i];
  return g;
}

std::vector<double> QuadraticObjective::solve(std::span<const double> rhs) const {
  require_length(rhs, size(), "rhs");
  const std::size_t n = size();
  std::vector<double> y(rhs.begin(), rhs.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) y[i] -= chol_(i, k) * y[k];
    y[i] /= chol_(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) y[i] -= chol_(k, i) * y[k];
    y[i] /= chol_(i, i);
  }
  return y;
}

std::vector<double> QuadraticObjective::minimizer() const {
  auto x = solve(d_);
  for (double& v : x) v = -v;
  return x;
}

DeltaObjective QuadraticObjective::as_objective() const {
  const QuadraticObjective copy = *this;
  return DeltaObjective(
      size(),
      [copy](std::span<const double> x, std::span<const double> s) {
        return quadratic_delta(copy, DeltaVector(std::vector<double>(x.begin(), x.end()),
                                                 std::vector<double>(s.begin(), s.end())));
      },
      [copy](std::span<const double> x) { return copy.gradient(x); });
}

DeltaScalar quadratic_delta(const QuadraticObjective& q, const DeltaVector& x) {
  const std::size_t n = q.size();
  if (x.size() != n) throw Error(Errc::shape, "quadratic: x has the wrong length");

  // (Mx, MΔx) from the delta rules with M a parameter.
  const DeltaVector mx = matvec_delta(DeltaMatrix::parameters(q.hessian()), x);
  const auto xv = x.values();
  const auto dx = x.deltas();
  const auto d = q.linear();

  double value = 0.0;
  double first = 0.0;   // (Mx + d)ᵀΔx
  double second = 0.0;  // ΔxᵀMΔx
  for (std::size_t i = 0; i < n; ++i) {
    value += xv[i] * (0.5 * mx.values()[i] + d[i]);
    first += (mx.values()[i] + d[i]) * dx[i];
    second += dx[i] * mx.deltas()[i];
  }
  const double delta = first + 0.5 * second;
  if (!std::isfinite(value) || !std::isfinite(delta)) {
    throw Error(Errc::overflow, "quadratic: result overflows");
  }
  return DeltaScalar(value, delta + 0.0);
}

}  // namespace cdd
