#include "cdd/oracle.hpp"

#include <cmath>
#include <string>

#include "cdd/error.hpp"
#include "expr_eval.hpp"
#include "wide_real.hpp"

namespace cdd {
namespace {

using detail::WideReal;

double round_result(const WideReal& w, const char* what) {
  const double d = w.to_double();
  if (!std::isfinite(d)) throw Error(Errc::overflow, std::string(what) + ": result overflows");
  return d;
}

struct WideSemantics {
  using value_type = WideReal;

  WideReal literal(double v) const { return WideReal(v); }
  WideReal neg(const WideReal& a) const { return -a; }
  WideReal add(const WideReal& a, const WideReal& b) const { return a + b; }
  WideReal sub(const WideReal& a, const WideReal& b) const { return a - b; }
  WideReal mul(const WideReal& a, const WideReal& b) const { return a * b; }
  WideReal div(const WideReal& a, const WideReal& b) const {
    if (b.is_zero()) throw Error(Errc::domain, "div: division by zero");
    return a / b;
  }
  WideReal recip(const WideReal& a) const {
    if (a.is_zero()) throw Error(Errc::domain, "reciprocal: zero denominator");
    return WideReal(1.0) / a;
  }
  WideReal sqrt(const WideReal& a) const {
    if (a.sign() < 0) throw Error(Errc::domain, "sqrt: negative radicand");
    return cdd::detail::sqrt(a);
  }
  WideReal log(const WideReal& a) const {
    if (a.sign() <= 0) throw Error(Errc::domain, "log: nonpositive argument");
    return cdd::detail::log(a);
  }
  WideReal pow(const WideReal& a, const WideReal& b) const {
    if (b == WideReal(2.0)) return a * a;
    if (b == WideReal(0.5)) return sqrt(a);
    if (b == WideReal(-1.0)) return recip(a);
    if (a.sign() <= 0) throw Error(Errc::domain, "pow: base must be positive");
    return cdd::detail::pow(a, b);
  }
  WideReal call(Function f, const WideReal& a) const {
    switch (f) {
      case Function::exp: return cdd::detail::exp(a);
      case Function::log: return log(a);
      case Function::sqrt: return sqrt(a);
      case Function::sq: return a * a;
      case Function::recip: return recip(a);
      case Function::penalty: {
        if (a.sign() <= 0) return WideReal(0.0);
        return a * a;
      }
    }
    throw Error(Errc::invalid_input, "unknown function");
  }
};

void require_arity(const Expr& e, std::size_t n) {
  if (n != e.arity()) {
    throw Error(Errc::arity, "oracle: " + std::to_string(n) + " entries for arity " +
                                 std::to_string(e.arity()));
  }
}

WideReal wide_eval(const Expr& e, const std::vector<WideReal>& vars) {
  return detail::evaluate(e.root(), std::span<const WideReal>(vars), WideSemantics{});
}

std::vector<WideReal> widen(std::span<const double> x) {
  return std::vector<WideReal>(x.begin(), x.end());
}

// Left-closed interval index of an exactly represented point.
std::size_t wide_interval(std::span<const double> knots, const WideReal& y) {
  std::size_t i = 0;
  while (i < knots.size() && !(y < WideReal(knots[i]))) ++i;
  return i;
}

WideReal wide_spline(const CubicSpline& sp, const WideReal& y) {
  const std::size_t i = wide_interval(sp.knots(), y);
  const CubicPiece& p = sp.value_piece(i);
  const WideReal t = y - WideReal(sp.value_anchor(i));
  return ((WideReal(p.c3) * t + WideReal(p.c2)) * t + WideReal(p.c1)) * t + WideReal(p.c0);
}

WideReal wide_penalty(const WideReal& a) {
  if (a.sign() <= 0) return WideReal(0.0);
  return a * a;
}

// Gaussian elimination with partial pivoting on an n×n matrix given entrywise.
std::vector<WideReal> eliminate(std::vector<WideReal> m, std::vector<WideReal> b,
                                std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < n; ++r) {
      if (abs(m[piv * n + k]) < abs(m[r * n + k])) piv = r;
    }
    if (m[piv * n + k].is_zero()) throw Error(Errc::singular, "oracle: matrix is singular");
    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m[k * n + c], m[piv * n + c]);
      std::swap(b[k], b[piv]);
    }
    for (std::size_t r = k + 1; r < n; ++r) {
      const WideReal f = m[r * n + k] / m[k * n + k];
      for (std::size_t c = k; c < n; ++c) m[r * n + c] -= f * m[k * n + c];
      b[r] -= f * b[k];
    }
  }
  std::vector<WideReal> x(n);
  for (std::size_t i = n; i-- > 0;) {
    WideReal acc = b[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= m[i * n + c] * x[c];
    x[i] = acc / m[i * n + i];
  }
  return x;
}

WideReal wide_quadratic(const QuadraticObjective& q, const std::vector<WideReal>& y) {
  const std::size_t n = q.size();
  const Matrix& m = q.hessian();
  WideReal quad, lin;
  for (std::size_t i = 0; i < n; ++i) {
    WideReal row;
    for (std::size_t j = 0; j < n; ++j) row += WideReal(m(i, j)) * y[j];
    quad += y[i] * row;
    lin += WideReal(q.linear()[i]) * y[i];
  }
  return ldexp(quad, -1) + lin;
}

}  // namespace

double oracle_value(const Expr& e, std::span<const double> x) {
  require_arity(e, x.size());
  return round_result(wide_eval(e, widen(x)), "oracle");
}

double oracle_delta(const Expr& e, std::span<const double> x, std::span<const double> s) {
  require_arity(e, x.size());
  require_arity(e, s.size());
  const auto base = widen(x);
  auto moved = base;
  for (std::size_t i = 0; i < moved.size(); ++i) moved[i] += WideReal(s[i]);
  const WideReal f0 = wide_eval(e, base);
  const WideReal f1 = wide_eval(e, moved);
  return round_result(f1 - f0, "oracle");
}

double oracle_directional_derivative(const Expr& e, std::span<const double> x,
                                     std::span<const double> s) {
  require_arity(e, x.size());
  require_arity(e, s.size());
  constexpr long kStepExponent = -80;
  auto plus = widen(x);
  auto minus = plus;
  for (std::size_t i = 0; i < plus.size(); ++i) {
    const WideReal hs = ldexp(WideReal(s[i]), kStepExponent);
    plus[i] += hs;
    minus[i] -= hs;
  }
  const WideReal diff = wide_eval(e, plus) - wide_eval(e, minus);
  return round_result(ldexp(diff, -kStepExponent - 1), "oracle");
}

double oracle_spline_delta(const CubicSpline& spline, double x, double dx) {
  if (!std::isfinite(x) || !std::isfinite(dx)) {
    throw Error(Errc::invalid_input, "oracle: spline arguments must be finite");
  }
  const WideReal wx(x);
  return round_result(wide_spline(spline, wx + WideReal(dx)) - wide_spline(spline, wx),
                      "oracle");
}

double oracle_penalty_delta(double x, double dx) {
  const WideReal wx(x);
  return round_result(wide_penalty(wx + WideReal(dx)) - wide_penalty(wx), "oracle");
}

double oracle_expm1(double d) { return round_result(expm1(WideReal(d)), "oracle"); }

std::vector<double> oracle_solve_delta(const DeltaMatrix& a, const DeltaVector& b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw Error(Errc::shape, "oracle: right-hand side has the wrong length");
  std::vector<WideReal> m0, m1, b0, b1;
  m0.reserve(n * n);
  m1.reserve(n * n);
  for (std::size_t i = 0; i < n * n; ++i) {
    m0.emplace_back(a.values().data()[i]);
    m1.push_back(m0.back() + WideReal(a.deltas().data()[i]));
  }
  for (std::size_t i = 0; i < n; ++i) {
    b0.emplace_back(b.values()[i]);
    b1.push_back(b0.back() + WideReal(b.deltas()[i]));
  }
  const auto x0 = eliminate(std::move(m0), std::move(b0), n);
  const auto x1 = eliminate(std::move(m1), std::move(b1), n);
  std::vector<double> dx(n);
  for (std::size_t i = 0; i < n; ++i) dx[i] = round_result(x1[i] - x0[i], "oracle");
  return dx;
}

double oracle_quadratic_delta(const QuadraticObjective& q, std::span<const double> x,
                              std::span<const double> dx) {
  if (x.size() != q.size() || dx.size() != q.size()) {
    throw Error(Errc::shape, "oracle: vector length does not match the quadratic");
  }
  const auto base = widen(x);
  auto moved = base;
  for (std::size_t i = 0; i < moved.size(); ++i) moved[i] += WideReal(dx[i]);
  return round_result(wide_quadratic(q, moved) - wide_quadratic(q, base), "oracle");
}

DeltaObjective oracle_quadratic_objective(const QuadraticObjective& q) {
  return DeltaObjective(
      q.size(),
      [q](std::span<const double> x, std::span<const double> s) {
        return DeltaScalar(q.value(x), oracle_quadratic_delta(q, x, s) + 0.0);
      },
      [q](std::span<const double> x) { return q.gradient(x); });
}

}  // namespace cdd
