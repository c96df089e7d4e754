#pragma once

// Value/delta pairs and the cancellation-free divided-differencing rules.
//
// A DeltaScalar carries a quantity t evaluated at the base point x together
// with Δt = t(x+s) − t(x). Every operation below produces the pair for its
// result directly from the operand pairs, never by forming t(x+s) and
// subtracting, so Δt keeps full relative accuracy however small s is.

#include <limits>

namespace cdd {

/// Unit roundoff of IEEE double (half the spacing of doubles just above 1).
inline constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2;

class DeltaScalar {
 public:
  constexpr DeltaScalar() = default;

  /// Throws Errc::invalid_input when either field is not finite.
  DeltaScalar(double value, double delta);

  constexpr double value() const noexcept { return value_; }
  constexpr double delta() const noexcept { return delta_; }

  friend constexpr bool operator==(const DeltaScalar&, const DeltaScalar&) = default;

 private:
  double value_ = 0.0;
  double delta_ = 0.0;
};

/// Scale the accuracy tests hold results to: |error| <= c·|s|·eps·max(1, |D|/|s|).
/// eps defaults to the unit roundoff; c_factor is the empirical constant
/// standing in for the evaluation's roundoff level c(f, x).
struct AccuracyBudget {
  double eps_mach = kUnitRoundoff;
  double c_factor = 100.0;

  /// Throws Errc::invalid_input unless eps_mach > 0 and c_factor >= 1.
  void validate() const;

  /// Allowed absolute error for a divided difference of magnitude
  /// `reference_delta` over a step of norm `step_norm`.
  double tolerance(double step_norm, double reference_delta) const;
};

/// A quantity that does not depend on the input: its delta is zero.
DeltaScalar lift_parameter(double p);

/// The input variable at x, perturbed by s.
DeltaScalar seed_input(double x, double s);

DeltaScalar add(const DeltaScalar& a, const DeltaScalar& b);
DeltaScalar sub(const DeltaScalar& a, const DeltaScalar& b);
DeltaScalar neg(const DeltaScalar& a);

/// Δ(uv) = uΔv + vΔu + ΔuΔv, with the uv term precanceled.
DeltaScalar mul(const DeltaScalar& a, const DeltaScalar& b);

/// Δ(1/u) = −Δu / (u(u+Δu)). Both endpoints must be nonzero and share a sign.
DeltaScalar reciprocal(const DeltaScalar& a);

/// Defined as mul(a, reciprocal(b)); there is no separate rule.
DeltaScalar div(const DeltaScalar& a, const DeltaScalar& b);

/// Δ(u²) = 2uΔu + Δu².
DeltaScalar square(const DeltaScalar& a);

/// Δ√u = Δu / (√(u+Δu) + √u). Both endpoints must be nonnegative.
DeltaScalar sqrt(const DeltaScalar& a);

/// Δexp(u) = exp(u)·(exp(Δu) − 1), the bracket taken from the 17-term
/// Taylor kernel when |Δu| <= 1 and by direct subtraction otherwise.
DeltaScalar exp(const DeltaScalar& a);

/// Δlog(u) = log1p(Δu/u). Both endpoints must be positive.
DeltaScalar log(const DeltaScalar& a);

/// u^v. A delta-free exponent of 2, 1/2 or −1 goes to square, sqrt or
/// reciprocal; anything else is exp(v·log u) and needs u > 0 at both ends.
DeltaScalar pow(const DeltaScalar& a, const DeltaScalar& b);

inline DeltaScalar operator+(const DeltaScalar& a, const DeltaScalar& b) { return add(a, b); }
inline DeltaScalar operator-(const DeltaScalar& a, const DeltaScalar& b) { return sub(a, b); }
inline DeltaScalar operator*(const DeltaScalar& a, const DeltaScalar& b) { return mul(a, b); }
inline DeltaScalar operator/(const DeltaScalar& a, const DeltaScalar& b) { return div(a, b); }
inline DeltaScalar operator-(const DeltaScalar& a) { return neg(a); }

}  // namespace cdd
