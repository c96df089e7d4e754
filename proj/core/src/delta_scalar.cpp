#include "cdd/delta_scalar.hpp"

#include <cmath>
#include <string>

#include "cdd/error.hpp"
#include "cdd/kernels.hpp"

namespace cdd {
namespace {

// Checks a freshly computed pair and maps non-finite fields to typed errors.
// Adding +0.0 turns a −0.0 delta into +0.0 so zero steps give bitwise zero.
DeltaScalar checked(double value, double delta, const char* op) {
  // An infinite value usually drags the delta to inf·0 = NaN; report the overflow.
  if (std::isinf(value)) throw Error(Errc::overflow, std::string(op) + ": result overflows");
  if (std::isnan(value) || std::isnan(delta)) {
    throw Error(Errc::domain, std::string(op) + ": result is not a number");
  }
  if (std::isinf(delta)) {
    throw Error(Errc::overflow, std::string(op) + ": result overflows");
  }
  return DeltaScalar(value, delta + 0.0);
}

}  // namespace

DeltaScalar::DeltaScalar(double value, double delta) : value_(value), delta_(delta) {
  if (!std::isfinite(value) || !std::isfinite(delta)) {
    throw Error(Errc::invalid_input, "value and delta must be finite");
  }
}

void AccuracyBudget::validate() const {
  if (!(eps_mach > 0.0)) throw Error(Errc::invalid_input, "eps_mach must be positive");
  if (!(c_factor >= 1.0)) throw Error(Errc::invalid_input, "c_factor must be at least 1");
}

double AccuracyBudget::tolerance(double step_norm, double reference_delta) const {
  const double s = std::fabs(step_norm);
  const double scale = s > 0.0 ? std::fmax(1.0, std::fabs(reference_delta) / s) : 1.0;
  return c_factor * s * eps_mach * scale;
}

DeltaScalar lift_parameter(double p) {
  if (!std::isfinite(p)) throw Error(Errc::invalid_input, "parameter must be finite");
  return DeltaScalar(p, 0.0);
}

DeltaScalar seed_input(double x, double s) {
  if (!std::isfinite(x) || !std::isfinite(s)) {
    throw Error(Errc::invalid_input, "input and step must be finite");
  }
  return DeltaScalar(x, s + 0.0);
}

DeltaScalar add(const DeltaScalar& a, const DeltaScalar& b) {
  return checked(a.value() + b.value(), a.delta() + b.delta(), "add");
}

DeltaScalar sub(const DeltaScalar& a, const DeltaScalar& b) {
  return checked(a.value() - b.value(), a.delta() - b.delta(), "sub");
}

DeltaScalar neg(const DeltaScalar& a) { return checked(-a.value(), -a.delta(), "neg"); }

DeltaScalar mul(const DeltaScalar& a, const DeltaScalar& b) {
  const double u = a.value(), du = a.delta();
  const double v = b.value(), dv = b.delta();
  return checked(u * v, (u * dv + v * du) + du * dv, "mul");
}

DeltaScalar reciprocal(const DeltaScalar& a) {
  const double u = a.value(), du = a.delta();
  const double shifted = u + du;
  if (u == 0.0 || shifted == 0.0) {
    throw Error(Errc::domain, "reciprocal: zero denominator at an endpoint");
  }
  if (std::signbit(u) != std::signbit(shifted)) {
    throw Error(Errc::domain, "reciprocal: pole between the endpoints");
  }
  // −Δu / (u(u+Δu)), divided in two steps so u·(u+Δu) cannot over/underflow
  // on its own.
  return checked(1.0 / u, -(du / u) / shifted, "reciprocal");
}

DeltaScalar div(const DeltaScalar& a, const DeltaScalar& b) { return mul(a, reciprocal(b)); }

DeltaScalar square(const DeltaScalar& a) {
  const double u = a.value(), du = a.delta();
  return checked(u * u, (2.0 * u) * du + du * du, "square");
}

DeltaScalar sqrt(const DeltaScalar& a) {
  const double u = a.value(), du = a.delta();
  const double shifted = u + du;
  if (u < 0.0 || shifted < 0.0) {
    throw Error(Errc::domain, "sqrt: negative radicand at an endpoint");
  }
  const double root = std::sqrt(u);
  if (du == 0.0) return checked(root, 0.0, "sqrt");
  return checked(root, du / (std::sqrt(shifted) + root), "sqrt");
}

DeltaScalar exp(const DeltaScalar& a) {
  const double u = a.value(), du = a.delta();
  const double base = std::exp(u);
  // |Δu| == 1 takes the Taylor branch.
  const double bracket = std::fabs(du) <= 1.0 ? expm1_taylor(du) : std::exp(du) - 1.0;
  return checked(base, base * bracket, "exp");
}

DeltaScalar log(const DeltaScalar& a) {
  const double u = a.value(), du = a.delta();
  if (!(u > 0.0) || !(u + du > 0.0)) {
    throw Error(Errc::domain, "log: nonpositive argument at an endpoint");
  }
  return checked(std::log(u), log1p_accurate(du / u), "log");
}

DeltaScalar pow(const DeltaScalar& a, const DeltaScalar& b) {
  if (b.delta() == 0.0) {
    if (b.value() == 2.0) return square(a);
    if (b.value() == 0.5) return sqrt(a);
    if (b.value() == -1.0) return reciprocal(a);
  }
  if (!(a.value() > 0.0) || !(a.value() + a.delta() > 0.0)) {
    throw Error(Errc::domain, "pow: base must be positive at both endpoints");
  }
  const DeltaScalar composed = exp(mul(b, log(a)));
  // The value itself is better served by the library pow; the delta comes
  // from the composed rules.
  return checked(std::pow(a.value(), b.value()), composed.delta(), "pow");
}

}  // namespace cdd
