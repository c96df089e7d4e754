#pragma once

// Error-free transformations and a minimal unevaluated double-double pair.
// Internal to the library; relies on -ffp-contract=off (set project-wide).

#include <cmath>

namespace cdd::detail {

struct TwoDouble {
  double hi = 0.0;
  double lo = 0.0;
};

// a + b == s + e exactly.
inline TwoDouble two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double e = (a - (s - bb)) + (b - bb);
  return {s, e};
}

// Requires |a| >= |b| or a == 0.
inline TwoDouble fast_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

// a * b == p + e exactly (barring underflow).
inline TwoDouble two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

// (x.hi + x.lo) − c as a normalized pair, accurate to about 2^-104 relative.
inline TwoDouble offset_from(TwoDouble x, double c) {
  const TwoDouble d = two_sum(x.hi, -c);
  return fast_two_sum(d.hi, d.lo + x.lo);
}

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double result() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace cdd::detail
