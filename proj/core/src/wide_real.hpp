#pragma once

// Thin RAII wrapper over a 256-bit MPFR value. Internal to the oracle.

#include <mpfr.h>

#include <utility>

namespace cdd::detail {

inline constexpr mpfr_prec_t kWideBits = 256;

class WideReal {
 public:
  WideReal() { mpfr_init2(v_, kWideBits); mpfr_set_zero(v_, 1); }
  WideReal(double d) { mpfr_init2(v_, kWideBits); mpfr_set_d(v_, d, MPFR_RNDN); }  // exact
  WideReal(const WideReal& o) { mpfr_init2(v_, kWideBits); mpfr_set(v_, o.v_, MPFR_RNDN); }
  WideReal(WideReal&& o) noexcept {
    mpfr_init2(v_, kWideBits);
    mpfr_swap(v_, o.v_);
  }
  WideReal& operator=(WideReal o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~WideReal() { mpfr_clear(v_); }

  mpfr_ptr get() noexcept { return v_; }
  mpfr_srcptr get() const noexcept { return v_; }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }

  friend WideReal operator+(const WideReal& a, const WideReal& b) {
    WideReal r;
    mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend WideReal operator-(const WideReal& a, const WideReal& b) {
    WideReal r;
    mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend WideReal operator*(const WideReal& a, const WideReal& b) {
    WideReal r;
    mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend WideReal operator/(const WideReal& a, const WideReal& b) {
    WideReal r;
    mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend WideReal operator-(const WideReal& a) {
    WideReal r;
    mpfr_neg(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  WideReal& operator+=(const WideReal& b) {
    mpfr_add(v_, v_, b.v_, MPFR_RNDN);
    return *this;
  }
  WideReal& operator-=(const WideReal& b) {
    mpfr_sub(v_, v_, b.v_, MPFR_RNDN);
    return *this;
  }

  friend int compare(const WideReal& a, const WideReal& b) { return mpfr_cmp(a.v_, b.v_); }
  friend bool operator<(const WideReal& a, const WideReal& b) { return compare(a, b) < 0; }
  friend bool operator==(const WideReal& a, const WideReal& b) { return mpfr_equal_p(a.v_, b.v_); }

  friend WideReal abs(const WideReal& a) {
    WideReal r;
    mpfr_abs(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend WideReal sqrt(const WideReal& a) {
    WideReal r;
    mpfr_sqrt(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend WideReal exp(const WideReal& a) {
    WideReal r;
    mpfr_exp(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend WideReal expm1(const WideReal& a) {
    WideReal r;
    mpfr_expm1(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend WideReal log(const WideReal& a) {
    WideReal r;
    mpfr_log(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend WideReal pow(const WideReal& a, const WideReal& b) {
    WideReal r;
    mpfr_pow(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend WideReal ldexp(const WideReal& a, long e) {
    WideReal r;
    mpfr_mul_2si(r.v_, a.v_, e, MPFR_RNDN);
    return r;
  }

 private:
  mpfr_t v_;
};

// Make the hidden friends reachable by qualified name.
WideReal sqrt(const WideReal& a);
WideReal exp(const WideReal& a);
WideReal log(const WideReal& a);
WideReal pow(const WideReal& a, const WideReal& b);

}  // namespace cdd::detail
