#include "cdd/kernels.hpp"

#include <array>
#include <cmath>

#include "eft.hpp"

namespace cdd {
namespace {

// 1/k! for k = 1..17 as unevaluated hi + lo pairs.
constexpr std::array<detail::TwoDouble, kExpTaylorTerms> kInverseFactorials = {{
    {0x1.0000000000000p+0, 0x0.0p+0},
    {0x1.0000000000000p-1, 0x0.0p+0},
    {0x1.5555555555555p-3, 0x1.5555555555555p-57},
    {0x1.5555555555555p-5, 0x1.5555555555555p-59},
    {0x1.1111111111111p-7, 0x1.1111111111111p-63},
    {0x1.6c16c16c16c17p-10, -0x1.f49f49f49f49fp-65},
    {0x1.a01a01a01a01ap-13, 0x1.a01a01a01a01ap-73},
    {0x1.a01a01a01a01ap-16, 0x1.a01a01a01a01ap-76},
    {0x1.71de3a556c734p-19, -0x1.c154f8ddc6c00p-73},
    {0x1.27e4fb7789f5cp-22, 0x1.cbbc05b4fa99ap-76},
    {0x1.ae64567f544e4p-26, -0x1.c062e06d1f209p-80},
    {0x1.1eed8eff8d898p-29, -0x1.2aec959e14c06p-83},
    {0x1.6124613a86d09p-33, 0x1.f28e0cc748ebep-87},
    {0x1.93974a8c07c9dp-37, 0x1.05d6f8a2efd1fp-92},
    {0x1.ae7f3e733b81fp-41, 0x1.1d8656b0ee8cbp-97},
    {0x1.ae7f3e733b81fp-45, 0x1.1d8656b0ee8cbp-101},
    {0x1.952c77030ad4ap-49, 0x1.ac981465ddc6cp-103},
}};

}  // namespace

double expm1_taylor(double d) {
  // Compensated Horner on sum_{k=1}^{17} d^k / k!: the running value s
  // carries the double result, r accumulates the rounding errors.
  double s = kInverseFactorials.back().hi;
  double r = kInverseFactorials.back().lo;
  for (int k = kExpTaylorTerms - 2; k >= 0; --k) {
    const auto [p, p_err] = detail::two_prod(s, d);
    const auto [t, t_err] = detail::two_sum(p, kInverseFactorials[k].hi);
    r = r * d + (p_err + t_err + kInverseFactorials[k].lo);
    s = t;
  }
  const auto [p, p_err] = detail::two_prod(s, d);
  return p + (p_err + r * d);
}

double log1p_accurate(double x) { return std::log1p(x); }

}  // namespace cdd
