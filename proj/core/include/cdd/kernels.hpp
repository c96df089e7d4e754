#pragma once

namespace cdd {

/// Number of Taylor terms (beyond the precanceled leading 1) used for exp(d) − 1.
inline constexpr int kExpTaylorTerms = 17;

/// exp(d) − 1 for |d| <= 1 from the 17-term Taylor series with the constant
/// term removed, evaluated by compensated Horner. Within 2 ulps on [−1, 1].
double expm1_taylor(double d);

/// log(1 + x), accurate for small |x|.
double log1p_accurate(double x);

}  // namespace cdd
