#include "cdd/branch.hpp"

#include <algorithm>
#include <cmath>

namespace cdd {

PenaltyBranch penalty_branch(const DeltaScalar& x) noexcept {
  const double shifted = x.value() + x.delta();
  return (x.value() >= 0.0 && shifted >= 0.0) ? PenaltyBranch::squaring
                                              : PenaltyBranch::subtraction;
}

DeltaScalar penalty_delta(const DeltaScalar& x) {
  if (penalty_branch(x) == PenaltyBranch::squaring) return square(x);

  const double base = std::max(0.0, x.value());
  const double shifted = std::max(0.0, x.value() + x.delta());
  const double value = base * base;
  const double delta = shifted * shifted - value;
  if (!std::isfinite(value) || !std::isfinite(delta)) {
    throw Error(Errc::overflow, "penalty: result overflows");
  }
  return DeltaScalar(value, delta + 0.0);
}

}  // namespace cdd
