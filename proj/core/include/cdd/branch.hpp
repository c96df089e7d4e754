#pragma once

// Branching constructs whose divided differences can still be evaluated
// without cancellation. Splines live in spline.hpp.

#include <concepts>
#include <cstddef>
#include <string>

#include "cdd/delta_scalar.hpp"
#include "cdd/error.hpp"

namespace cdd {

/// max(0, x)². Uses the squaring rule when both endpoints are nonnegative;
/// otherwise one endpoint contributes zero and direct subtraction is exact
/// enough.
DeltaScalar penalty_delta(const DeltaScalar& x);

/// Which branch penalty_delta takes for this operand.
enum class PenaltyBranch { squaring, subtraction };
PenaltyBranch penalty_branch(const DeltaScalar& x) noexcept;

/// Applies `body` exactly `max_iters` times. Loops that would stop on a
/// tolerance must be rewritten this way so that the runs at x and at x+s
/// take the same path. Errors raised by the body are rethrown with the
/// 0-based iteration index attached.
template <class State, class Body>
  requires std::invocable<Body&, const State&> &&
           std::convertible_to<std::invoke_result_t<Body&, const State&>, State>
State bounded_loop(State state, Body body, std::size_t max_iters) {
  if (max_iters < 1) {
    throw Error(Errc::invalid_input, "bounded_loop: max_iters must be at least 1");
  }
  for (std::size_t i = 0; i < max_iters; ++i) {
    try {
      state = body(static_cast<const State&>(state));
    } catch (const Error& e) {
      throw Error(e.code(), "iteration " + std::to_string(i) + ": " + e.detail(), e.offset());
    }
  }
  return state;
}

}  // namespace cdd
