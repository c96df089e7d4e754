#pragma once

// Piecewise cubics stored in two anchored forms per interval, and the
// telescoping divided difference across knots.
//
// With knots ξ_1 < … < ξ_k, interval l (1 <= l < k) is [ξ_l, ξ_{l+1}) and
// carries a left form a(x−ξ_l)³ + b(x−ξ_l)² + c(x−ξ_l) + d and a right form
// m(x−ξ_{l+1})³ + n(x−ξ_{l+1})² + o(x−ξ_{l+1}) + p. Interval 0 is (−∞, ξ_1)
// with a single form anchored at ξ_1; interval k is [ξ_k, ∞) with a single
// form anchored at ξ_k. A point equal to a knot belongs to the interval on
// its right.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cdd/delta_scalar.hpp"

namespace cdd {

/// c3·t³ + c2·t² + c1·t + c0 in the offset t from the piece's anchor knot.
struct CubicPiece {
  double c3 = 0.0;
  double c2 = 0.0;
  double c1 = 0.0;
  double c0 = 0.0;

  double operator()(double t) const { return ((c3 * t + c2) * t + c1) * t + c0; }
  friend bool operator==(const CubicPiece&, const CubicPiece&) = default;
};

/// Relative tolerance for the left/right agreement check at interval midpoints.
inline constexpr double kSplineAgreementTolerance = 1e-12;

class CubicSpline {
 public:
  /// `left` has k+1 pieces: [0] is the below-range piece (anchored at ξ_1),
  /// [1..k−1] the left forms of the interior intervals, [k] the above-range
  /// piece. `right` has k pieces: [0] repeats the below-range piece and
  /// [1..k−1] are the right forms of the interior intervals.
  /// Throws Errc::validation if the knots are not strictly increasing and
  /// finite, any coefficient is not finite, right[0] != left[0], the
  /// continuity links right[l].c0 == left[l+1].c0 fail (exact equality), or
  /// the two forms of an interior interval disagree at its midpoint.
  CubicSpline(std::vector<double> knots, std::vector<CubicPiece> left,
              std::vector<CubicPiece> right);

  std::span<const double> knots() const noexcept { return knots_; }
  std::span<const CubicPiece> left() const noexcept { return left_; }
  std::span<const CubicPiece> right() const noexcept { return right_; }
  std::size_t knot_count() const noexcept { return knots_.size(); }

  /// Interval index 0..k containing x (left-closed).
  std::size_t interval_of(double x) const noexcept;

  /// The piece used to evaluate interval `interval` and the knot it is
  /// anchored at: the below-range piece at ξ_1, the left form at ξ_l for
  /// interval l >= 1.
  const CubicPiece& value_piece(std::size_t interval) const noexcept;
  double value_anchor(std::size_t interval) const noexcept;

  double operator()(double x) const;

 private:
  std::vector<double> knots_;
  std::vector<CubicPiece> left_;
  std::vector<CubicPiece> right_;
};

/// Which path spline_eval_delta took; exposed for tests and diagnostics.
struct SplineDeltaTrace {
  std::size_t lower_interval = 0;
  std::size_t upper_interval = 0;
  bool swapped = false;  // the step was negative and the endpoints exchanged
};

/// (s(x), s(x+Δx) − s(x)). Within one interval the cubic's binomial
/// difference formula is used; across knots the telescoping sum of an
/// end piece from ξ_j, the knot-to-knot constant differences p_l − d_l, and
/// the start piece up to ξ_{i+1} (constant terms precanceled).
DeltaScalar spline_eval_delta(const CubicSpline& spline, const DeltaScalar& x,
                              SplineDeltaTrace* trace = nullptr);

/// Text format:
///   knots: k
///   ξ_1 … ξ_k
///   k+1 lines "a b c d"  (line 0 is the below-range piece m0 n0 o0 p0)
///   k lines   "m n o p"  (line 0 repeats the below-range piece)
/// Blank lines and lines starting with '#' are ignored. Throws Errc::io on
/// malformed text and Errc::validation on an invalid spline.
CubicSpline read_spline(std::istream& in);
CubicSpline read_spline_file(const std::string& path);

/// Writes the format read_spline accepts, with round-trip exact decimals.
void write_spline(std::ostream& out, const CubicSpline& spline);

}  // namespace cdd
