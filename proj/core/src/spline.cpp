#include "cdd/spline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "cdd/error.hpp"
#include "eft.hpp"
#include "text.hpp"

namespace cdd {
namespace {

using detail::TwoDouble;

bool finite_piece(const CubicPiece& p) {
  return std::isfinite(p.c3) && std::isfinite(p.c2) && std::isfinite(p.c1) &&
         std::isfinite(p.c0);
}

// P(t+h) − P(t) for h >= 0, with t carried as hi + lo. The lo part enters
// through the first-order correction ∂/∂t [P(t+h) − P(t)]·t_lo.
double cubic_increment(const CubicPiece& p, TwoDouble t, double h) {
  const double th = t.hi;
  const double main = h * (p.c3 * (3.0 * th * (th + h) + h * h) + p.c2 * (2.0 * th + h) + p.c1);
  const double correction = t.lo * h * (p.c3 * (6.0 * th + 3.0 * h) + 2.0 * p.c2);
  return main + correction;
}

// P(t) − P(0) = P(t) − c0, constant term precanceled.
double from_anchor(const CubicPiece& p, TwoDouble t) {
  const double th = t.hi;
  const double main = th * ((p.c3 * th + p.c2) * th + p.c1);
  const double correction = t.lo * ((3.0 * p.c3 * th + 2.0 * p.c2) * th + p.c1);
  return main + correction;
}

// Interval index of the exact point hi + lo.
std::size_t interval_of_pair(std::span<const double> knots, TwoDouble x) {
  auto idx = static_cast<std::size_t>(std::upper_bound(knots.begin(), knots.end(), x.hi) -
                                      knots.begin());
  if (idx > 0 && knots[idx - 1] == x.hi && x.lo < 0.0) --idx;
  return idx;
}

}  // namespace

CubicSpline::CubicSpline(std::vector<double> knots, std::vector<CubicPiece> left,
                         std::vector<CubicPiece> right)
    : knots_(std::move(knots)), left_(std::move(left)), right_(std::move(right)) {
  const std::size_t k = knots_.size();
  if (k == 0) throw Error(Errc::validation, "spline needs at least one knot");
  if (left_.size() != k + 1) {
    throw Error(Errc::validation, "spline needs k+1 left pieces, got " +
                                      std::to_string(left_.size()));
  }
  if (right_.size() != k) {
    throw Error(Errc::validation, "spline needs k right pieces, got " +
                                      std::to_string(right_.size()));
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (!std::isfinite(knots_[i])) throw Error(Errc::validation, "knots must be finite");
    if (i > 0 && !(knots_[i - 1] < knots_[i])) {
      throw Error(Errc::validation, "knots must be strictly increasing");
    }
  }
  if (!std::all_of(left_.begin(), left_.end(), finite_piece) ||
      !std::all_of(right_.begin(), right_.end(), finite_piece)) {
    throw Error(Errc::validation, "spline coefficients must be finite");
  }
  if (!(right_[0] == left_[0])) {
    throw Error(Errc::validation, "right piece 0 must repeat the below-range piece");
  }
  for (std::size_t l = 0; l < k; ++l) {
    if (right_[l].c0 != left_[l + 1].c0) {
      throw Error(Errc::validation,
                  "continuity broken at knot " + std::to_string(l + 1) + ": p != d");
    }
  }
  for (std::size_t l = 1; l < k; ++l) {
    const double mid = 0.5 * (knots_[l - 1] + knots_[l]);
    const double lv = left_[l](mid - knots_[l - 1]);
    const double rv = right_[l](mid - knots_[l]);
    const double scale = std::max({std::fabs(lv), std::fabs(rv), std::fabs(left_[l].c0),
                                   std::fabs(right_[l].c0)});
    if (std::fabs(lv - rv) > kSplineAgreementTolerance * scale) {
      throw Error(Errc::validation, "left and right forms of interval " + std::to_string(l) +
                                        " disagree at its midpoint");
    }
  }
}

std::size_t CubicSpline::interval_of(double x) const noexcept {
  return interval_of_pair(knots_, {x, 0.0});
}

const CubicPiece& CubicSpline::value_piece(std::size_t interval) const noexcept {
  return left_[interval];
}

double CubicSpline::value_anchor(std::size_t interval) const noexcept {
  return interval == 0 ? knots_.front() : knots_[interval - 1];
}

double CubicSpline::operator()(double x) const {
  const std::size_t i = interval_of(x);
  return value_piece(i)(x - value_anchor(i));
}

DeltaScalar spline_eval_delta(const CubicSpline& spline, const DeltaScalar& x,
                              SplineDeltaTrace* trace) {
  const double value = spline(x.value());
  if (!std::isfinite(value)) throw Error(Errc::overflow, "spline: value overflows");
  const double dx = x.delta();
  if (dx == 0.0) {
    if (trace) {
      const std::size_t i = spline.interval_of(x.value());
      *trace = {i, i, false};
    }
    return DeltaScalar(value, 0.0);
  }

  // Normalize to a nonnegative step between two exactly represented points.
  const bool swapped = dx < 0.0;
  const double h = std::fabs(dx);
  const TwoDouble moved = detail::two_sum(x.value(), dx);
  const TwoDouble lo = swapped ? moved : TwoDouble{x.value(), 0.0};
  const TwoDouble hi = swapped ? TwoDouble{x.value(), 0.0} : moved;

  const auto knots = spline.knots();
  const std::size_t i = interval_of_pair(knots, lo);
  const std::size_t j = interval_of_pair(knots, hi);
  if (trace) *trace = {i, j, swapped};

  double delta = 0.0;
  if (i == j) {
    const TwoDouble t = detail::offset_from(lo, spline.value_anchor(i));
    delta = cubic_increment(spline.value_piece(i), t, h);
  } else {
    // s(hi) − s(ξ_j)  +  Σ_{l=i+1}^{j−1} (p_l − d_l)  +  s(ξ_{i+1}) − s(lo)
    detail::CompensatedSum sum;
    sum.add(from_anchor(spline.left()[j], detail::offset_from(hi, knots[j - 1])));
    for (std::size_t l = i + 1; l < j; ++l) {
      sum.add(spline.right()[l].c0);
      sum.add(-spline.left()[l].c0);
    }
    sum.add(-from_anchor(spline.right()[i], detail::offset_from(lo, knots[i])));
    delta = sum.result();
  }
  if (!std::isfinite(delta)) throw Error(Errc::overflow, "spline: delta overflows");
  return DeltaScalar(value, (swapped ? -delta : delta) + 0.0);
}

CubicSpline read_spline(std::istream& in) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    lines.push_back(line);
  }
  auto numbers = [](const std::string& line, std::size_t line_no) {
    std::vector<double> out;
    std::istringstream ss(line);
    for (std::string tok; ss >> tok;) {
      const auto v = detail::parse_double(tok);
      if (!v) {
        throw Error(Errc::io, "spline data line " + std::to_string(line_no) + ": bad number '" +
                                  tok + "'");
      }
      out.push_back(*v);
    }
    return out;
  };

  if (lines.empty()) throw Error(Errc::io, "spline file is empty");
  std::size_t k = 0;
  {
    std::istringstream header(lines[0]);
    std::string tag;
    long long count = -1;
    if (!(header >> tag >> count) || tag != "knots:" || count < 1) {
      throw Error(Errc::io, "spline header must be 'knots: k' with k >= 1");
    }
    k = static_cast<std::size_t>(count);
  }
  if (lines.size() != 1 + 1 + (k + 1) + k) {
    throw Error(Errc::io, "spline file with k = " + std::to_string(k) + " needs " +
                              std::to_string(2 * k + 3) + " data lines, got " +
                              std::to_string(lines.size()));
  }
  std::vector<double> knots = numbers(lines[1], 2);
  if (knots.size() != k) throw Error(Errc::io, "knot line must hold exactly k values");

  auto piece = [&](std::size_t idx) {
    const auto v = numbers(lines[idx], idx + 1);
    if (v.size() != 4) {
      throw Error(Errc::io, "spline data line " + std::to_string(idx + 1) +
                                " must hold 4 coefficients");
    }
    return CubicPiece{v[0], v[1], v[2], v[3]};
  };
  std::vector<CubicPiece> left, right;
  for (std::size_t i = 0; i <= k; ++i) left.push_back(piece(2 + i));
  for (std::size_t i = 0; i < k; ++i) right.push_back(piece(3 + k + i));
  return CubicSpline(std::move(knots), std::move(left), std::move(right));
}

CubicSpline read_spline_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open spline file '" + path + "'");
  return read_spline(in);
}

void write_spline(std::ostream& out, const CubicSpline& spline) {
  using detail::format_double;
  out << "knots: " << spline.knot_count() << '\n';
  for (std::size_t i = 0; i < spline.knot_count(); ++i) {
    out << (i ? " " : "") << format_double(spline.knots()[i]);
  }
  out << '\n';
  auto put = [&](const CubicPiece& p) {
    out << format_double(p.c3) << ' ' << format_double(p.c2) << ' ' << format_double(p.c1)
        << ' ' << format_double(p.c0) << '\n';
  };
  for (const auto& p : spline.left()) put(p);
  for (const auto& p : spline.right()) put(p);
}

}  // namespace cdd
