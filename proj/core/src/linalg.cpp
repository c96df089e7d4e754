#include "cdd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include "cdd/error.hpp"
#include "text.hpp"

namespace cdd {
namespace {

void require_finite(std::span<const double> xs, const char* what) {
  for (double v : xs) {
    if (!std::isfinite(v)) throw Error(Errc::invalid_input, std::string(what) + " must be finite");
  }
}

std::vector<double> solve_or_throw(const LuFactorization& lu, std::span<const double> b,
                                   const char* what) {
  auto x = lu.solve(b);
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(Errc::overflow, std::string(what) + " overflows");
  }
  return x;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.front().size() : 0;
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw Error(Errc::shape, "ragged matrix rows");
    std::copy(rows[i].begin(), rows[i].end(), m.data_.begin() + static_cast<std::ptrdiff_t>(i * c));
  }
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error(Errc::shape, "matrix product dimension mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

std::vector<double> operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw Error(Errc::shape, "matrix-vector dimension mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto row = a.row(i);
    y[i] = std::inner_product(row.begin(), row.end(), x.begin(), 0.0);
  }
  return y;
}

double norm_inf(const Matrix& a) noexcept {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (double v : a.row(i)) s += std::fabs(v);
    best = std::max(best, s);
  }
  return best;
}

double norm_inf(std::span<const double> x) noexcept {
  double best = 0.0;
  for (double v : x) best = std::max(best, std::fabs(v));
  return best;
}

LuFactorization::LuFactorization(const Matrix& a) : lu_(a), perm_(a.rows()) {
  if (!a.square()) throw Error(Errc::shape, "LU needs a square matrix");
  const std::size_t n = a.rows();
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  const double threshold =
      static_cast<double>(n) * std::numeric_limits<double>::epsilon() * norm_inf(a);

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::fabs(lu_(i, k)) > std::fabs(lu_(pivot, k))) pivot = i;
    }
    const double p = lu_(pivot, k);
    if (p == 0.0 || std::fabs(p) <= threshold || !std::isfinite(p)) {
      throw Error(Errc::singular, "matrix is singular to working precision");
    }
    if (pivot != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(pivot, j));
      std::swap(perm_[k], perm_[pivot]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu_(i, k) / p;
      lu_(i, k) = f;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
    }
  }
}

std::vector<double> LuFactorization::solve(std::span<const double> b) const {
  const std::size_t n = size();
  if (b.size() != n) throw Error(Errc::shape, "right-hand side length mismatch");
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu_(i, j) * x[j];
    x[i] /= lu_(i, i);
  }
  return x;
}

Matrix LuFactorization::inverse() const {
  const std::size_t n = size();
  Matrix inv(n, n);
  std::vector<double> e(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    e[c] = 1.0;
    const auto col = solve(e);
    for (std::size_t r = 0; r < n; ++r) inv(r, c) = col[r];
    e[c] = 0.0;
  }
  return inv;
}

DeltaVector::DeltaVector(std::vector<double> values, std::vector<double> deltas)
    : values_(std::move(values)), deltas_(std::move(deltas)) {
  if (values_.size() != deltas_.size()) {
    throw Error(Errc::shape, "values and deltas differ in length");
  }
  require_finite(values_, "vector values");
  require_finite(deltas_, "vector deltas");
}

DeltaVector DeltaVector::parameters(std::vector<double> values) {
  std::vector<double> zeros(values.size(), 0.0);
  return DeltaVector(std::move(values), std::move(zeros));
}

DeltaMatrix::DeltaMatrix(Matrix values, Matrix deltas)
    : values_(std::move(values)), deltas_(std::move(deltas)) {
  if (!values_.square()) throw Error(Errc::shape, "delta matrix must be square");
  if (values_.rows() != deltas_.rows() || values_.cols() != deltas_.cols()) {
    throw Error(Errc::shape, "values and deltas differ in shape");
  }
  require_finite(values_.data(), "matrix values");
  require_finite(deltas_.data(), "matrix deltas");
}

DeltaMatrix DeltaMatrix::parameters(Matrix values) {
  Matrix zeros(values.rows(), values.cols());
  return DeltaMatrix(std::move(values), std::move(zeros));
}

DeltaScalar dot_delta(const DeltaVector& a, const DeltaVector& b) {
  if (a.size() != b.size()) throw Error(Errc::shape, "dot product length mismatch");
  DeltaScalar acc(0.0, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) acc = add(acc, mul(a[i], b[i]));
  return acc;
}

DeltaVector matvec_delta(const DeltaMatrix& a, const DeltaVector& x) {
  const std::size_t n = a.size();
  if (x.size() != n) throw Error(Errc::shape, "matrix-vector dimension mismatch");
  std::vector<double> values(n), deltas(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto vr = a.values().row(i);
    const auto dr = a.deltas().row(i);
    const DeltaVector row(std::vector<double>(vr.begin(), vr.end()),
                          std::vector<double>(dr.begin(), dr.end()));
    const DeltaScalar yi = dot_delta(row, x);
    values[i] = yi.value();
    deltas[i] = yi.delta();
  }
  return DeltaVector(std::move(values), std::move(deltas));
}

DeltaVector solve_delta(const DeltaMatrix& a, const DeltaVector& b, SolveReport* report) {
  const std::size_t n = a.size();
  if (b.size() != n) throw Error(Errc::shape, "right-hand side length mismatch");

  const LuFactorization lu(a.values());
  std::vector<double> x = solve_or_throw(lu, b.values(), "solution");

  const Matrix& da = a.deltas();
  const Matrix b_mat = da * lu.inverse();  // B = ΔA·A⁻¹
  const double b_norm = norm_inf(b_mat);

  Matrix shifted = b_mat;  // I + B
  for (std::size_t i = 0; i < n; ++i) shifted(i, i) += 1.0;
  std::optional<LuFactorization> shifted_lu;
  try {
    shifted_lu.emplace(shifted);
  } catch (const Error& e) {
    if (e.code() == Errc::singular) {
      throw Error(Errc::singular, "perturbed matrix A+dA is singular to working precision");
    }
    throw;
  }

  SolveReport local;
  local.perturbation_norm = b_norm;

  // bracket = [(I+B)⁻¹ − I] b
  std::vector<double> bracket(n, 0.0);
  if (b_norm <= kSeriesNormLimit) {
    local.branch = SolveBranch::series;
    // Terms t_k = (−B)^k b, applied as t_k = −ΔA·(A⁻¹ t_{k−1}); t_1 = −ΔA·x.
    std::vector<double> term = da * std::span<const double>(x);
    for (double& v : term) v = -v;
    std::size_t terms = 0;
    while (true) {
      if (++terms > kMaxSeriesTerms) {
        throw Error(Errc::numerical, "perturbation series did not converge");
      }
      for (std::size_t i = 0; i < n; ++i) bracket[i] += term[i];
      const auto y = lu.solve(term);
      term = da * std::span<const double>(y);
      for (double& v : term) v = -v;
      const double next = norm_inf(term);
      if (next == 0.0 || next < kUnitRoundoff * norm_inf(bracket)) break;
    }
    local.series_terms = terms;
  } else {
    local.branch = SolveBranch::direct;
    const auto z = solve_or_throw(*shifted_lu, b.values(), "perturbed solution");
    for (std::size_t i = 0; i < n; ++i) bracket[i] = z[i] - b.values()[i];
  }

  const auto second = solve_or_throw(*shifted_lu, b.deltas(), "delta right-hand side");
  for (std::size_t i = 0; i < n; ++i) bracket[i] += second[i];
  std::vector<double> dx = solve_or_throw(lu, bracket, "solution delta");
  for (double& v : dx) v += 0.0;

  if (report) *report = local;
  return DeltaVector(std::move(x), std::move(dx));
}

namespace {

std::vector<std::vector<double>> numeric_lines(std::istream& in) {
  std::vector<std::vector<double>> rows;
  for (std::string line; std::getline(in, line);) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<double> row;
    std::istringstream ss(line);
    for (std::string tok; ss >> tok;) {
      const auto v = detail::parse_double(tok);
      if (!v) throw Error(Errc::io, "matrix file: bad number '" + tok + "'");
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::size_t header_size(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows[0].size() != 1) {
    throw Error(Errc::io, "matrix file must start with a line holding n");
  }
  const double n = rows[0][0];
  if (!(n >= 1.0) || n != std::floor(n) || n > 1e6) {
    throw Error(Errc::io, "matrix size n must be a positive integer");
  }
  return static_cast<std::size_t>(n);
}

Matrix block(const std::vector<std::vector<double>>& rows, std::size_t first, std::size_t n) {
  Matrix m(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = rows[first + r];
    if (row.size() != n) {
      throw Error(Errc::io, "matrix row " + std::to_string(first + r) + " must hold " +
                                std::to_string(n) + " numbers");
    }
    for (std::size_t c = 0; c < n; ++c) m(r, c) = row[c];
  }
  return m;
}

}  // namespace

Matrix read_matrix(std::istream& in) {
  const auto rows = numeric_lines(in);
  const std::size_t n = header_size(rows);
  if (rows.size() != n + 1) {
    throw Error(Errc::io, "matrix file must hold exactly n rows after the header");
  }
  return block(rows, 1, n);
}

DeltaMatrix read_perturbed_matrix(std::istream& in) {
  const auto rows = numeric_lines(in);
  const std::size_t n = header_size(rows);
  if (rows.size() != n + 1 && rows.size() != 2 * n + 1) {
    throw Error(Errc::io, "matrix file must hold n rows (A) or 2n rows (A then dA)");
  }
  Matrix values = block(rows, 1, n);
  Matrix deltas = rows.size() == 2 * n + 1 ? block(rows, n + 1, n) : Matrix(n, n);
  try {
    return DeltaMatrix(std::move(values), std::move(deltas));
  } catch (const Error& e) {
    throw Error(Errc::io, "matrix file: " + e.detail());
  }
}

DeltaMatrix read_perturbed_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open matrix file '" + path + "'");
  return read_perturbed_matrix(in);
}

}  // namespace cdd
