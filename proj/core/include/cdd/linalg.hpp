#pragma once

// Dense vectors and matrices of value/delta pairs, and the divided
// difference of a linear solve x = A⁻¹b.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cdd/delta_scalar.hpp"

namespace cdd {

/// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  static Matrix identity(std::size_t n);
  /// Throws Errc::shape if the rows are ragged.
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

double norm_inf(const Matrix& a) noexcept;
double norm_inf(std::span<const double> x) noexcept;

/// LU factorization with partial pivoting. A pivot at or below
/// n·eps·‖A‖∞ (or exactly zero) is treated as singular.
class LuFactorization {
 public:
  /// Throws Errc::shape for non-square input, Errc::singular if singular.
  explicit LuFactorization(const Matrix& a);

  std::size_t size() const noexcept { return lu_.rows(); }
  std::vector<double> solve(std::span<const double> b) const;
  Matrix inverse() const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
};

class DeltaVector {
 public:
  DeltaVector() = default;
  /// Throws Errc::shape on length mismatch, Errc::invalid_input on non-finite entries.
  DeltaVector(std::vector<double> values, std::vector<double> deltas);
  /// All deltas zero.
  static DeltaVector parameters(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> deltas() const noexcept { return deltas_; }
  DeltaScalar operator[](std::size_t i) const { return DeltaScalar(values_[i], deltas_[i]); }

 private:
  std::vector<double> values_;
  std::vector<double> deltas_;
};

class DeltaMatrix {
 public:
  DeltaMatrix() = default;
  /// Both square with the same size and finite entries, else Errc::shape /
  /// Errc::invalid_input.
  DeltaMatrix(Matrix values, Matrix deltas);
  static DeltaMatrix parameters(Matrix values);

  std::size_t size() const noexcept { return values_.rows(); }
  const Matrix& values() const noexcept { return values_; }
  const Matrix& deltas() const noexcept { return deltas_; }

 private:
  Matrix values_;
  Matrix deltas_;
};

/// Σ uᵢvᵢ with delta Σ (uᵢΔvᵢ + vᵢΔuᵢ + ΔuᵢΔvᵢ).
DeltaScalar dot_delta(const DeltaVector& a, const DeltaVector& b);

/// Row-wise dot_delta.
DeltaVector matvec_delta(const DeltaMatrix& a, const DeltaVector& x);

enum class SolveBranch { none, series, direct };

struct SolveReport {
  SolveBranch branch = SolveBranch::none;
  double perturbation_norm = 0.0;  // ‖ΔA·A⁻¹‖∞
  std::size_t series_terms = 0;
};

/// Largest perturbation norm for which the precanceled series is used.
inline constexpr double kSeriesNormLimit = 0.5;
inline constexpr std::size_t kMaxSeriesTerms = 200;

/// x = A⁻¹b and Δx = (A+ΔA)⁻¹(b+Δb) − A⁻¹b evaluated as
///   Δx = A⁻¹( [(I+B)⁻¹ − I] b + (I+B)⁻¹ Δb ),   B = ΔA·A⁻¹.
/// When ‖B‖∞ <= 1/2 the bracket is summed as −Bb + B²b − … with the identity
/// precanceled; otherwise it is (I+B)⁻¹b − b by direct subtraction.
/// Throws Errc::singular if A or A+ΔA is singular, Errc::shape on mismatch.
DeltaVector solve_delta(const DeltaMatrix& a, const DeltaVector& b,
                        SolveReport* report = nullptr);

/// Text matrix format: first non-comment line n, then n rows of n
/// whitespace-separated numbers. `read_matrix` reads one such matrix.
Matrix read_matrix(std::istream& in);

/// A matrix file optionally followed by n further rows holding ΔA. When
/// those rows are absent ΔA is zero.
DeltaMatrix read_perturbed_matrix(std::istream& in);
DeltaMatrix read_perturbed_matrix_file(const std::string& path);

}  // namespace cdd
