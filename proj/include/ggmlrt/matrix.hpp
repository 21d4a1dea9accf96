#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ggmlrt {

// Dense row-major real matrix. Entries are required to be finite.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t dim);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {entries_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {entries_.data() + r * cols_, cols_}; }

  const std::vector<double>& entries() const noexcept { return entries_; }

  // Rows of `below` appended under this matrix; column counts must agree.
  DenseMatrix stacked(const DenseMatrix& below) const;

  // Principal submatrix on the given (sorted, zero-based) indices.
  DenseMatrix principal(std::span<const std::size_t> keep) const;

  // Copy with the given columns retained, in order.
  DenseMatrix select_columns(std::span<const std::size_t> keep) const;

  DenseMatrix transposed() const;
  DenseMatrix operator*(const DenseMatrix& rhs) const;

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

// Lower-triangular Cholesky factor L with a strictly positive diagonal.
class SpdFactor {
 public:
  std::size_t dim() const noexcept { return lower_.rows(); }
  const DenseMatrix& lower() const noexcept { return lower_; }

  // L * L^T
  DenseMatrix reconstruct() const;

 private:
  friend SpdFactor cholesky(const DenseMatrix& a);
  explicit SpdFactor(DenseMatrix lower) : lower_(std::move(lower)) {}
  DenseMatrix lower_;
};

inline constexpr double kSymmetryTolerance = 1e-10;
inline constexpr double kPivotTolerance = 1e-12;

// Throws DomainError for a non-square or asymmetric input and
// NotPositiveDefinite when a pivot falls to kPivotTolerance * trace/dim.
SpdFactor cholesky(const DenseMatrix& a);

// 2 * sum(log diag L)
double log_det(const SpdFactor& f);

std::vector<double> mean_vector(const DenseMatrix& x);

// Maximum-likelihood covariance about `center`: divisor is rows(), not rows()-1.
// Entry (i, j) depends on columns i and j only, so restricting columns first
// gives bit-identical entries to taking the principal submatrix afterwards.
DenseMatrix covariance_mle(const DenseMatrix& x, std::span<const double> center);

}  // namespace ggmlrt
