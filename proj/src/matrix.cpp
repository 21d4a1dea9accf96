#include "ggmlrt/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "ggmlrt/error.hpp"

namespace ggmlrt {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), entries_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw DomainError("matrix entry count does not match its shape");
  }
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  entries_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DomainError("ragged matrix literal");
    entries_.insert(entries_.end(), r.begin(), r.end());
  }
}

DenseMatrix DenseMatrix::identity(std::size_t dim) {
  DenseMatrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::stacked(const DenseMatrix& below) const {
  if (below.cols_ != cols_) throw DomainError("cannot stack matrices with different widths");
  std::vector<double> e = entries_;
  e.insert(e.end(), below.entries_.begin(), below.entries_.end());
  return DenseMatrix(rows_ + below.rows_, cols_, std::move(e));
}

DenseMatrix DenseMatrix::principal(std::span<const std::size_t> keep) const {
  DenseMatrix out(keep.size(), keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    for (std::size_t j = 0; j < keep.size(); ++j) out(i, j) = (*this)(keep[i], keep[j]);
  }
  return out;
}

DenseMatrix DenseMatrix::select_columns(std::span<const std::size_t> keep) const {
  DenseMatrix out(rows_, keep.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t j = 0; j < keep.size(); ++j) out(r, j) = (*this)(r, keep[j]);
  }
  return out;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  }
  return t;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& rhs) const {
  if (cols_ != rhs.rows_) throw DomainError("matrix product shape mismatch");
  DenseMatrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
    }
  }
  return out;
}

DenseMatrix SpdFactor::reconstruct() const {
  return lower_ * lower_.transposed();
}

SpdFactor cholesky(const DenseMatrix& a) {
  const std::size_t n = a.rows();
  if (n == 0 || a.cols() != n) throw DomainError("cholesky requires a nonempty square matrix");

  double scale = 0.0;
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    trace += a(i, i);
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(a(i, j))) throw DomainError("cholesky input has a non-finite entry");
      scale = std::max(scale, std::abs(a(i, j)));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(a(i, j) - a(j, i)) > kSymmetryTolerance * scale) {
        throw DomainError("cholesky input is not symmetric");
      }
    }
  }

  const double threshold = kPivotTolerance * trace / static_cast<double>(n);
  if (!(trace > 0.0)) throw NotPositiveDefinite("matrix has nonpositive trace");

  DenseMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = a(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (!(pivot > threshold)) {
      std::ostringstream msg;
      msg << "matrix is not positive definite (pivot " << j << " = " << pivot << ")";
      throw NotPositiveDefinite(msg.str());
    }
    const double d = std::sqrt(pivot);
    l(j, j) = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / d;
    }
  }
  return SpdFactor(std::move(l));
}

double log_det(const SpdFactor& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.dim(); ++i) s += std::log(f.lower()(i, i));
  return 2.0 * s;
}

std::vector<double> mean_vector(const DenseMatrix& x) {
  if (x.rows() == 0) throw DomainError("mean of an empty matrix");
  std::vector<double> m(x.cols(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) m[c] += x(r, c);
  }
  const double n = static_cast<double>(x.rows());
  for (double& v : m) v /= n;
  return m;
}

DenseMatrix covariance_mle(const DenseMatrix& x, std::span<const double> center) {
  if (x.rows() == 0) throw DomainError("covariance of an empty matrix");
  if (center.size() != x.cols()) throw DomainError("center length does not match column count");
  const std::size_t p = x.cols();
  DenseMatrix s(p, p);
  std::vector<double> dev(p);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < p; ++c) dev[c] = x(r, c) - center[c];
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j <= i; ++j) s(i, j) += dev[i] * dev[j];
    }
  }
  const double n = static_cast<double>(x.rows());
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      s(i, j) /= n;
      s(j, i) = s(i, j);
    }
  }
  return s;
}

}  // namespace ggmlrt
