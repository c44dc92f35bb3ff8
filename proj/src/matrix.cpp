#include "pgn/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pgn/errors.hpp"
#include "pgn/kernels.hpp"

namespace pgn {
namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeMismatch(std::string(what) + ": shapes " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                        std::to_string(b.cols()));
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (data_.size() != rows_ * cols_) {
    throw InvalidArgument("Matrix: expected " + std::to_string(rows_ * cols_) + " entries, got " +
                          std::to_string(data_.size()));
  }
  if (!std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); })) {
    throw InvalidArgument("Matrix: non-finite entry");
  }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t m = rows.size();
  const std::size_t n = m == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(m * n);
  for (const auto& r : rows) {
    if (r.size() != n) throw InvalidArgument("Matrix::from_rows: ragged rows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Matrix(m, n, std::move(data));
}

Matrix Matrix::identity(std::size_t n) {
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

Matrix Matrix::diagonal(std::size_t rows, std::size_t cols, std::span<const double> d) {
  if (d.size() > std::min(rows, cols)) throw InvalidArgument("Matrix::diagonal: too many entries");
  Matrix out(rows, cols);
  for (std::size_t i = 0; i < d.size(); ++i) out(i, i) = d[i];
  return out;
}

Matrix Matrix::transposed() const {
  Matrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ShapeMismatch("matrix product: inner dimensions differ");
  // Rows of the product are b^T applied to rows of a.
  Matrix out(a.rows(), b.cols());
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    k.gemv_transposed(b.data(), b.rows(), b.cols(), a.row(i).data(), out.row(i).data());
  }
  return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "matrix sum");
  Matrix out = a;
  for (std::size_t i = 0; i < a.values().size(); ++i) out.data()[i] += b.data()[i];
  return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "matrix difference");
  Matrix out = a;
  for (std::size_t i = 0; i < a.values().size(); ++i) out.data()[i] -= b.data()[i];
  return out;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix out = a;
  for (std::size_t i = 0; i < a.values().size(); ++i) out.data()[i] *= s;
  return out;
}

Vector multiply(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.cols()) throw ShapeMismatch("multiply: vector length differs from cols");
  Vector y(a.rows());
  kernels::active().gemv(a.data(), a.rows(), a.cols(), x.data(), y.data());
  return y;
}

Vector multiply_transposed(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.rows()) throw ShapeMismatch("multiply_transposed: vector length differs");
  Vector y(a.cols());
  kernels::active().gemv_transposed(a.data(), a.rows(), a.cols(), x.data(), y.data());
  return y;
}

Matrix gram(const Matrix& a) {
  const std::size_t n = a.cols();
  Matrix out(n, n);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto row = a.row(r);
    for (std::size_t i = 0; i < n; ++i) {
      const double ri = row[i];
      for (std::size_t j = i; j < n; ++j) out(i, j) += ri * row[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) out(i, j) = out(j, i);
  return out;
}

double max_abs_difference(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "max_abs_difference");
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

double norm(std::span<const double> v) { return std::sqrt(kernels::dot(v, v)); }

double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(kernels::squared_distance(a, b));
}

Vector subtract(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("subtract: length mismatch");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Vector add(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("add: length mismatch");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

}  // namespace pgn
