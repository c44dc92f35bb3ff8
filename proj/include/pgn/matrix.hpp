#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace pgn {

using Vector = std::vector<double>;

// Dense row-major matrix of finite doubles.
class Matrix {
 public:
  Matrix() = default;

  // Zero-filled rows x cols.
  Matrix(std::size_t rows, std::size_t cols);

  // Takes row-major storage; throws InvalidArgument on size mismatch or a
  // non-finite entry.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix identity(std::size_t n);
  // rows x cols with d on the leading diagonal.
  static Matrix diagonal(std::size_t rows, std::size_t cols, std::span<const double> d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  const double* data() const { return data_.data(); }
  double* data() { return data_.data(); }
  std::span<const double> values() const { return data_; }

  Matrix transposed() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

// A x and A^T x.
Vector multiply(const Matrix& a, std::span<const double> x);
Vector multiply_transposed(const Matrix& a, std::span<const double> x);

// A^T A.
Matrix gram(const Matrix& a);

// Largest absolute entry difference; shapes must match.
double max_abs_difference(const Matrix& a, const Matrix& b);

double norm(std::span<const double> v);
double distance(std::span<const double> a, std::span<const double> b);
Vector subtract(std::span<const double> a, std::span<const double> b);
Vector add(std::span<const double> a, std::span<const double> b);

}  // namespace pgn
