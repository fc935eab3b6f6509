#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ktk {

// Dense column-major matrix. Everything in this library runs at desk scale
// (n up to a few thousand), so storage is a plain full buffer.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  // Columns are contiguous.
  std::span<const double> column(std::size_t j) const {
    return {data_.data() + j * rows_, rows_};
  }
  std::span<double> column(std::size_t j) { return {data_.data() + j * rows_, rows_}; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  double max_abs() const;
  double frobenius_norm() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

// Samples of a dataset, stored as the columns of a d x n matrix.
// Entries must be finite and both dimensions at least one.
class DataMatrix {
 public:
  explicit DataMatrix(Matrix values);

  // CSV convention is rows = samples; this transposes into column layout.
  static DataMatrix from_rows(const Matrix& rows_are_samples);

  std::size_t dim() const { return values_.rows(); }
  std::size_t size() const { return values_.cols(); }

  std::span<const double> sample(std::size_t j) const { return values_.column(j); }
  const Matrix& values() const { return values_; }

 private:
  Matrix values_;
};

// Symmetric n x n kernel matrix. set() mirrors writes so values(i,j) equals
// values(j,i) exactly; the flag records whether the matrix has been
// double-centered.
class GramMatrix {
 public:
  explicit GramMatrix(std::size_t n, bool centered = false)
      : values_(n, n), centered_(centered) {}

  // Accepts a square matrix that is symmetric within tol * max|m| and
  // mirrors the upper triangle so storage is exactly symmetric.
  static GramMatrix from_matrix(Matrix m, bool centered = false, double tol = 1e-10);

  std::size_t order() const { return values_.rows(); }
  bool centered() const { return centered_; }
  void set_centered(bool centered) { centered_ = centered; }

  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
  void set(std::size_t i, std::size_t j, double v) {
    values_(i, j) = v;
    values_(j, i) = v;
  }

  const Matrix& matrix() const { return values_; }

 private:
  Matrix values_;
  bool centered_;
};

// Symmetric distance matrix with zero diagonal and nonnegative entries,
// e.g. pairwise squared Euclidean distances. Validated on construction.
class DistanceMatrix {
 public:
  static DistanceMatrix from_matrix(Matrix m, double tol = 1e-10);

  std::size_t order() const { return values_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
  const Matrix& matrix() const { return values_; }

 private:
  explicit DistanceMatrix(Matrix m) : values_(std::move(m)) {}
  Matrix values_;
};

}  // namespace ktk
