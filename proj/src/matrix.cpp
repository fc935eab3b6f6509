#include "ktk/matrix.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "ktk/errors.hpp"

namespace ktk {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double Matrix::max_abs() const {
  double best = 0.0;
  for (double v : data_) best = std::max(best, std::abs(v));
  return best;
}

double Matrix::frobenius_norm() const {
  double sum = 0.0;
  for (double v : data_) sum += v * v;
  return std::sqrt(sum);
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    fail(errc::dimension_mismatch, "matrix product " + std::to_string(a.rows()) + "x" +
                                       std::to_string(a.cols()) + " * " + std::to_string(b.rows()) +
                                       "x" + std::to_string(b.cols()));
  Matrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double bkj = b(k, j);
      if (bkj == 0.0) continue;
      for (std::size_t i = 0; i < a.rows(); ++i) c(i, j) += a(i, k) * bkj;
    }
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(errc::dimension_mismatch, "matrix difference of unequal shapes");
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] = a.data()[i] - b.data()[i];
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) t(j, i) = a(i, j);
  return t;
}

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1)
    fail(errc::dimension_mismatch, "data matrix needs at least one sample and one feature");
  for (double v : values_.data())
    if (!std::isfinite(v)) fail(errc::domain_violation, "data matrix contains a non-finite entry");
}

DataMatrix DataMatrix::from_rows(const Matrix& rows_are_samples) {
  return DataMatrix(transpose(rows_are_samples));
}

GramMatrix GramMatrix::from_matrix(Matrix m, bool centered, double tol) {
  if (m.rows() != m.cols())
    fail(errc::shape_mismatch, "kernel matrix must be square, got " + std::to_string(m.rows()) +
                                   "x" + std::to_string(m.cols()));
  const double scale = std::max(1.0, m.max_abs());
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < j; ++i) {
      if (std::abs(m(i, j) - m(j, i)) > tol * scale)
        fail(errc::not_symmetric, "kernel matrix asymmetric at (" + std::to_string(i) + "," +
                                      std::to_string(j) + ")");
      m(j, i) = m(i, j);
    }
  GramMatrix k(m.rows(), centered);
  k.values_ = std::move(m);
  return k;
}

DistanceMatrix DistanceMatrix::from_matrix(Matrix m, double tol) {
  if (m.rows() != m.cols())
    fail(errc::invalid_distance_matrix, "distance matrix must be square");
  const double scale = std::max(1.0, m.max_abs());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (std::abs(m(i, i)) > tol * scale)
      fail(errc::invalid_distance_matrix,
           "nonzero diagonal at index " + std::to_string(i));
    m(i, i) = 0.0;
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - m(j, i)) > tol * scale)
        fail(errc::invalid_distance_matrix, "asymmetric at (" + std::to_string(i) + "," +
                                                std::to_string(j) + ")");
      if (m(i, j) < -tol * scale || m(j, i) < -tol * scale)
        fail(errc::invalid_distance_matrix, "negative distance at (" + std::to_string(i) + "," +
                                                std::to_string(j) + ")");
      m(j, i) = m(i, j);
    }
  }
  return DistanceMatrix(std::move(m));
}

const char* errc_name(errc code) {
  switch (code) {
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::domain_violation: return "DomainViolation";
    case errc::invalid_spec: return "InvalidSpec";
    case errc::invalid_distance_matrix: return "InvalidDistanceMatrix";
    case errc::nonpositive_diagonal: return "NonpositiveDiagonal";
    case errc::not_positive_definite: return "NotPositiveDefinite";
    case errc::not_symmetric: return "NotSymmetric";
    case errc::no_convergence: return "NoConvergence";
    case errc::no_positive_spectrum: return "NoPositiveSpectrum";
    case errc::too_many_landmarks: return "TooManyLandmarks";
    case errc::nonpositive_eigenvalue: return "NonpositiveEigenvalue";
    case errc::index_out_of_range: return "IndexOutOfRange";
    case errc::order_mismatch: return "OrderMismatch";
    case errc::too_few_samples: return "TooFewSamples";
    case errc::shape_mismatch: return "ShapeMismatch";
    case errc::version_mismatch: return "VersionMismatch";
    case errc::corrupt_model: return "CorruptModel";
    case errc::parse_error: return "ParseError";
    case errc::io_error: return "IoError";
  }
  return "Error";
}

}  // namespace ktk
