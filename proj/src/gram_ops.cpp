#include "ktk/gram_ops.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "ktk/eigen.hpp"
#include "ktk/errors.hpp"

namespace ktk {
namespace {

struct CenteringMeans {
  std::vector<double> row;  // row means (= column means, K symmetric)
  double grand = 0.0;
};

CenteringMeans means_of(const GramMatrix& k) {
  const std::size_t n = k.order();
  CenteringMeans m;
  m.row.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += k(i, j);
    m.row[i] = sum / static_cast<double>(n);
  }
  for (double r : m.row) m.grand += r;
  m.grand /= static_cast<double>(n);
  return m;
}

}  // namespace

Matrix centering_matrix(std::size_t n) {
  Matrix h(n, n, -1.0 / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) h(i, i) += 1.0;
  return h;
}

GramMatrix double_center(const GramMatrix& k) {
  const std::size_t n = k.order();
  const CenteringMeans m = means_of(k);
  GramMatrix out(n, true);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i)
      out.set(i, j, k(i, j) - m.row[i] - m.row[j] + m.grand);
  return out;
}

Matrix center_out_of_sample(const GramMatrix& k, const Matrix& kt) {
  const std::size_t n = k.order();
  if (kt.rows() != n)
    fail(errc::dimension_mismatch, "out-of-sample kernel has " + std::to_string(kt.rows()) +
                                       " rows, training Gram has order " + std::to_string(n));
  const CenteringMeans m = means_of(k);
  Matrix out(n, kt.cols());
  for (std::size_t j = 0; j < kt.cols(); ++j) {
    double col_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) col_mean += kt(i, j);
    col_mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out(i, j) = kt(i, j) - col_mean - m.row[i] + m.grand;
  }
  return out;
}

GramMatrix kernel_from_distance(const DistanceMatrix& d) {
  const std::size_t n = d.order();
  GramMatrix as_gram = GramMatrix::from_matrix(d.matrix());
  const CenteringMeans m = means_of(as_gram);
  GramMatrix out(n, true);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i)
      out.set(i, j, -0.5 * (d(i, j) - m.row[i] - m.row[j] + m.grand));
  return out;
}

DistanceMatrix squared_euclidean_distances(const DataMatrix& x) {
  const std::size_t n = x.size();
  Matrix d(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < j; ++i) {
      double sum = 0.0;
      for (std::size_t f = 0; f < x.dim(); ++f) {
        const double diff = x.sample(i)[f] - x.sample(j)[f];
        sum += diff * diff;
      }
      d(i, j) = sum;
      d(j, i) = sum;
    }
  return DistanceMatrix::from_matrix(std::move(d));
}

GramMatrix cosine_normalize(const GramMatrix& k) {
  const std::size_t n = k.order();
  for (std::size_t i = 0; i < n; ++i)
    if (!(k(i, i) > 0.0))
      fail(errc::nonpositive_diagonal, "diagonal entry " + std::to_string(i) + " is " +
                                           std::to_string(k(i, i)));
  GramMatrix out(n, k.centered());
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i)
      out.set(i, j, k(i, j) / std::sqrt(k(i, i) * k(j, j)));
    out.set(j, j, 1.0);
  }
  return out;
}

GramMatrix generalized_normalize(const GramMatrix& k, double t) {
  const std::size_t n = k.order();
  for (std::size_t i = 0; i < n; ++i)
    if (!(k(i, i) > 0.0))
      fail(errc::nonpositive_diagonal, "diagonal entry " + std::to_string(i) + " is " +
                                           std::to_string(k(i, i)));
  if (t == 0.0) return cosine_normalize(k);  // stated limit; 1/t is singular here
  GramMatrix out(n, k.centered());
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const double mt =
          std::pow(0.5 * (std::pow(k(i, i), t) + std::pow(k(j, j), t)), 1.0 / t);
      out.set(i, j, k(i, j) / mt);
    }
    out.set(j, j, 1.0);
  }
  return out;
}

MercerReport validate_mercer(const Matrix& k, double tol) {
  MercerReport report;
  report.tolerance_used = tol;
  if (k.rows() != k.cols()) fail(errc::shape_mismatch, "kernel matrix must be square");
  const std::size_t n = k.rows();
  double asym = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < j; ++i) asym = std::max(asym, std::abs(k(i, j) - k(j, i)));
  report.symmetric = asym <= tol;

  Matrix sym(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) sym(i, j) = 0.5 * (k(i, j) + k(j, i));
  const EigenSystem eig = eigh(sym);
  report.max_eigenvalue = eig.eigenvalues.front();
  report.min_eigenvalue = eig.eigenvalues.back();
  report.psd = report.min_eigenvalue >= -tol * std::max(1.0, report.max_eigenvalue);
  return report;
}

MercerReport validate_mercer(const GramMatrix& k, double tol) {
  return validate_mercer(k.matrix(), tol);
}

Matrix cholesky(const GramMatrix& k, double jitter) {
  if (jitter < 0.0) fail(errc::invalid_spec, "jitter must be nonnegative");
  const std::size_t n = k.order();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = k(j, j) + jitter;
    for (std::size_t t = 0; t < j; ++t) pivot -= l(j, t) * l(j, t);
    if (!(pivot > 0.0))
      fail(errc::not_positive_definite,
           "pivot " + std::to_string(j) + " is " + std::to_string(pivot));
    l(j, j) = std::sqrt(pivot);
    for (std::size_t i = j + 1; i < n; ++i) {
      double sum = k(i, j);
      for (std::size_t t = 0; t < j; ++t) sum -= l(i, t) * l(j, t);
      l(i, j) = sum / l(j, j);
    }
  }
  return l;
}

bool satisfies_triangle_inequality(const DistanceMatrix& d, double tol) {
  const std::size_t n = d.order();
  const double scale = std::max(1.0, d.matrix().max_abs());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t via = 0; via < n; ++via)
        if (d(i, j) > d(i, via) + d(via, j) + tol * scale) return false;
  return true;
}

}  // namespace ktk
