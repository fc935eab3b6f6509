#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "ktk/kernels.hpp"
#include "ktk/matrix.hpp"

namespace ktk {

// Spectral embedding fitted from the eigenvectors of the double-centered
// training kernel. Immutable after fit; keeps the training data, kernel
// spec, and the training centering means so out-of-sample columns can be
// centered the same way at query time.
class EmbeddingModel {
 public:
  static constexpr int kFormatVersion = 1;

  // k must be the uncentered training Gram of (spec, x). Retains the top
  // p components with eigenvalue above eig_floor = 1e-10 * largest; if
  // fewer exist, p is truncated (see truncated()).
  static EmbeddingModel fit(const GramMatrix& k, const KernelSpec& spec, const DataMatrix& x,
                            std::size_t p);
  // Convenience: builds the Gram itself.
  static EmbeddingModel fit(const KernelSpec& spec, const DataMatrix& x, std::size_t p);

  std::size_t n() const { return x_.size(); }
  std::size_t dim() const { return x_.dim(); }
  std::size_t p() const { return eigenvalues_.size(); }
  std::size_t requested_p() const { return requested_p_; }
  bool truncated() const { return p() < requested_p_; }

  const KernelSpec& spec() const { return spec_; }
  const DataMatrix& training_data() const { return x_; }
  double eigenvalue(std::size_t k) const;
  std::span<const double> eigenvector(std::size_t k) const;

  // Training embedding, p x n: row k is sqrt(eigenvalue_k) * v_k'.
  Matrix embed_training() const;

  // Embedding of one new point from its centered kernel column:
  // y_k = (1 / sqrt(eigenvalue_k)) * sum_i v_ki * k_centered(x_i, x).
  std::vector<double> embed_out_of_sample(std::span<const double> x) const;

  // Eigenfunction of the empirical kernel operator evaluated at x,
  // f_k(x) = (sqrt(n) / eigenvalue_k) * sum_i v_ki * k_centered(x_i, x).
  // At a training point x_i this returns sqrt(n) * v_ki. k is 0-based.
  double eigenfunction_value(std::span<const double> x, std::size_t k) const;

  // Eigenvalue of the operator-side problem, eigenvalue_k / n. Also the
  // feature-space covariance eigenvalue.
  double operator_eigenvalue(std::size_t k) const;

  void save(const std::filesystem::path& path) const;
  static EmbeddingModel load(const std::filesystem::path& path);

 private:
  EmbeddingModel(KernelSpec spec, DataMatrix x);

  // Centered kernel column between training data and one query point.
  std::vector<double> centered_column(std::span<const double> x) const;

  KernelSpec spec_;
  DataMatrix x_;
  std::size_t requested_p_ = 0;
  std::vector<double> eigenvalues_;      // descending, all positive
  Matrix eigenvectors_;                  // n x p, orthonormal columns
  std::vector<double> training_row_means_;  // of the uncentered training Gram
  double training_grand_mean_ = 0.0;
};

}  // namespace ktk
