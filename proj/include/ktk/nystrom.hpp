#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ktk/kernels.hpp"
#include "ktk/matrix.hpp"

namespace ktk {

// On-demand access to kernel entries. The point of the abstraction is that
// building a Nystrom model touches only the landmark rows (m*n entries plus
// the diagonal), never the full n x n matrix.
class KernelProvider {
 public:
  virtual ~KernelProvider() = default;
  virtual std::size_t size() const = 0;
  virtual double entry(std::size_t i, std::size_t j) const = 0;
};

// Evaluates the kernel on stored samples as entries are requested.
class DataKernelProvider : public KernelProvider {
 public:
  DataKernelProvider(KernelSpec spec, DataMatrix x);

  std::size_t size() const override { return x_.size(); }
  double entry(std::size_t i, std::size_t j) const override;

 private:
  KernelSpec spec_;
  DataMatrix x_;
};

// Serves entries of an already materialized kernel matrix (test path).
class MatrixKernelProvider : public KernelProvider {
 public:
  explicit MatrixKernelProvider(const GramMatrix& k) : values_(k.matrix()) {}

  std::size_t size() const override { return values_.rows(); }
  double entry(std::size_t i, std::size_t j) const override { return values_(i, j); }

 private:
  Matrix values_;
};

enum class LandmarkStrategy {
  uniform,       // seeded sampling without replacement
  greedy_pivot,  // pivoted partial Cholesky, largest diagonal residual first
};

LandmarkStrategy landmark_strategy_from_name(const std::string& name);
const char* landmark_strategy_name(LandmarkStrategy strategy);

// Picks m distinct landmark indices. uniform ignores the kernel values and
// only consumes the seed; greedy_pivot ignores the seed and fetches the
// diagonal plus one kernel column per pick. Indices come back in selection
// order.
std::vector<std::size_t> select_landmarks(const KernelProvider& kernel, std::size_t m,
                                          LandmarkStrategy strategy, std::uint64_t seed = 0);

// Landmark blocks of a kernel matrix plus the pseudo-inverse needed to fill
// in the rest. Immutable after build.
class NystromModel {
 public:
  static constexpr double kDefaultPinvThreshold = 1e-10;

  // Fetches A (landmark x landmark) and B (landmark x rest) from the
  // provider and inverts A through its eigendecomposition, zeroing
  // eigenvalues below pinv_threshold * lambda_max(A). Landmark indices may
  // arrive in any order; they are stored sorted.
  static NystromModel build(const KernelProvider& kernel, std::vector<std::size_t> landmarks,
                            double pinv_threshold = kDefaultPinvThreshold);

  std::size_t n() const { return n_; }
  std::size_t m() const { return landmarks_.size(); }
  const std::vector<std::size_t>& landmarks() const { return landmarks_; }
  const std::vector<std::size_t>& rest() const { return rest_; }
  const Matrix& a() const { return a_; }
  const Matrix& b() const { return b_; }
  const Matrix& a_pinv() const { return a_pinv_; }
  double pinv_threshold() const { return pinv_threshold_; }

  // Full n x n approximation [[A, B], [B', B' A_pinv B]] with rows and
  // columns permuted back to original sample order.
  GramMatrix complete() const;

 private:
  NystromModel() = default;

  std::size_t n_ = 0;
  std::vector<std::size_t> landmarks_;  // sorted ascending
  std::vector<std::size_t> rest_;       // complement, ascending
  Matrix a_;
  Matrix b_;
  Matrix a_pinv_;
  double pinv_threshold_ = kDefaultPinvThreshold;
};

// Relative Frobenius error ||K - K_tilde||_F / ||K||_F; exactly 0 for
// identical inputs.
double reconstruction_error(const GramMatrix& k, const GramMatrix& k_tilde);

// Nystrom extension of an eigenfunction known at the samples:
// (1 / (n * lambda_k)) * sum_i k_vec(i) * f_at_samples(i), where
// k_vec(i) = k(x_i, x) for the query point x.
double nystrom_eigenfunction(double lambda_k, std::span<const double> f_at_samples,
                             std::span<const double> k_vec);

}  // namespace ktk
