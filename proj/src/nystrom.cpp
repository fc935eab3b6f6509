#include "ktk/nystrom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <utility>

#include "ktk/eigen.hpp"
#include "ktk/errors.hpp"

namespace ktk {

DataKernelProvider::DataKernelProvider(KernelSpec spec, DataMatrix x)
    : spec_(std::move(spec)), x_(std::move(x)) {
  spec_.validate();
}

double DataKernelProvider::entry(std::size_t i, std::size_t j) const {
  if (i >= x_.size() || j >= x_.size())
    fail(errc::index_out_of_range, "kernel entry (" + std::to_string(i) + "," +
                                       std::to_string(j) + ") of order " +
                                       std::to_string(x_.size()));
  return eval_kernel(spec_, x_.sample(i), x_.sample(j));
}

LandmarkStrategy landmark_strategy_from_name(const std::string& name) {
  if (name == "uniform") return LandmarkStrategy::uniform;
  if (name == "greedy_pivot") return LandmarkStrategy::greedy_pivot;
  fail(errc::invalid_spec, "unknown landmark strategy '" + name + "'");
}

const char* landmark_strategy_name(LandmarkStrategy strategy) {
  switch (strategy) {
    case LandmarkStrategy::uniform: return "uniform";
    case LandmarkStrategy::greedy_pivot: return "greedy_pivot";
  }
  return "?";
}

namespace {

// Partial Fisher-Yates on raw generator words. Avoids
// std::uniform_int_distribution, whose output differs across standard
// library implementations; modulo bias is irrelevant here.
std::vector<std::size_t> uniform_landmarks(std::size_t n, std::size_t m, std::uint64_t seed) {
  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
    std::swap(indices[i], indices[j]);
  }
  indices.resize(m);
  return indices;
}

// Pivoted partial Cholesky: repeatedly take the index with the largest
// diagonal residual, then downdate the residual with the new Cholesky
// column. Touches the diagonal plus one kernel column per pick. When the
// residual is exhausted (kernel rank below m) remaining picks still consume
// one index each but no longer update anything.
std::vector<std::size_t> greedy_landmarks(const KernelProvider& kernel, std::size_t m) {
  const std::size_t n = kernel.size();
  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) residual[i] = kernel.entry(i, i);
  std::vector<bool> chosen_mask(n, false);

  std::vector<std::size_t> chosen;
  chosen.reserve(m);
  Matrix g(n, m);  // Cholesky columns of the picks so far
  for (std::size_t t = 0; t < m; ++t) {
    std::size_t pivot = n;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (chosen_mask[i]) continue;
      if (residual[i] > best) {
        best = residual[i];
        pivot = i;
      }
    }
    chosen_mask[pivot] = true;
    chosen.push_back(pivot);
    if (!(best > 0.0)) continue;  // nothing left to factor

    const double root = std::sqrt(best);
    auto col = g.column(t);
    for (std::size_t i = 0; i < n; ++i) {
      if (chosen_mask[i] && i != pivot) continue;
      double v = kernel.entry(i, pivot);
      for (std::size_t s = 0; s < t; ++s) v -= g(i, s) * g(pivot, s);
      col[i] = v / root;
      residual[i] -= col[i] * col[i];
    }
    residual[pivot] = 0.0;
  }
  return chosen;
}

}  // namespace

std::vector<std::size_t> select_landmarks(const KernelProvider& kernel, std::size_t m,
                                          LandmarkStrategy strategy, std::uint64_t seed) {
  const std::size_t n = kernel.size();
  if (m < 1) fail(errc::invalid_spec, "landmark count must be at least 1");
  if (m > n)
    fail(errc::too_many_landmarks,
         std::to_string(m) + " landmarks requested from " + std::to_string(n) + " samples");
  if (strategy == LandmarkStrategy::uniform) return uniform_landmarks(n, m, seed);
  return greedy_landmarks(kernel, m);
}

NystromModel NystromModel::build(const KernelProvider& kernel, std::vector<std::size_t> landmarks,
                                 double pinv_threshold) {
  const std::size_t n = kernel.size();
  const std::size_t m = landmarks.size();
  if (m < 1) fail(errc::invalid_spec, "landmark set is empty");
  if (m > n)
    fail(errc::too_many_landmarks,
         std::to_string(m) + " landmarks for order " + std::to_string(n));
  if (!(pinv_threshold >= 0.0)) fail(errc::invalid_spec, "pinv threshold must be nonnegative");

  std::sort(landmarks.begin(), landmarks.end());
  for (std::size_t a = 0; a < m; ++a) {
    if (landmarks[a] >= n)
      fail(errc::index_out_of_range,
           "landmark index " + std::to_string(landmarks[a]) + " of order " + std::to_string(n));
    if (a > 0 && landmarks[a] == landmarks[a - 1])
      fail(errc::invalid_spec, "duplicate landmark index " + std::to_string(landmarks[a]));
  }

  NystromModel model;
  model.n_ = n;
  model.landmarks_ = std::move(landmarks);
  model.pinv_threshold_ = pinv_threshold;
  model.rest_.reserve(n - m);
  {
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (next < m && model.landmarks_[next] == i)
        ++next;
      else
        model.rest_.push_back(i);
    }
  }

  model.a_ = Matrix(m, m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a; b < m; ++b) {
      const double v = kernel.entry(model.landmarks_[a], model.landmarks_[b]);
      model.a_(a, b) = v;
      model.a_(b, a) = v;
    }

  model.b_ = Matrix(m, n - m);
  for (std::size_t b = 0; b < n - m; ++b)
    for (std::size_t a = 0; a < m; ++a)
      model.b_(a, b) = kernel.entry(model.landmarks_[a], model.rest_[b]);

  // Eigenvalue-thresholded pseudo-inverse of A.
  const EigenSystem eig = eigh(model.a_);
  const double lambda_max = eig.eigenvalues.front();
  const double cutoff = pinv_threshold * lambda_max;
  model.a_pinv_ = Matrix(m, m);
  if (lambda_max > 0.0) {
    std::vector<double> inv(m, 0.0);
    for (std::size_t k = 0; k < m; ++k)
      if (eig.eigenvalues[k] >= cutoff && eig.eigenvalues[k] > 0.0)
        inv[k] = 1.0 / eig.eigenvalues[k];
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a; b < m; ++b) {
        double sum = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
          if (inv[k] == 0.0) continue;
          sum += eig.eigenvectors(a, k) * inv[k] * eig.eigenvectors(b, k);
        }
        model.a_pinv_(a, b) = sum;
        model.a_pinv_(b, a) = sum;
      }
  }
  return model;
}

GramMatrix NystromModel::complete() const {
  const std::size_t m = this->m();
  const std::size_t r = n_ - m;
  GramMatrix out(n_);

  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a; b < m; ++b) out.set(landmarks_[a], landmarks_[b], a_(a, b));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < r; ++b) out.set(landmarks_[a], rest_[b], b_(a, b));

  if (r > 0) {
    const Matrix t = a_pinv_ * b_;  // m x r
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = a; b < r; ++b) {
        double sum = 0.0;
        for (std::size_t s = 0; s < m; ++s) sum += b_(s, a) * t(s, b);
        out.set(rest_[a], rest_[b], sum);
      }
  }
  return out;
}

double reconstruction_error(const GramMatrix& k, const GramMatrix& k_tilde) {
  if (k.order() != k_tilde.order())
    fail(errc::dimension_mismatch, "orders " + std::to_string(k.order()) + " and " +
                                       std::to_string(k_tilde.order()) + " differ");
  const Matrix diff = k.matrix() - k_tilde.matrix();
  const double diff_norm = diff.frobenius_norm();
  if (diff_norm == 0.0) return 0.0;
  return diff_norm / k.matrix().frobenius_norm();
}

double nystrom_eigenfunction(double lambda_k, std::span<const double> f_at_samples,
                             std::span<const double> k_vec) {
  if (!(lambda_k > 0.0))
    fail(errc::nonpositive_eigenvalue, "lambda_k = " + std::to_string(lambda_k));
  if (f_at_samples.size() != k_vec.size())
    fail(errc::dimension_mismatch, "eigenfunction samples and kernel column lengths differ");
  const std::size_t n = f_at_samples.size();
  if (n == 0) fail(errc::too_few_samples, "empty sample set");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += k_vec[i] * f_at_samples[i];
  return sum / (static_cast<double>(n) * lambda_k);
}

}  // namespace ktk
