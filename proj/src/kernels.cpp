#include "ktk/kernels.hpp"

#include <cmath>
#include <string>

#include "ktk/errors.hpp"

namespace ktk {
namespace {

// Kahan-compensated accumulator. Distance sums feed exponentials whose
// output lands in PSD checks, so cancellation is kept at bay here.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += x[j] * y[j];
  return s;
}

double squared_l2_distance(std::span<const double> x, std::span<const double> y) {
  CompensatedSum s;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double diff = x[j] - y[j];
    s.add(diff * diff);
  }
  return s.sum;
}

double l1_distance(std::span<const double> x, std::span<const double> y) {
  CompensatedSum s;
  for (std::size_t j = 0; j < x.size(); ++j) s.add(std::abs(x[j] - y[j]));
  return s.sum;
}

double chi_squared_distance(std::span<const double> x, std::span<const double> y) {
  CompensatedSum s;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] < 0.0 || y[j] < 0.0)
      fail(errc::domain_violation,
           "chi_squared kernel requires nonnegative coordinates, got negative at dimension " +
               std::to_string(j));
    const double denom = x[j] + y[j];
    if (denom == 0.0) continue;  // both zero: the summand's limit is 0
    const double diff = x[j] - y[j];
    s.add(diff * diff / denom);
  }
  return s.sum;
}

}  // namespace

KernelFamily kernel_family_from_name(const std::string& name) {
  if (name == "linear") return KernelFamily::linear;
  if (name == "rbf") return KernelFamily::rbf;
  if (name == "laplacian") return KernelFamily::laplacian;
  if (name == "sigmoid") return KernelFamily::sigmoid;
  if (name == "polynomial") return KernelFamily::polynomial;
  if (name == "cosine") return KernelFamily::cosine;
  if (name == "chi_squared") return KernelFamily::chi_squared;
  fail(errc::invalid_spec, "unknown kernel family '" + name + "'");
}

const char* kernel_family_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::linear: return "linear";
    case KernelFamily::rbf: return "rbf";
    case KernelFamily::laplacian: return "laplacian";
    case KernelFamily::sigmoid: return "sigmoid";
    case KernelFamily::polynomial: return "polynomial";
    case KernelFamily::cosine: return "cosine";
    case KernelFamily::chi_squared: return "chi_squared";
  }
  return "?";
}

double KernelSpec::resolve_gamma(std::size_t dim) const {
  if (!gamma.has_value()) return 1.0 / static_cast<double>(dim);
  return *gamma;
}

void KernelSpec::validate() const {
  if (gamma.has_value() && !(*gamma > 0.0))
    fail(errc::invalid_spec, "gamma must be positive, got " + std::to_string(*gamma));
  if (family == KernelFamily::polynomial && degree < 1)
    fail(errc::invalid_spec, "polynomial degree must be >= 1, got " + std::to_string(degree));
}

double eval_kernel(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
  spec.validate();
  if (x.size() != y.size())
    fail(errc::dimension_mismatch, "kernel arguments have dimensions " +
                                       std::to_string(x.size()) + " and " +
                                       std::to_string(y.size()));
  if (x.empty()) fail(errc::dimension_mismatch, "kernel arguments are empty");
  const double g = spec.resolve_gamma(x.size());

  switch (spec.family) {
    case KernelFamily::linear:
      return dot(x, y);
    case KernelFamily::rbf:
      return std::exp(-g * squared_l2_distance(x, y));
    case KernelFamily::laplacian:
      return std::exp(-g * l1_distance(x, y));
    case KernelFamily::sigmoid:
      return std::tanh(g * dot(x, y) + spec.intercept);
    case KernelFamily::polynomial:
      return std::pow(g * dot(x, y) + spec.intercept, static_cast<double>(spec.degree));
    case KernelFamily::cosine: {
      const double nx = std::sqrt(dot(x, x));
      const double ny = std::sqrt(dot(y, y));
      if (nx == 0.0 || ny == 0.0)
        fail(errc::domain_violation, "cosine kernel is undefined for the zero vector");
      return dot(x, y) / (nx * ny);
    }
    case KernelFamily::chi_squared:
      return std::exp(-g * chi_squared_distance(x, y));
  }
  fail(errc::invalid_spec, "unhandled kernel family");
}

GramMatrix gram(const KernelSpec& spec, const DataMatrix& x) {
  const std::size_t n = x.size();
  GramMatrix k(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i) {
      try {
        k.set(i, j, eval_kernel(spec, x.sample(i), x.sample(j)));
      } catch (const Error& e) {
        fail_context(e, " (at sample pair " + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  return k;
}

Matrix gram_between(const KernelSpec& spec, const DataMatrix& x1, const DataMatrix& x2) {
  if (x1.dim() != x2.dim())
    fail(errc::dimension_mismatch, "datasets have dimensions " + std::to_string(x1.dim()) +
                                       " and " + std::to_string(x2.dim()));
  Matrix k(x1.size(), x2.size());
  for (std::size_t j = 0; j < x2.size(); ++j)
    for (std::size_t i = 0; i < x1.size(); ++i) {
      try {
        k(i, j) = eval_kernel(spec, x1.sample(i), x2.sample(j));
      } catch (const Error& e) {
        fail_context(e, " (at sample pair " + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  return k;
}

}  // namespace ktk
