#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "ktk/matrix.hpp"

namespace ktk {

enum class KernelFamily {
  linear,       // x'y
  rbf,          // exp(-gamma * ||x - y||_2^2)
  laplacian,    // exp(-gamma * ||x - y||_1)
  sigmoid,      // tanh(gamma * x'y + c)
  polynomial,   // (gamma * x'y + c)^degree
  cosine,       // x'y / (||x||_2 ||y||_2)
  chi_squared,  // exp(-gamma * sum_j (x_j - y_j)^2 / (x_j + y_j)), coords >= 0
};

KernelFamily kernel_family_from_name(const std::string& name);
const char* kernel_family_name(KernelFamily family);

// Single source of truth for k(x, y). gamma left unset means "auto" and
// resolves to 1/d at evaluation time.
struct KernelSpec {
  KernelFamily family = KernelFamily::rbf;
  std::optional<double> gamma;
  double intercept = 1.0;  // c, sigmoid and polynomial only
  int degree = 3;          // polynomial only

  double resolve_gamma(std::size_t dim) const;
  void validate() const;
};

double eval_kernel(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);

GramMatrix gram(const KernelSpec& spec, const DataMatrix& x);

// Kernel matrix between two datasets, size n1 x n2. Not symmetric in general.
Matrix gram_between(const KernelSpec& spec, const DataMatrix& x1, const DataMatrix& x2);

}  // namespace ktk
