#pragma once

#include <cstddef>
#include <vector>

#include "ktk/matrix.hpp"

namespace ktk {

// Eigendecomposition of a symmetric matrix: eigenvalues sorted descending,
// eigenvectors the matching orthonormal columns. Sign convention: the entry
// of largest magnitude in each eigenvector is positive (ties broken by
// lowest index), so embeddings and tests are reproducible.
struct EigenSystem {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;

  std::size_t order() const { return eigenvalues.size(); }
};

struct JacobiOptions {
  double tol = 1e-10;   // stop when off-diagonal Frobenius norm <= tol * ||S||_F
  int max_sweeps = 50;
};

// Cyclic Jacobi rotations. Single-threaded per call for determinism.
// Throws NotSymmetric if S is asymmetric beyond 1e-10 * max|S|, and
// NoConvergence (with the residual in the message) if max_sweeps is hit.
EigenSystem eigh(const Matrix& s, const JacobiOptions& options = {});

// EVD of a kernel matrix. The singular values are sqrt of the nonnegative
// eigenvalues: for a linear kernel they match the singular values of the
// underlying dataset.
struct EvdFactorization {
  EigenSystem eig;
  std::vector<double> singular_values;
};

EvdFactorization evd_factorize(const GramMatrix& k);

}  // namespace ktk
