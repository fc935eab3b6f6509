#pragma once

#include <cstddef>

#include "ktk/matrix.hpp"

namespace ktk {

// The two Mercer conditions, measured rather than asserted. psd holds iff
// min_eigenvalue >= -tolerance_used * max(1, max_eigenvalue).
struct MercerReport {
  bool symmetric = false;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  bool psd = false;
  double tolerance_used = 0.0;
};

// H = I - (1/n) * ones. Exists for tests and small n; the centering
// operations below never materialize it.
Matrix centering_matrix(std::size_t n);

// K_centered = H K H, computed by row/column/grand mean subtraction.
// Row and column sums of the result vanish within tolerance.
GramMatrix double_center(const GramMatrix& k);

// Centers kernel columns between training and out-of-sample points using
// the training means: Kt - (1/n) 1 Kt - (1/n) K 1 + (1/n^2) 1 K 1.
// k is the UNcentered training Gram; kt has one column per test point.
Matrix center_out_of_sample(const GramMatrix& k, const Matrix& kt);

// K = -1/2 H D H. Centered by construction.
GramMatrix kernel_from_distance(const DistanceMatrix& d);

// Pairwise squared Euclidean distances between the columns of x.
DistanceMatrix squared_euclidean_distances(const DataMatrix& x);

// K(i,j) / sqrt(K(i,i) K(j,j)). Diagonal becomes exactly one.
GramMatrix cosine_normalize(const GramMatrix& k);

// Divides by the generalized mean m_t of the two diagonal entries,
// ((a^t + b^t)/2)^(1/t); t = 0 is the geometric-mean limit and reproduces
// cosine_normalize.
GramMatrix generalized_normalize(const GramMatrix& k, double t);

MercerReport validate_mercer(const Matrix& k, double tol = 1e-8);
MercerReport validate_mercer(const GramMatrix& k, double tol = 1e-8);

// Lower-triangular L with L L' = K + jitter * I. Throws NotPositiveDefinite
// with the failing pivot index; jitter is opt-in, never automatic.
Matrix cholesky(const GramMatrix& k, double jitter = 0.0);

// O(n^3) triangle-inequality sweep over a distance matrix, intended as a
// debug assertion only. Entries are treated as distances as stored.
bool satisfies_triangle_inequality(const DistanceMatrix& d, double tol = 1e-10);

}  // namespace ktk
