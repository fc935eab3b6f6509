#include "ktk/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ktk/errors.hpp"

namespace ktk {
namespace {

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  const std::size_t n = a.rows();
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < j; ++i) sum += a(i, j) * a(i, j);
  return std::sqrt(2.0 * sum);
}

// One rotation annihilating a(p,q), accumulating into v.
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 1.0 / (2.0 * theta);  // tan would underflow through theta^2
  } else {
    t = ((theta >= 0.0) ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const double tau = s / (1.0 + c);
  const std::size_t n = a.rows();

  a(p, p) -= t * apq;
  a(q, q) += t * apq;
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    if (r != p && r != q) {
      const double arp = a(r, p);
      const double arq = a(r, q);
      a(r, p) = arp - s * (arq + tau * arp);
      a(p, r) = a(r, p);
      a(r, q) = arq + s * (arp - tau * arq);
      a(q, r) = a(r, q);
    }
    const double vrp = v(r, p);
    const double vrq = v(r, q);
    v(r, p) = vrp - s * (vrq + tau * vrp);
    v(r, q) = vrq + s * (vrp - tau * vrq);
  }
}

void apply_sign_convention(Matrix& v) {
  const std::size_t n = v.rows();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double mag = std::abs(v(i, k));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (v(arg, k) < 0.0)
      for (std::size_t i = 0; i < n; ++i) v(i, k) = -v(i, k);
  }
}

}  // namespace

EigenSystem eigh(const Matrix& s, const JacobiOptions& options) {
  const std::size_t n = s.rows();
  if (n == 0 || s.cols() != n) fail(errc::shape_mismatch, "eigh needs a square nonempty matrix");
  const double scale = s.max_abs();
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < j; ++i)
      if (std::abs(s(i, j) - s(j, i)) > 1e-10 * std::max(1.0, scale))
        fail(errc::not_symmetric, "matrix asymmetric at (" + std::to_string(i) + "," +
                                      std::to_string(j) + ")");

  Matrix a = s;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < j; ++i) a(j, i) = a(i, j);
  Matrix v = Matrix::identity(n);

  const double norm = a.frobenius_norm();
  double off = off_diagonal_norm(a);
  if (norm > 0.0) {
    bool converged = off <= options.tol * norm;
    for (int sweep = 0; sweep < options.max_sweeps && !converged; ++sweep) {
      for (std::size_t p = 0; p + 1 < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q)
          if (a(p, q) != 0.0) rotate(a, v, p, q);
      off = off_diagonal_norm(a);
      converged = off <= options.tol * norm;
    }
    if (!converged)
      fail(errc::no_convergence, "Jacobi sweeps exhausted after " +
                                     std::to_string(options.max_sweeps) +
                                     " sweeps, residual " + std::to_string(off / norm));
  }

  // Sort descending, keeping eigenvector columns aligned.
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&a](std::size_t lhs, std::size_t rhs) { return a(lhs, lhs) > a(rhs, rhs); });

  EigenSystem out;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(perm[k], perm[k]);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, perm[k]);
  }
  apply_sign_convention(out.eigenvectors);
  return out;
}

EvdFactorization evd_factorize(const GramMatrix& k) {
  EvdFactorization out;
  out.eig = eigh(k.matrix());
  out.singular_values.reserve(out.eig.order());
  for (double d : out.eig.eigenvalues)
    out.singular_values.push_back(d > 0.0 ? std::sqrt(d) : 0.0);
  return out;
}

}  // namespace ktk
