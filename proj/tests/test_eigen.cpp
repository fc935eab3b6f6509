#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "ktk/eigen.hpp"
#include "ktk/errors.hpp"
#include "ktk/kernels.hpp"
#include "test_util.hpp"

using ktk::DataMatrix;
using ktk::EigenSystem;
using ktk::errc;
using ktk::Error;
using ktk::GramMatrix;
using ktk::JacobiOptions;
using ktk::KernelFamily;
using ktk::KernelSpec;
using ktk::Matrix;

namespace {

void check_sign_convention(const Matrix& vectors) {
  for (std::size_t k = 0; k < vectors.cols(); ++k) {
    auto v = vectors.column(k);
    std::size_t lead = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
      if (std::abs(v[i]) > std::abs(v[lead])) lead = i;
    CHECK(v[lead] > 0.0);
  }
}

void check_invariants(const Matrix& s, const EigenSystem& eig) {
  const std::size_t n = s.rows();
  // descending order
  for (std::size_t k = 1; k < n; ++k) CHECK(eig.eigenvalues[k] <= eig.eigenvalues[k - 1]);

  // orthonormal columns
  const Matrix vtv = ktk::transpose(eig.eigenvectors) * eig.eigenvectors;
  CHECK(testutil::max_abs_diff(vtv, Matrix::identity(n)) <= 1e-8);

  // eigen residual per pair
  for (std::size_t k = 0; k < n; ++k) {
    auto v = eig.eigenvectors.column(k);
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double sv = 0.0;
      for (std::size_t j = 0; j < n; ++j) sv += s(i, j) * v[j];
      const double r = sv - eig.eigenvalues[k] * v[i];
      residual += r * r;
    }
    CHECK(std::sqrt(residual) <= 1e-7 * std::max(1.0, std::abs(eig.eigenvalues[k])));
  }

  // trace preservation
  double trace = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    trace += s(i, i);
    sum += eig.eigenvalues[i];
  }
  CHECK(std::abs(trace - sum) <= 1e-8 * static_cast<double>(n) * std::max(1.0, s.max_abs()));

  check_sign_convention(eig.eigenvectors);
}

}  // namespace

TEST_CASE("identity matrix decomposes trivially") {
  const EigenSystem eig = ktk::eigh(Matrix::identity(4));
  for (double v : eig.eigenvalues) CHECK(v == 1.0);
  check_invariants(Matrix::identity(4), eig);
}

TEST_CASE("hand-checked 2x2 decomposition") {
  Matrix s(2, 2);
  s(0, 0) = 2.0;
  s(0, 1) = 1.0;
  s(1, 0) = 1.0;
  s(1, 1) = 2.0;
  const EigenSystem eig = ktk::eigh(s);
  CHECK(eig.eigenvalues[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(eig.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(eig.eigenvectors(0, 0) - inv_sqrt2) <= 1e-12);
  CHECK(std::abs(eig.eigenvectors(1, 0) - inv_sqrt2) <= 1e-12);
  // sign convention: tie broken at the lowest index, so [+, -]
  CHECK(std::abs(eig.eigenvectors(0, 1) - inv_sqrt2) <= 1e-12);
  CHECK(std::abs(eig.eigenvectors(1, 1) + inv_sqrt2) <= 1e-12);
}

TEST_CASE("diagonal matrix is reordered with permuted basis vectors") {
  Matrix s(3, 3);
  s(0, 0) = 5.0;
  s(1, 1) = -2.0;
  s(2, 2) = 7.0;
  const EigenSystem eig = ktk::eigh(s);
  CHECK(eig.eigenvalues[0] == 7.0);
  CHECK(eig.eigenvalues[1] == 5.0);
  CHECK(eig.eigenvalues[2] == -2.0);
  CHECK(eig.eigenvectors(2, 0) == 1.0);
  CHECK(eig.eigenvectors(0, 1) == 1.0);
  CHECK(eig.eigenvectors(1, 2) == 1.0);
}

TEST_CASE("asymmetric input is rejected") {
  Matrix s(2, 2);
  s(0, 1) = 1.0;
  s(1, 0) = 2.0;
  try {
    ktk::eigh(s);
    FAIL("expected NotSymmetric");
  } catch (const Error& e) {
    CHECK(e.code() == errc::not_symmetric);
  }
}

TEST_CASE("sweep exhaustion reports no convergence with the residual") {
  auto rng = testutil::make_rng(3);
  const Matrix s = testutil::random_symmetric(rng, 6);
  JacobiOptions options;
  options.max_sweeps = 0;
  try {
    ktk::eigh(s, options);
    FAIL("expected NoConvergence");
  } catch (const Error& e) {
    CHECK(e.code() == errc::no_convergence);
    CHECK(std::string(e.what()).find("residual") != std::string::npos);
  }
}

TEST_CASE("closed-form agreement for random 2x2 and 3x3 matrices") {
  auto rng = testutil::make_rng(7);
  for (int rep = 0; rep < 300; ++rep) {
    const Matrix s2 = testutil::random_symmetric(rng, 2, 3.0);
    const EigenSystem eig2 = ktk::eigh(s2);
    const auto roots2 = testutil::eig2x2(s2(0, 0), s2(0, 1), s2(1, 1));
    CHECK(std::abs(eig2.eigenvalues[0] - roots2[0]) <= 1e-9 * std::max(1.0, std::abs(roots2[0])));
    CHECK(std::abs(eig2.eigenvalues[1] - roots2[1]) <= 1e-9 * std::max(1.0, std::abs(roots2[1])));

    const Matrix s3 = testutil::random_symmetric(rng, 3, 3.0);
    const EigenSystem eig3 = ktk::eigh(s3);
    const auto roots3 = testutil::eig3x3(s3);
    for (int k = 0; k < 3; ++k)
      CHECK(std::abs(eig3.eigenvalues[k] - roots3[k]) <=
            1e-9 * std::max(1.0, std::abs(roots3[k])));
  }
}

TEST_CASE("invariants and reconstruction up to order 40") {
  auto rng = testutil::make_rng(11);
  for (const std::size_t n : {2, 5, 13, 27, 40}) {
    const Matrix s = testutil::random_symmetric(rng, n, 2.0);
    const EigenSystem eig = ktk::eigh(s);
    check_invariants(s, eig);

    Matrix delta(n, n);
    for (std::size_t k = 0; k < n; ++k) delta(k, k) = eig.eigenvalues[k];
    const Matrix recomposed = eig.eigenvectors * delta * ktk::transpose(eig.eigenvectors);
    CHECK((recomposed - s).frobenius_norm() <= 1e-7 * s.frobenius_norm());
  }
}

TEST_CASE("evd of a linear-kernel gram matches the singular values of the data") {
  auto rng = testutil::make_rng(13);
  KernelSpec spec;
  spec.family = KernelFamily::linear;
  for (int rep = 0; rep < 5; ++rep) {
    const std::size_t d = 3 + static_cast<std::size_t>(rep);
    const DataMatrix x = testutil::random_data(rng, d, 10);
    const GramMatrix k = ktk::gram(spec, x);
    const ktk::EvdFactorization evd = ktk::evd_factorize(k);

    // independent path: the d x d matrix X X' has the same nonzero spectrum
    Matrix outer(d, d);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) {
        double sum = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
          sum += x.values()(a, i) * x.values()(b, i);
        outer(a, b) = sum;
      }
    const EigenSystem small = ktk::eigh(outer);
    for (std::size_t kidx = 0; kidx < d; ++kidx) {
      const double expected = small.eigenvalues[kidx];
      CHECK(std::abs(evd.eig.eigenvalues[kidx] - expected) <=
            1e-7 * std::max(1.0, std::abs(expected)));
      CHECK(evd.singular_values[kidx] ==
            doctest::Approx(std::sqrt(std::max(expected, 0.0))).epsilon(1e-7));
    }
    // the trailing n - d eigenvalues are numerically zero
    for (std::size_t kidx = d; kidx < x.size(); ++kidx)
      CHECK(std::abs(evd.eig.eigenvalues[kidx]) <= 1e-8 * std::max(1.0, evd.eig.eigenvalues[0]));
  }
}

TEST_CASE("rank-one kernel has a single nonzero eigenvalue") {
  std::vector<double> x{1.0, 2.0, -2.0, 0.5};  // one 4-sample 1-D dataset
  Matrix data(1, 4);
  for (std::size_t i = 0; i < 4; ++i) data(0, i) = x[i];
  KernelSpec spec;
  spec.family = KernelFamily::linear;
  const GramMatrix k = ktk::gram(spec, DataMatrix(std::move(data)));
  const ktk::EvdFactorization evd = ktk::evd_factorize(k);
  double norm2 = 0.0;
  for (double v : x) norm2 += v * v;
  CHECK(evd.eig.eigenvalues[0] == doctest::Approx(norm2).epsilon(1e-10));
  for (std::size_t kidx = 1; kidx < 4; ++kidx)
    CHECK(std::abs(evd.eig.eigenvalues[kidx]) <= 1e-9 * norm2);
}
