// End-to-end acceptance checks for the toolkit. Each check prints one
// PASS/FAIL line; the process exits nonzero if any of them fail. Tolerances
// are pinned here on purpose -- loosen them only with a good reason.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ktk/csv.hpp"
#include "ktk/dependence.hpp"
#include "ktk/eigen.hpp"
#include "ktk/embedding.hpp"
#include "ktk/gram_ops.hpp"
#include "ktk/kernels.hpp"
#include "ktk/matrix.hpp"
#include "ktk/nystrom.hpp"
#include "test_util.hpp"

using namespace ktk;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

KernelSpec make_spec(KernelFamily family) {
  KernelSpec spec;
  spec.family = family;
  return spec;
}

KernelSpec rbf_spec(double gamma) {
  KernelSpec spec;
  spec.family = KernelFamily::rbf;
  spec.gamma = gamma;
  return spec;
}

// ---------------------------------------------------------------- criterion 1

bool kernels_are_mercer(std::string& detail) {
  const auto start = Clock::now();
  auto rng = testutil::make_rng(9001);
  const KernelFamily families[] = {KernelFamily::linear,     KernelFamily::rbf,
                                   KernelFamily::laplacian,  KernelFamily::polynomial,
                                   KernelFamily::cosine,     KernelFamily::chi_squared};
  for (int trial = 0; trial < 200; ++trial) {
    const KernelFamily family = families[trial % 6];
    const std::size_t n = 2 + rng() % 29;
    const std::size_t d = 1 + rng() % 10;
    const bool nonnegative = family == KernelFamily::chi_squared;
    const DataMatrix x = nonnegative ? testutil::random_data(rng, d, n, 0.05, 2.0)
                                     : testutil::random_data(rng, d, n, -1.0, 1.0);
    const GramMatrix k = gram(make_spec(family), x);
    const MercerReport report = validate_mercer(k);
    const bool psd = report.min_eigenvalue >= -1e-8 * report.max_eigenvalue;
    if (!report.symmetric || !report.psd || !psd) {
      detail = "family " + std::string(kernel_family_name(family)) + ", n=" + std::to_string(n) +
               ": min eigenvalue " + std::to_string(report.min_eigenvalue);
      return false;
    }
  }
  const double elapsed = seconds_since(start);
  if (elapsed > 30.0) {
    detail = "took " + std::to_string(elapsed) + "s, budget is 30s";
    return false;
  }
  return true;
}

// ---------------------------------------------------------------- criterion 2

bool centering_behaves(std::string& detail) {
  auto rng = testutil::make_rng(9002);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5 + rng() % 46;  // up to 50
    const std::size_t d = 1 + rng() % 4;
    const DataMatrix x = testutil::random_data(rng, d, n, -2.0, 2.0);
    const GramMatrix k = gram(rbf_spec(0.5), x);
    const GramMatrix centered = double_center(k);

    const double scale = static_cast<double>(n) * std::max(1.0, k.matrix().max_abs());
    for (std::size_t i = 0; i < n; ++i) {
      double row_sum = 0.0, col_sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        row_sum += centered(i, j);
        col_sum += centered(j, i);
      }
      if (std::abs(row_sum) > 1e-9 * scale || std::abs(col_sum) > 1e-9 * scale) {
        detail = "n=" + std::to_string(n) + ": residual mean " +
                 std::to_string(std::max(std::abs(row_sum), std::abs(col_sum)));
        return false;
      }
    }

    const GramMatrix twice = double_center(centered);
    if (testutil::max_abs_diff(twice.matrix(), centered.matrix()) > 1e-10) {
      detail = "centering is not idempotent at n=" + std::to_string(n);
      return false;
    }

    const GramMatrix via_distance = kernel_from_distance(squared_euclidean_distances(x));
    const GramMatrix via_gram = double_center(gram(make_spec(KernelFamily::linear), x));
    const double rel = testutil::rel_fro_diff(via_distance.matrix(), via_gram.matrix());
    if (rel > 1e-9) {
      detail = "distance route differs by " + std::to_string(rel) + " at n=" + std::to_string(n);
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- criterion 3

bool eigensolver_is_accurate(std::string& detail) {
  auto rng = testutil::make_rng(9003);
  for (int trial = 0; trial < 1000; ++trial) {
    if (trial % 2 == 0) {
      const double a = testutil::runif(rng, -3.0, 3.0);
      const double b = testutil::runif(rng, -3.0, 3.0);
      const double c = testutil::runif(rng, -3.0, 3.0);
      Matrix s(2, 2);
      s(0, 0) = a;
      s(0, 1) = s(1, 0) = b;
      s(1, 1) = c;
      const auto expected = testutil::eig2x2(a, b, c);
      const EigenSystem eig = eigh(s);
      for (int i = 0; i < 2; ++i)
        if (std::abs(eig.eigenvalues[i] - expected[i]) > 1e-9 * std::max(1.0, std::abs(expected[i]))) {
          detail = "2x2 root mismatch at trial " + std::to_string(trial);
          return false;
        }
    } else {
      const Matrix s = testutil::random_symmetric(rng, 3);
      const auto expected = testutil::eig3x3(s);
      const EigenSystem eig = eigh(s);
      for (int i = 0; i < 3; ++i)
        if (std::abs(eig.eigenvalues[i] - expected[i]) > 1e-9 * std::max(1.0, std::abs(expected[i]))) {
          detail = "3x3 root mismatch at trial " + std::to_string(trial);
          return false;
        }
    }
  }

  for (const std::size_t n : {5, 10, 20, 40}) {
    for (int rep = 0; rep < 3; ++rep) {
      const Matrix s = testutil::random_symmetric(rng, n, 2.0);
      const EigenSystem eig = eigh(s);
      Matrix reconstructed(n, n);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
          double sum = 0.0;
          for (std::size_t k = 0; k < n; ++k)
            sum += eig.eigenvectors(a, k) * eig.eigenvalues[k] * eig.eigenvectors(b, k);
          reconstructed(a, b) = sum;
        }
      const double rel = testutil::rel_fro_diff(reconstructed, s);
      if (rel > 1e-7) {
        detail = "reconstruction off by " + std::to_string(rel) + " at n=" + std::to_string(n);
        return false;
      }
      const Matrix vtv = transpose(eig.eigenvectors) * eig.eigenvectors;
      if (testutil::max_abs_diff(vtv, Matrix::identity(n)) > 1e-8) {
        detail = "eigenvectors drift from orthonormal at n=" + std::to_string(n);
        return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------- criterion 4

bool gram_spectrum_matches_singular_values(std::string& detail) {
  auto rng = testutil::make_rng(9004);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 1 + rng() % 6;
    const std::size_t n = d + 2 + rng() % 10;
    const DataMatrix x = testutil::random_data(rng, d, n, -1.5, 1.5);
    const GramMatrix k = gram(make_spec(KernelFamily::linear), x);
    const EigenSystem big = eigh(k.matrix());

    // same spectrum through the d x d outer-product matrix
    Matrix outer(d, d);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) sum += x.values()(a, j) * x.values()(b, j);
        outer(a, b) = sum;
      }
    const EigenSystem small = eigh(outer);

    const double top = std::max(1.0, small.eigenvalues[0]);
    for (std::size_t i = 0; i < d; ++i)
      if (std::abs(big.eigenvalues[i] - small.eigenvalues[i]) > 1e-7 * top) {
        detail = "leading eigenvalue " + std::to_string(i) + " differs at trial " +
                 std::to_string(trial);
        return false;
      }
    for (std::size_t i = d; i < n; ++i)
      if (std::abs(big.eigenvalues[i]) > 1e-8 * top) {
        detail = "trailing eigenvalue not numerically zero at trial " + std::to_string(trial);
        return false;
      }
  }
  return true;
}

// ---------------------------------------------------------------- criterion 5

bool out_of_sample_matches_training(std::string& detail) {
  auto rng = testutil::make_rng(9005);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 4 + rng() % 9;
    const std::size_t d = 1 + rng() % 3;
    const DataMatrix x = testutil::random_data(rng, d, n, -1.0, 1.0);
    const KernelSpec spec =
        trial % 2 == 0 ? rbf_spec(0.8) : make_spec(KernelFamily::linear);

    const GramMatrix k = gram(spec, x);
    const EigenSystem probe = eigh(double_center(k).matrix());
    std::size_t p = 0;
    while (p < n && p < 8 && probe.eigenvalues[p] >= 1e-5 * probe.eigenvalues[0]) ++p;
    if (p == 0) continue;  // degenerate draw, nothing to embed

    const EmbeddingModel model = EmbeddingModel::fit(k, spec, x, p);
    const Matrix training = model.embed_training();
    const double root_n = std::sqrt(static_cast<double>(n));

    for (std::size_t i = 0; i < n; ++i) {
      const std::vector<double> oos = model.embed_out_of_sample(x.sample(i));
      for (std::size_t kidx = 0; kidx < model.p(); ++kidx) {
        const double want = training(kidx, i);
        if (std::abs(oos[kidx] - want) > 1e-6 * std::max(1.0, std::abs(want))) {
          detail = "component " + std::to_string(kidx) + " off at sample " + std::to_string(i) +
                   ", trial " + std::to_string(trial);
          return false;
        }
        const double f = model.eigenfunction_value(x.sample(i), kidx);
        const double expected_f = root_n * model.eigenvector(kidx)[i];
        if (std::abs(f - expected_f) > 1e-6 * std::max(1.0, std::abs(expected_f))) {
          detail = "eigenfunction value off at sample " + std::to_string(i) + ", trial " +
                   std::to_string(trial);
          return false;
        }
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------- criterion 6

bool landmark_completion_behaves(std::string& detail) {
  const auto start = Clock::now();
  auto rng = testutil::make_rng(9006);

  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t r = 1 + rng() % 5;
    const std::size_t n = 8 + rng() % 13;
    const DataMatrix x = testutil::random_data(rng, r, n, -1.0, 1.0);
    const GramMatrix k = gram(make_spec(KernelFamily::linear), x);
    const MatrixKernelProvider provider(k);

    const auto landmarks = select_landmarks(provider, r, LandmarkStrategy::greedy_pivot);
    const double err =
        reconstruction_error(k, NystromModel::build(provider, landmarks).complete());
    if (err > 1e-7) {
      detail = "rank " + std::to_string(r) + " kernel not recovered from " + std::to_string(r) +
               " landmarks, error " + std::to_string(err);
      return false;
    }
    if (r >= 2) {
      const auto fewer = select_landmarks(provider, r - 1, LandmarkStrategy::greedy_pivot);
      const double short_err =
          reconstruction_error(k, NystromModel::build(provider, fewer).complete());
      if (short_err <= 1e-4) {
        detail = "under-provisioned landmarks reported error " + std::to_string(short_err);
        return false;
      }
    }
  }

  // medians over seeds must not get worse as landmarks are added
  const std::size_t n = 200;
  const DataMatrix x = testutil::random_data(rng, 2, n, -2.0, 2.0);
  const GramMatrix k = gram(rbf_spec(0.5), x);
  const MatrixKernelProvider provider(k);
  double previous = std::numeric_limits<double>::infinity();
  for (const std::size_t m : {5, 10, 20, 40, 80}) {
    std::vector<double> errors;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto landmarks = select_landmarks(provider, m, LandmarkStrategy::uniform, seed);
      errors.push_back(
          reconstruction_error(k, NystromModel::build(provider, landmarks).complete()));
    }
    std::sort(errors.begin(), errors.end());
    const double median = 0.5 * (errors[4] + errors[5]);
    if (median > previous + 1e-12) {
      detail = "median error rose from " + std::to_string(previous) + " to " +
               std::to_string(median) + " at m=" + std::to_string(m);
      return false;
    }
    previous = median;
  }

  const double elapsed = seconds_since(start);
  if (elapsed > 60.0) {
    detail = "took " + std::to_string(elapsed) + "s, budget is 60s";
    return false;
  }
  return true;
}

// ---------------------------------------------------------------- criterion 7

double hsic_bruteforce(const GramMatrix& kx, const GramMatrix& ky) {
  const std::size_t n = kx.order();
  const double dn = static_cast<double>(n);
  double pairwise = 0.0, chained = 0.0, sum_x = 0.0, sum_y = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      pairwise += kx(i, j) * ky(i, j);
      sum_x += kx(i, j);
      sum_y += ky(i, j);
      for (std::size_t l = 0; l < n; ++l) chained += kx(i, j) * ky(i, l);
    }
  const double trace = pairwise - 2.0 / dn * chained + sum_x * sum_y / (dn * dn);
  return trace / ((dn - 1.0) * (dn - 1.0));
}

bool dependence_statistics_behave(std::string& detail) {
  auto rng = testutil::make_rng(9007);

  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng() % 5;
    const GramMatrix kx = testutil::random_psd_gram(rng, n);
    const GramMatrix ky = testutil::random_psd_gram(rng, n);

    const double fast = hsic(kx, ky);
    const double slow = hsic_bruteforce(kx, ky);
    if (std::abs(fast - slow) > 1e-10 * std::max(1.0, std::abs(slow))) {
      detail = "independence statistic differs from the four-index form at n=" +
               std::to_string(n);
      return false;
    }
    if (fast != hsic(ky, kx)) {
      detail = "independence statistic is not symmetric in its arguments";
      return false;
    }
    Matrix scaled_values = kx.matrix();
    for (double& v : scaled_values.data()) v *= 4.0;
    if (hsic(GramMatrix::from_matrix(scaled_values), ky) != 4.0 * fast) {
      detail = "independence statistic does not scale exactly with the kernel";
      return false;
    }

    Matrix ones(n, n);
    for (double& v : ones.data()) v = 1.0;
    if (std::abs(hsic(kx, GramMatrix::from_matrix(ones))) > 1e-12) {
      detail = "constant kernel should give a vanishing statistic";
      return false;
    }
  }

  // discrepancy: identical samples, then an isolated pair with a closed form
  const DataMatrix x = testutil::random_data(rng, 3, 6);
  const KernelSpec spec = rbf_spec(0.5);
  const Matrix kxx = gram(spec, x).matrix();
  if (mmd2(kxx, kxx, gram_between(spec, x, x)) != 0.0) {
    detail = "identical samples should give a discrepancy of exactly zero";
    return false;
  }

  Matrix xv(1, 1), yv(1, 1);
  xv(0, 0) = 0.5;
  yv(0, 0) = 2.0;
  const DataMatrix px(xv), py(yv);
  const double gamma = 0.8;
  const KernelSpec pair_spec = rbf_spec(gamma);
  const double stat = mmd2(gram(pair_spec, px).matrix(), gram(pair_spec, py).matrix(),
                           gram_between(pair_spec, px, py));
  const double expected = 2.0 - 2.0 * std::exp(-gamma * 1.5 * 1.5);
  if (std::abs(stat - expected) > 1e-12) {
    detail = "two-point discrepancy misses the closed form by " +
             std::to_string(std::abs(stat - expected));
    return false;
  }
  return true;
}

// ---------------------------------------------------------------- criterion 8

bool normalization_behaves(std::string& detail) {
  auto rng = testutil::make_rng(9008);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng() % 15;
    const GramMatrix k = testutil::random_psd_gram(rng, n);
    const GramMatrix cosine = cosine_normalize(k);
    const GramMatrix geometric = generalized_normalize(k, 0.0);
    if (testutil::max_abs_diff(cosine.matrix(), geometric.matrix()) > 1e-12) {
      detail = "t=0 normalization does not reduce to the cosine form at n=" + std::to_string(n);
      return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (cosine(i, i) != 1.0) {
        detail = "normalized diagonal is not exactly one at n=" + std::to_string(n);
        return false;
      }
      for (std::size_t j = 0; j < n; ++j)
        if (std::abs(cosine(i, j)) > 1.0 + 1e-10) {
          detail = "normalized entry above one at n=" + std::to_string(n);
          return false;
        }
    }
  }
  return true;
}

// ---------------------------------------------------------------- criterion 9

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("ktk-acceptance-" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(KTK_CLI_PATH) + " " + args;
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool cli_is_deterministic_and_diagnosable(std::string& detail) {
  TempDir dir;
  {
    std::ofstream data(dir.file("data.csv"));
    data << "0.1,0.2\n0.4,-0.3\n-0.5,0.6\n0.9,0.1\n-0.2,-0.8\n0.3,0.7\n";
  }

  const std::string gram_cmd =
      "gram --kernel rbf --gamma 0.5 " + dir.file("data.csv") + " -o " + dir.file("k.csv");
  if (run_cli(gram_cmd) != 0) {
    detail = "gram run failed";
    return false;
  }
  const std::string first = read_file(dir.file("k.csv"));
  const std::string first_meta = read_file(dir.file("k.csv.meta.json"));
  if (run_cli(gram_cmd) != 0 || read_file(dir.file("k.csv")) != first ||
      read_file(dir.file("k.csv.meta.json")) != first_meta) {
    detail = "reruns are not byte-identical";
    return false;
  }

  if (run_cli("embed --kernel rbf --gamma 0.5 -p 2 " + dir.file("data.csv") + " -o " +
              dir.file("train.csv") + " --save-model " + dir.file("model.json")) != 0 ||
      run_cli("oos-embed --model " + dir.file("model.json") + " " + dir.file("data.csv") +
              " -o " + dir.file("oos.csv")) != 0) {
    detail = "embed or oos-embed run failed";
    return false;
  }
  const Matrix train = read_csv(dir.file("train.csv")).values;
  const Matrix oos = read_csv(dir.file("oos.csv")).values;
  if (train.rows() != oos.rows() || train.cols() != oos.cols() ||
      testutil::max_abs_diff(train, oos) > 1e-6) {
    detail = "saved model does not reproduce the training embedding";
    return false;
  }

  {
    std::ofstream bad(dir.file("bad.csv"));
    bad << "1.0,2.0\n3.0,oops\n";
  }
  if (run_cli("gram --kernel rbf " + dir.file("bad.csv") + " -o " + dir.file("junk.csv") +
              " 2> " + dir.file("err.txt")) != 2) {
    detail = "malformed CSV should exit with the data error code";
    return false;
  }
  const std::string err = read_file(dir.file("err.txt"));
  if (err.find("row") == std::string::npos || err.find("column") == std::string::npos) {
    detail = "CSV error message does not locate the bad cell";
    return false;
  }
  return true;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    bool (*check)(std::string&);
  };
  const Criterion criteria[] = {
      {"kernel matrices are symmetric and positive semidefinite", kernels_are_mercer},
      {"double centering zeroes the means and matches the distance route", centering_behaves},
      {"eigensolver agrees with closed-form roots and reconstructs its input",
       eigensolver_is_accurate},
      {"linear kernel spectra equal the squared singular values", gram_spectrum_matches_singular_values},
      {"out-of-sample embedding reproduces the training embedding", out_of_sample_matches_training},
      {"landmark completion is exact at full rank and improves with landmarks",
       landmark_completion_behaves},
      {"dependence statistics match brute-force and closed-form values",
       dependence_statistics_behave},
      {"diagonal normalization yields unit self-similarity", normalization_behaves},
      {"command-line runs are reproducible and errors are located",
       cli_is_deterministic_and_diagnosable},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = criterion.check(detail);
    } catch (const std::exception& e) {
      detail = std::string("threw: ") + e.what();
    }
    std::cout << (ok ? "PASS" : "FAIL") << "  " << criterion.name;
    if (!ok && !detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << '\n';
    if (!ok) ++failures;
  }
  if (failures > 0) std::cout << failures << " criteria failed\n";
  return failures == 0 ? 0 : 1;
}
