#include "ktk/dependence.hpp"

#include <string>

#include "ktk/errors.hpp"
#include "ktk/gram_ops.hpp"

namespace ktk {

double hsic(const GramMatrix& kx, const GramMatrix& ky) {
  const std::size_t n = kx.order();
  if (ky.order() != n)
    fail(errc::order_mismatch, "kernel orders " + std::to_string(n) + " and " +
                                   std::to_string(ky.order()) + " differ");
  if (n < 2) fail(errc::too_few_samples, "hsic needs at least 2 samples");

  // tr(Kx H Ky H) equals the entrywise product sum of the two centered
  // matrices (H is idempotent), which keeps the computation symmetric in
  // the arguments.
  const GramMatrix cx = double_center(kx);
  const GramMatrix cy = double_center(ky);
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) sum += cx(i, j) * cy(i, j);
  const double denom = static_cast<double>(n - 1);
  return sum / (denom * denom);
}

double hsic(const PairedKernels& pk) { return hsic(pk.kx, pk.ky); }

namespace {

double block_mean(const Matrix& m) {
  double sum = 0.0;
  for (double v : m.data()) sum += v;
  return sum / static_cast<double>(m.rows() * m.cols());
}

}  // namespace

double mmd2(const Matrix& kxx, const Matrix& kyy, const Matrix& kxy) {
  if (kxx.rows() != kxx.cols() || kyy.rows() != kyy.cols())
    fail(errc::shape_mismatch, "within-sample kernel blocks must be square");
  if (kxy.rows() != kxx.rows() || kxy.cols() != kyy.rows())
    fail(errc::shape_mismatch, "cross block is " + std::to_string(kxy.rows()) + "x" +
                                   std::to_string(kxy.cols()) + ", expected " +
                                   std::to_string(kxx.rows()) + "x" + std::to_string(kyy.rows()));
  if (kxx.rows() == 0 || kyy.rows() == 0) fail(errc::too_few_samples, "empty sample set");
  return block_mean(kxx) + block_mean(kyy) - 2.0 * block_mean(kxy);
}

}  // namespace ktk
