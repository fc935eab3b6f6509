#pragma once

#include "ktk/matrix.hpp"

namespace ktk {

// Kernel matrices over paired samples (x_i, y_i), same order by construction
// of the pairing.
struct PairedKernels {
  GramMatrix kx;
  GramMatrix ky;
};

// Empirical Hilbert-Schmidt independence criterion,
// tr(Kx H Ky H) / (n - 1)^2 with H the centering matrix. Zero (up to
// round-off) when either variable is constant; symmetric in its arguments.
double hsic(const GramMatrix& kx, const GramMatrix& ky);
double hsic(const PairedKernels& pk);

// Squared maximum mean discrepancy, biased V-statistic:
// mean(Kxx) + mean(Kyy) - 2 mean(Kxy), each mean over the full block.
// Sample sizes may differ; with n = m this is the textbook estimator.
double mmd2(const Matrix& kxx, const Matrix& kyy, const Matrix& kxy);

}  // namespace ktk
