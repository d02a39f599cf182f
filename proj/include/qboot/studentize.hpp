#pragma once

#include <span>

#include "qboot/kernel.hpp"
#include "qboot/sample.hpp"

namespace qboot {

// Parameters of the plug-in variance estimate for the sample quantile.
// kernel_h is usually the same triangular density as the smoothing kernel
// but is configurable independently.
struct StudentizeSpec {
  double xi = 0.0;  // bandwidth, > 0
  Kernel kernel_h;
  double q = 0.5;
};

// Plug-in estimate of n * Var(sample q-th quantile):
//   q(1-q) (n xi)^2 / (sum_i h((Q - x_i) / xi))^2,
// with Q the sample quantile. Equals q(1-q) / fhat(Q)^2 where fhat is the
// xi-bandwidth kernel density estimate with kernel h. Throws
// DegenerateStudentizer when the kernel sum vanishes.
double s_hat_squared(const Sample& s, const StudentizeSpec& spec);

// Same, over an unsorted buffer with the sample quantile already computed.
double s_hat_squared_at(std::span<const double> xs, double quantile_value,
                        const StudentizeSpec& spec);

// sqrt(n) (sample_quantile(s, q) - target) / s_hat.
double studentized_root(const Sample& s, double target,
                        const StudentizeSpec& spec);

}  // namespace qboot
