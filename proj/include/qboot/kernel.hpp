#pragma once

#include <functional>
#include <string>

#include "qboot/rng.hpp"

namespace qboot {

// A compactly supported symmetric probability kernel. pdf vanishes outside
// [-support_halfwidth, support_halfwidth], cdf runs from 0 to 1 across it,
// and quantile inverts the cdf (used for sampling). pdf_derivative is the
// piecewise derivative of the pdf; at kink points it takes the average of the
// one-sided limits. Orders above max_derivative_order are rejected.
//
// The type is open: any density satisfying the symmetry/compact-support
// contract can be wired in without touching callers.
struct Kernel {
  std::string name;
  double support_halfwidth = 1.0;
  int max_derivative_order = 1;
  std::function<double(double)> pdf;
  std::function<double(double)> cdf;
  std::function<double(double)> quantile;
  std::function<double(double, int)> pdf_derivative;
};

// The triangular density x -> 1 - |x| on [-1, 1]; cdf piecewise quadratic,
// quantile closed form. First pdf derivative only.
Kernel make_triangular_kernel();

// Rescale a kernel so its second moment is one (the raw triangular kernel has
// second moment 1/6). Kept as an opt-in switch for sensitivity runs; the
// default everywhere is the raw kernel.
Kernel rescale_to_unit_variance(const Kernel& k);

// One draw with distribution function kernel.cdf, by inverse transform.
double sample_from_kernel(const Kernel& k, RngStream& rng);

}  // namespace qboot
