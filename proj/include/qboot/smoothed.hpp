#pragma once

#include <span>

#include "qboot/kernel.hpp"
#include "qboot/sample.hpp"

namespace qboot {

// Span-level kernel-smoothing primitives. The values need not be sorted;
// sums are exact (no binning). These are shared by SmoothedDistribution and
// by the resampling engine, which works on scratch buffers.

// (1/n) sum_i K((t - x_i) / bandwidth)
double smoothed_cdf_over(std::span<const double> xs, double bandwidth,
                         const Kernel& k, double t);

// (1/(n bandwidth)) sum_i k((t - x_i) / bandwidth)
double smoothed_pdf_over(std::span<const double> xs, double bandwidth,
                         const Kernel& k, double t);

// (1/(n bandwidth^(1+order))) sum_i k^(order)((t - x_i) / bandwidth)
double smoothed_pdf_derivative_over(std::span<const double> xs,
                                    double bandwidth, const Kernel& k,
                                    double t, int order);

// Invert the smoothed cdf by bisection on
// [min - a*bandwidth, max + a*bandwidth]. Stops when |cdf - q| <= 1e-10,
// capped at 200 iterations. Bisection rather than Newton: the pdf can vanish
// on whole intervals inside the support hull.
double smoothed_quantile_over(std::span<const double> xs, double lo, double hi,
                              double bandwidth, const Kernel& k, double q);

// The kernel-smoothed empirical distribution of a sample: evaluable as CDF,
// density, density derivative, and quantile. Immutable after construction.
class SmoothedDistribution {
 public:
  // Requires bandwidth > 0.
  SmoothedDistribution(Sample sample, double bandwidth, Kernel kernel);

  double cdf(double t) const;
  double pdf(double t) const;
  double pdf_derivative(double t, int order) const;
  double quantile(double q) const;  // requires 0 < q < 1

  double support_lo() const;
  double support_hi() const;

  const Sample& sample() const { return sample_; }
  double bandwidth() const { return bandwidth_; }
  const Kernel& kernel() const { return kernel_; }

 private:
  Sample sample_;
  double bandwidth_;
  Kernel kernel_;
};

}  // namespace qboot
