#include "qboot/smoothed.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace qboot {

namespace {
constexpr double kCdfTol = 1e-10;
constexpr int kMaxBisectIter = 200;
}  // namespace

double smoothed_cdf_over(std::span<const double> xs, double bandwidth,
                         const Kernel& k, double t) {
  const auto& cdf = k.cdf;
  double sum = 0.0;
  for (double x : xs) sum += cdf((t - x) / bandwidth);
  return sum / static_cast<double>(xs.size());
}

double smoothed_pdf_over(std::span<const double> xs, double bandwidth,
                         const Kernel& k, double t) {
  const auto& pdf = k.pdf;
  double sum = 0.0;
  for (double x : xs) sum += pdf((t - x) / bandwidth);
  return sum / (static_cast<double>(xs.size()) * bandwidth);
}

double smoothed_pdf_derivative_over(std::span<const double> xs,
                                    double bandwidth, const Kernel& k,
                                    double t, int order) {
  const auto& deriv = k.pdf_derivative;
  double sum = 0.0;
  for (double x : xs) sum += deriv((t - x) / bandwidth, order);
  return sum / (static_cast<double>(xs.size()) *
                std::pow(bandwidth, 1.0 + order));
}

double smoothed_quantile_over(std::span<const double> xs, double lo, double hi,
                              double bandwidth, const Kernel& k, double q) {
  double a = lo - k.support_halfwidth * bandwidth;
  double b = hi + k.support_halfwidth * bandwidth;
  for (int it = 0; it < kMaxBisectIter; ++it) {
    double mid = 0.5 * (a + b);
    double f = smoothed_cdf_over(xs, bandwidth, k, mid) - q;
    if (std::abs(f) <= kCdfTol) return mid;
    if (f < 0.0)
      a = mid;
    else
      b = mid;
    if (b - a <= 0.0) break;
  }
  return 0.5 * (a + b);
}

SmoothedDistribution::SmoothedDistribution(Sample sample, double bandwidth,
                                           Kernel kernel)
    : sample_(std::move(sample)),
      bandwidth_(bandwidth),
      kernel_(std::move(kernel)) {
  if (!(bandwidth_ > 0.0))
    throw std::invalid_argument("SmoothedDistribution: bandwidth must be > 0");
}

double SmoothedDistribution::cdf(double t) const {
  return smoothed_cdf_over(sample_.values(), bandwidth_, kernel_, t);
}

double SmoothedDistribution::pdf(double t) const {
  return smoothed_pdf_over(sample_.values(), bandwidth_, kernel_, t);
}

double SmoothedDistribution::pdf_derivative(double t, int order) const {
  return smoothed_pdf_derivative_over(sample_.values(), bandwidth_, kernel_, t,
                                      order);
}

double SmoothedDistribution::quantile(double q) const {
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument(
        "SmoothedDistribution::quantile: q must be in (0, 1)");
  return smoothed_quantile_over(sample_.values(), sample_.min(), sample_.max(),
                                bandwidth_, kernel_, q);
}

double SmoothedDistribution::support_lo() const {
  return sample_.min() - kernel_.support_halfwidth * bandwidth_;
}

double SmoothedDistribution::support_hi() const {
  return sample_.max() + kernel_.support_halfwidth * bandwidth_;
}

}  // namespace qboot
