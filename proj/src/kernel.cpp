#include "qboot/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace qboot {

namespace {

double triangular_pdf(double x) {
  double ax = std::abs(x);
  return ax >= 1.0 ? 0.0 : 1.0 - ax;
}

double triangular_cdf(double x) {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x < 0.0) {
    double s = 1.0 + x;
    return 0.5 * s * s;
  }
  double s = 1.0 - x;
  return 1.0 - 0.5 * s * s;
}

double triangular_quantile(double u) {
  if (u <= 0.0) return -1.0;
  if (u >= 1.0) return 1.0;
  if (u <= 0.5) return -1.0 + std::sqrt(2.0 * u);
  return 1.0 - std::sqrt(2.0 * (1.0 - u));
}

double triangular_pdf_derivative(double x, int order) {
  if (order != 1) {
    throw std::invalid_argument(
        "triangular kernel: pdf derivative of order " + std::to_string(order) +
        " is not available (piecewise linear, order 1 only)");
  }
  double ax = std::abs(x);
  if (ax > 1.0) return 0.0;
  // Kinks at 0 and +-1: average of one-sided limits.
  if (x == 0.0) return 0.0;
  if (ax == 1.0) return x > 0.0 ? -0.5 : 0.5;
  return x > 0.0 ? -1.0 : 1.0;
}

// Simpson integral of x^2 k(x) over the support. Node count is even so the
// kink at 0 lands on a node; exact for piecewise-cubic integrands.
double second_moment(const Kernel& k) {
  const int n = 4000;
  const double a = k.support_halfwidth;
  const double h = 2.0 * a / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    double x = -a + i * h;
    double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    sum += w * x * x * k.pdf(x);
  }
  return sum * h / 3.0;
}

}  // namespace

Kernel make_triangular_kernel() {
  Kernel k;
  k.name = "triangular";
  k.support_halfwidth = 1.0;
  k.max_derivative_order = 1;
  k.pdf = triangular_pdf;
  k.cdf = triangular_cdf;
  k.quantile = triangular_quantile;
  k.pdf_derivative = triangular_pdf_derivative;
  return k;
}

Kernel rescale_to_unit_variance(const Kernel& k) {
  const double s = std::sqrt(second_moment(k));
  Kernel out;
  out.name = k.name + "_unit_variance";
  out.support_halfwidth = k.support_halfwidth / s;
  out.max_derivative_order = k.max_derivative_order;
  out.pdf = [k, s](double x) { return s * k.pdf(s * x); };
  out.cdf = [k, s](double x) { return k.cdf(s * x); };
  out.quantile = [k, s](double u) { return k.quantile(u) / s; };
  out.pdf_derivative = [k, s](double x, int order) {
    return std::pow(s, 1 + order) * k.pdf_derivative(s * x, order);
  };
  return out;
}

double sample_from_kernel(const Kernel& k, RngStream& rng) {
  return k.quantile(rng.next_open01());
}

}  // namespace qboot
