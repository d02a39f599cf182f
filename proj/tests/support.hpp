#pragma once

// Shared test oracles: quadrature, finite differences, and the
// Kolmogorov-Smirnov distance. These stay independent of the library code
// they are used to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace testsupport {

// Composite Simpson rule with an even panel count.
template <class F>
double simpson(const F& f, double a, double b, int panels = 2000) {
  if (panels % 2 != 0) ++panels;
  double h = (b - a) / panels;
  double sum = f(a) + f(b);
  for (int i = 1; i < panels; ++i)
    sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

template <class F>
double central_difference(const F& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// sup_x |F_n(x) - F(x)| over the sample points.
template <class F>
double ks_distance(std::vector<double> draws, const F& cdf) {
  std::sort(draws.begin(), draws.end());
  double n = static_cast<double>(draws.size());
  double d = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    double fx = cdf(draws[i]);
    d = std::max(d, std::abs((static_cast<double>(i) + 1.0) / n - fx));
    d = std::max(d, std::abs(fx - static_cast<double>(i) / n));
  }
  return d;
}

inline double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double sd_of(const std::vector<double>& xs) {
  double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace testsupport
