#include "qboot/sample.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "qboot/errors.hpp"

namespace qboot {

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DataError("empty sample");
  for (double v : values_) {
    if (std::isnan(v)) throw DataError("sample contains NaN");
  }
  std::sort(values_.begin(), values_.end());
}

Sample::Sample(std::vector<double> values, sorted_tag)
    : values_(std::move(values)) {
  if (values_.empty()) throw DataError("empty sample");
  assert(std::is_sorted(values_.begin(), values_.end()));
}

Sample Sample::from_sorted(std::vector<double> values) {
  return Sample(std::move(values), sorted_tag{});
}

std::size_t order_stat_index(std::size_t n, double q) {
  double k = std::ceil(static_cast<double>(n) * q);
  if (k < 1.0) return 1;
  if (k > static_cast<double>(n)) return n;
  return static_cast<std::size_t>(k);
}

double sample_quantile(const Sample& s, double q) {
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("sample_quantile: q must be in (0, 1)");
  return s.values()[order_stat_index(s.size(), q) - 1];
}

double delta_n(std::size_t n, double q) {
  double nq = static_cast<double>(n) * q;
  return 1.0 + nq - std::ceil(nq);
}

double empirical_cdf(const Sample& s, double t) {
  const auto& v = s.values();
  auto it = std::upper_bound(v.begin(), v.end(), t);
  return static_cast<double>(it - v.begin()) / static_cast<double>(v.size());
}

}  // namespace qboot
