#pragma once

#include <cstddef>
#include <vector>

namespace qboot {

// An observed data vector, kept sorted. Immutable after construction.
class Sample {
 public:
  // Sorts the input. Throws DataError if it is empty or contains NaN.
  explicit Sample(std::vector<double> values);

  // Adopts an already-sorted vector (checked in debug builds only).
  static Sample from_sorted(std::vector<double> values);

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double min() const { return values_.front(); }
  double max() const { return values_.back(); }

 private:
  struct sorted_tag {};
  Sample(std::vector<double> values, sorted_tag);

  std::vector<double> values_;
};

// 1-based order-statistic index ceil(n q), clamped to [1, n].
std::size_t order_stat_index(std::size_t n, double q);

// The sample q-th quantile by the inf convention: the ceil(n q)-th order
// statistic. Requires 0 < q < 1.
double sample_quantile(const Sample& s, double q);

// delta_n = 1 + n q - ceil(n q), in (0, 1].
double delta_n(std::size_t n, double q);

// Fraction of sample values <= t.
double empirical_cdf(const Sample& s, double t);

}  // namespace qboot
