#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qboot/kernel.hpp"
#include "qboot/rng.hpp"
#include "qboot/sample.hpp"
#include "qboot/studentize.hpp"

namespace qboot {

// One batch of resampling randomness: multinomial indices into the data and
// kernel noise draws. Realized at a bandwidth b as data[index[i]] + b * noise[i],
// so the same batch realized at two bandwidths yields coupled resamples and
// the outer-level simulation cost is paid once.
struct SharedBatch {
  std::vector<std::uint32_t> indices;  // 0-based, uniform on {0, .., n-1}
  std::vector<double> kernel_noise;    // iid draws from the kernel
};

// Replicate counts, bandwidths, seed and sharing policy for one bootstrap
// run. b_first sizes the first-level root distributions, b_outer/b_inner the
// two levels of the iterated ones.
struct BootstrapPlan {
  int b_first = 1000;
  int b_outer = 1500;
  int b_inner = 1000;
  double eta = 0.0;   // inner / first-level smoothing bandwidth
  double beta = 0.0;  // outer-level smoothing bandwidth
  double xi = 0.0;    // Studentization bandwidth
  std::uint64_t seed = 0;
  double q = 0.5;
  double alpha = 0.05;
  bool share_batches = true;  // reuse one batch across the eta and beta levels
  int workers = 1;
  Kernel kernel = make_triangular_kernel();
  Kernel kernel_h = make_triangular_kernel();
  // Optional progress hook (completed, total); called from worker threads.
  std::function<void(std::size_t, std::size_t)> progress;
};

// A sorted vector of Monte Carlo realizations, standing in for an exact
// conditional distribution.
class EmpiricalDist {
 public:
  explicit EmpiricalDist(std::vector<double> draws);  // sorts; must be nonempty

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  // Order statistic ceil(B p), the same inf convention as sample_quantile.
  // p outside (0, 1) clamps to the extreme elements.
  double quantile(double p) const;

  // Fraction of realizations <= t.
  double cdf(double t) const;

 private:
  std::vector<double> values_;
};

SharedBatch draw_shared_batch(std::size_t n, const Kernel& kernel,
                              RngStream& rng);

// data[index[i]] + bandwidth * noise[i], returned sorted. bandwidth 0 gives
// the plain multinomial resample.
Sample realize_resample(const Sample& s, const SharedBatch& batch,
                        double bandwidth);

struct RootDistOptions {
  // Smooth each resample's quantile at this bandwidth instead of taking the
  // raw order statistic (the smoothed-sample-quantile root variant).
  double resample_smoothing = 0.0;
  // Replace the centering value (default: the level_bandwidth-smoothed
  // quantile of the data, or the sample quantile when level_bandwidth is 0).
  std::optional<double> center_override;
};

// First-level root distribution: draws plan.b_first resamples from the
// level_bandwidth-smoothed empirical of s and collects
//   sqrt(n) (resample quantile - center),
// Studentized by the resample's plug-in estimate when `studentize` is given.
// A degenerate resample Studentizer maps the root to +-infinity matched to
// the numerator's sign so replicate counts are preserved.
EmpiricalDist estimate_root_dist(
    const Sample& s, const BootstrapPlan& plan, double level_bandwidth,
    const std::optional<StudentizeSpec>& studentize = {},
    const RootDistOptions& opts = {});

// Distribution of the prepivoted outer root: for each of plan.b_outer outer
// resamples (bandwidth beta), the fraction of plan.b_inner inner roots
// (bandwidth eta, drawn from the outer resample's eta-smoothed empirical)
// not exceeding the outer root. Studentizes both levels when `studentize`
// is given. Returns the sorted fractions, all in [0, 1].
EmpiricalDist estimate_prepivot_dist(
    const Sample& s, const BootstrapPlan& plan,
    const std::optional<StudentizeSpec>& studentize = {});

inline double empirical_quantile(const EmpiricalDist& d, double p) {
  return d.quantile(p);
}

inline double prepivot(const EmpiricalDist& d, double t) { return d.cdf(t); }

}  // namespace qboot
