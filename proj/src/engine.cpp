#include "qboot/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qboot/errors.hpp"
#include "qboot/parallel.hpp"
#include "qboot/smoothed.hpp"

namespace qboot {

namespace {

// Fill `out` with one resample from the bandwidth-smoothed empirical of
// `src`, consuming one (index, noise) pair per slot. The consumption order
// matches draw_shared_batch, so in-place resampling and batch realization
// are coupled draw for draw.
inline void draw_resample_into(const std::vector<double>& src,
                               double bandwidth, const Kernel& kernel,
                               RngStream& rng, std::vector<double>& out) {
  const std::size_t n = src.size();
  const auto& kq = kernel.quantile;
  for (std::size_t i = 0; i < n; ++i) {
    double y = src[rng.next_below(n)];
    double w = kq(rng.next_open01());
    out[i] = y + bandwidth * w;
  }
}

// Value of the k1-th order statistic (1-based); permutes the buffer.
inline double order_stat(std::vector<double>& buf, std::size_t k1) {
  auto it = buf.begin() + static_cast<std::ptrdiff_t>(k1 - 1);
  std::nth_element(buf.begin(), it, buf.end());
  return *it;
}

inline double smoothed_quantile_of(const std::vector<double>& xs,
                                   double bandwidth, const Kernel& kernel,
                                   double q) {
  auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  return smoothed_quantile_over(xs, *lo, *hi, bandwidth, kernel, q);
}

// Center of a root at a given smoothing level: the smoothed quantile of the
// data, falling back to the raw sample quantile at bandwidth zero (the
// unsmoothed bootstrap).
inline double level_center(const Sample& s, double bandwidth,
                           const Kernel& kernel, double q) {
  if (bandwidth > 0.0)
    return smoothed_quantile_over(s.values(), s.min(), s.max(), bandwidth,
                                  kernel, q);
  return sample_quantile(s, q);
}

inline double studentize_or_extreme(double numerator,
                                    const std::vector<double>& buf, double qv,
                                    const StudentizeSpec& spec) {
  try {
    return numerator / std::sqrt(s_hat_squared_at(buf, qv, spec));
  } catch (const DegenerateStudentizer&) {
    // Park the replicate in the matching extreme tail rather than inventing
    // a finite value or dropping it.
    if (numerator > 0.0) return std::numeric_limits<double>::infinity();
    if (numerator < 0.0) return -std::numeric_limits<double>::infinity();
    return 0.0;
  }
}

void validate_plan(const BootstrapPlan& plan) {
  if (plan.b_first < 1 || plan.b_outer < 1 || plan.b_inner < 1)
    throw std::invalid_argument("bootstrap plan: replicate counts must be >= 1");
  if (!(plan.q > 0.0 && plan.q < 1.0))
    throw std::invalid_argument("bootstrap plan: q must be in (0, 1)");
}

}  // namespace

EmpiricalDist::EmpiricalDist(std::vector<double> draws)
    : values_(std::move(draws)) {
  if (values_.empty())
    throw std::invalid_argument("EmpiricalDist: no realizations");
  std::sort(values_.begin(), values_.end());
}

double EmpiricalDist::quantile(double p) const {
  double k = std::ceil(static_cast<double>(values_.size()) * p);
  if (k < 1.0) k = 1.0;
  if (k > static_cast<double>(values_.size()))
    k = static_cast<double>(values_.size());
  return values_[static_cast<std::size_t>(k) - 1];
}

double EmpiricalDist::cdf(double t) const {
  auto it = std::upper_bound(values_.begin(), values_.end(), t);
  return static_cast<double>(it - values_.begin()) /
         static_cast<double>(values_.size());
}

SharedBatch draw_shared_batch(std::size_t n, const Kernel& kernel,
                              RngStream& rng) {
  if (n < 1) throw std::invalid_argument("draw_shared_batch: n must be >= 1");
  SharedBatch batch;
  batch.indices.resize(n);
  batch.kernel_noise.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    batch.indices[i] = static_cast<std::uint32_t>(rng.next_below(n));
    batch.kernel_noise[i] = kernel.quantile(rng.next_open01());
  }
  return batch;
}

Sample realize_resample(const Sample& s, const SharedBatch& batch,
                        double bandwidth) {
  if (bandwidth < 0.0)
    throw std::invalid_argument("realize_resample: bandwidth must be >= 0");
  const auto& v = s.values();
  std::vector<double> out(batch.indices.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = v[batch.indices[i]] + bandwidth * batch.kernel_noise[i];
  return Sample(std::move(out));
}

EmpiricalDist estimate_root_dist(const Sample& s, const BootstrapPlan& plan,
                                 double level_bandwidth,
                                 const std::optional<StudentizeSpec>& studentize,
                                 const RootDistOptions& opts) {
  validate_plan(plan);
  assert(!(studentize && opts.resample_smoothing > 0.0));
  const std::size_t n = s.size();
  const double root_n = std::sqrt(static_cast<double>(n));
  const std::size_t k1 = order_stat_index(n, plan.q);
  const StreamKind kind = plan.share_batches ? StreamKind::shared_outer
                                             : StreamKind::first_level;
  const double center =
      opts.center_override
          ? *opts.center_override
          : level_center(s, level_bandwidth, plan.kernel, plan.q);

  std::vector<double> roots(static_cast<std::size_t>(plan.b_first));
  parallel_for(roots.size(), plan.workers, [&](std::size_t b) {
    RngStream rng(plan.seed, kind, b);
    std::vector<double> buf(n);
    draw_resample_into(s.values(), level_bandwidth, plan.kernel, rng, buf);
    double qv;
    if (opts.resample_smoothing > 0.0)
      qv = smoothed_quantile_of(buf, opts.resample_smoothing, plan.kernel,
                                plan.q);
    else
      qv = order_stat(buf, k1);
    double num = root_n * (qv - center);
    roots[b] = studentize ? studentize_or_extreme(num, buf, qv, *studentize)
                          : num;
  });
  return EmpiricalDist(std::move(roots));
}

EmpiricalDist estimate_prepivot_dist(
    const Sample& s, const BootstrapPlan& plan,
    const std::optional<StudentizeSpec>& studentize) {
  validate_plan(plan);
  const std::size_t n = s.size();
  const double root_n = std::sqrt(static_cast<double>(n));
  const std::size_t k1 = order_stat_index(n, plan.q);
  const StreamKind kind_outer = plan.share_batches ? StreamKind::shared_outer
                                                   : StreamKind::outer_level;
  const double center_beta = level_center(s, plan.beta, plan.kernel, plan.q);
  const std::size_t b_outer = static_cast<std::size_t>(plan.b_outer);
  const std::size_t b_inner = static_cast<std::size_t>(plan.b_inner);

  std::vector<double> prepivoted(b_outer);
  std::atomic<std::size_t> done{0};
  parallel_for(b_outer, plan.workers, [&](std::size_t m) {
    RngStream rng(plan.seed, kind_outer, m);
    std::vector<double> outer(n);
    std::vector<double> inner(n);
    draw_resample_into(s.values(), plan.beta, plan.kernel, rng, outer);
    std::sort(outer.begin(), outer.end());
    double outer_q = outer[k1 - 1];
    double num = root_n * (outer_q - center_beta);
    double outer_root =
        studentize ? studentize_or_extreme(num, outer, outer_q, *studentize)
                   : num;

    double inner_center =
        plan.eta > 0.0
            ? smoothed_quantile_over(outer, outer.front(), outer.back(),
                                     plan.eta, plan.kernel, plan.q)
            : outer_q;

    std::size_t count = 0;
    for (std::size_t j = 0; j < b_inner; ++j) {
      RngStream rng_j(plan.seed, StreamKind::inner_level, m, j);
      draw_resample_into(outer, plan.eta, plan.kernel, rng_j, inner);
      double yq = order_stat(inner, k1);
      double inum = root_n * (yq - inner_center);
      double inner_root =
          studentize ? studentize_or_extreme(inum, inner, yq, *studentize)
                     : inum;
      if (inner_root <= outer_root) ++count;
    }
    prepivoted[m] =
        static_cast<double>(count) / static_cast<double>(b_inner);
    if (plan.progress)
      plan.progress(done.fetch_add(1, std::memory_order_relaxed) + 1, b_outer);
  });
  return EmpiricalDist(std::move(prepivoted));
}

}  // namespace qboot
