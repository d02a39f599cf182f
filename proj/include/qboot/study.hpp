#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qboot/engine.hpp"
#include "qboot/intervals.hpp"
#include "qboot/rng.hpp"
#include "qboot/sample.hpp"

namespace qboot {

// The three data-generating models of the coverage study. All have closed
// form quantiles and densities.
enum class DataModel { std_normal, double_exponential_unit, std_lognormal };

std::string model_name(DataModel m);
std::optional<DataModel> model_from_name(const std::string& name);

double true_quantile(DataModel m, double q);
double model_pdf(DataModel m, double x);
// Derivative of the density. The double exponential has a kink at 0, where
// the average of the one-sided limits (zero) is returned.
double model_pdf_derivative(DataModel m, double x);

// n iid draws by inverse transform.
Sample draw_sample(DataModel m, std::size_t n, RngStream& rng);

struct StudyConfig {
  DataModel model = DataModel::std_normal;
  std::size_t n = 15;
  double q = 0.5;
  std::vector<double> alphas = {0.05, 0.95};
  // Two-sided combinations (alpha_lo, alpha_hi); both ends must also be
  // requested in `alphas`.
  std::vector<std::pair<double, double>> two_sided_pairs = {{0.05, 0.95}};
  std::vector<Method> methods = {Method::i1, Method::i2, Method::i3,
                                 Method::i4};
  int replications = 1000;
  BootstrapPlan plan;      // per-interval Monte Carlo sizes, sharing, kernels
  Bandwidths overrides;    // nonzero fields override the per-method defaults
  std::uint64_t seed = 0;
  int workers = 1;
  std::function<void(std::size_t, std::size_t)> progress;
};

struct OneSidedStat {
  Method method = Method::i1;
  double alpha = 0.0;
  double coverage = 0.0;
  double se = 0.0;
  std::vector<std::uint8_t> indicators;  // one per replication; 2 = failed
};

struct TwoSidedStat {
  Method method = Method::i1;
  double alpha_lo = 0.0;
  double alpha_hi = 0.0;
  double coverage = 0.0;
  double se = 0.0;
  double mean_length = 0.0;
  double var_length = 0.0;
  std::vector<std::uint8_t> indicators;
  std::vector<double> lengths;  // one per successful replication, in order
};

struct CoverageReport {
  StudyConfig config;
  std::string config_hash;  // of the canonical config text; embedded in
                            // every artifact
  std::vector<OneSidedStat> one_sided;
  std::vector<TwoSidedStat> two_sided;
  int failed_replications = 0;
  bool failure_flag = false;      // failures exceeded 1% of replications
  double runtime_seconds = 0.0;   // not serialized; reruns stay byte-identical
};

// Run the full coverage study: per replication draw a sample, fit every
// requested method once, read off all endpoints, and record containment of
// the true quantile. All methods see the same samples and the same
// replication-keyed randomness. Replications where a method's Studentizer
// degenerates on the data itself are excluded from that method's aggregates
// and counted; the run is flagged if they exceed 1% of replications.
CoverageReport run_coverage_study(const StudyConfig& cfg);

}  // namespace qboot
