#include "qboot/study.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <stdexcept>

#include "qboot/errors.hpp"
#include "qboot/parallel.hpp"
#include "qboot/report_io.hpp"

namespace qboot {

std::string model_name(DataModel m) {
  switch (m) {
    case DataModel::std_normal: return "std_normal";
    case DataModel::double_exponential_unit: return "double_exponential_unit";
    case DataModel::std_lognormal: return "std_lognormal";
  }
  return "?";
}

std::optional<DataModel> model_from_name(const std::string& name) {
  if (name == "std_normal" || name == "normal") return DataModel::std_normal;
  if (name == "double_exponential_unit" || name == "double_exponential" ||
      name == "laplace")
    return DataModel::double_exponential_unit;
  if (name == "std_lognormal" || name == "lognormal")
    return DataModel::std_lognormal;
  return std::nullopt;
}

namespace {

const boost::math::normal_distribution<double>& std_normal_dist() {
  static const boost::math::normal_distribution<double> d;
  return d;
}

double laplace_quantile(double p) {
  return p < 0.5 ? std::log(2.0 * p) : -std::log(2.0 * (1.0 - p));
}

}  // namespace

double true_quantile(DataModel m, double q) {
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("true_quantile: q must be in (0, 1)");
  switch (m) {
    case DataModel::std_normal:
      return boost::math::quantile(std_normal_dist(), q);
    case DataModel::double_exponential_unit:
      return laplace_quantile(q);
    case DataModel::std_lognormal:
      return std::exp(boost::math::quantile(std_normal_dist(), q));
  }
  throw std::logic_error("unknown model");
}

double model_pdf(DataModel m, double x) {
  switch (m) {
    case DataModel::std_normal:
      return boost::math::pdf(std_normal_dist(), x);
    case DataModel::double_exponential_unit:
      return 0.5 * std::exp(-std::abs(x));
    case DataModel::std_lognormal:
      if (x <= 0.0) return 0.0;
      return boost::math::pdf(std_normal_dist(), std::log(x)) / x;
  }
  throw std::logic_error("unknown model");
}

double model_pdf_derivative(DataModel m, double x) {
  switch (m) {
    case DataModel::std_normal:
      return -x * boost::math::pdf(std_normal_dist(), x);
    case DataModel::double_exponential_unit:
      if (x == 0.0) return 0.0;  // kink: average of one-sided limits
      return (x > 0.0 ? -0.5 : 0.5) * std::exp(-std::abs(x));
    case DataModel::std_lognormal: {
      if (x <= 0.0) return 0.0;
      double lx = std::log(x);
      return -boost::math::pdf(std_normal_dist(), lx) * (1.0 + lx) / (x * x);
    }
  }
  throw std::logic_error("unknown model");
}

Sample draw_sample(DataModel m, std::size_t n, RngStream& rng) {
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = rng.next_open01();
    switch (m) {
      case DataModel::std_normal:
        values[i] = boost::math::quantile(std_normal_dist(), u);
        break;
      case DataModel::double_exponential_unit:
        values[i] = laplace_quantile(u);
        break;
      case DataModel::std_lognormal:
        values[i] = std::exp(boost::math::quantile(std_normal_dist(), u));
        break;
    }
  }
  return Sample(std::move(values));
}

namespace {

struct ReplicationRecord {
  // Per method: containment per alpha, then per two-sided pair; parallel
  // lengths for the pairs. `failed` marks a degenerate Studentizer on the
  // data sample.
  std::vector<std::uint8_t> one_sided;
  std::vector<std::uint8_t> two_sided;
  std::vector<double> lengths;
  std::vector<std::uint8_t> failed;  // per method
};

void validate_config(const StudyConfig& cfg) {
  if (cfg.replications < 1) throw ConfigError("replications must be >= 1");
  if (cfg.methods.empty()) throw ConfigError("no methods requested");
  if (cfg.alphas.empty()) throw ConfigError("no alpha levels requested");
  for (double a : cfg.alphas)
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("alpha must be in (0, 1)");
  for (auto [lo, hi] : cfg.two_sided_pairs) {
    if (!(lo < hi)) throw ConfigError("two-sided pair needs alpha_lo < alpha_hi");
    auto has = [&](double a) {
      return std::find(cfg.alphas.begin(), cfg.alphas.end(), a) !=
             cfg.alphas.end();
    };
    if (!has(lo) || !has(hi))
      throw ConfigError("two-sided pair endpoints must be listed in alphas");
  }
}

}  // namespace

CoverageReport run_coverage_study(const StudyConfig& cfg) {
  validate_config(cfg);
  const std::size_t n_methods = cfg.methods.size();
  const std::size_t n_alphas = cfg.alphas.size();
  const std::size_t n_pairs = cfg.two_sided_pairs.size();
  const std::size_t reps = static_cast<std::size_t>(cfg.replications);
  const double theta = true_quantile(cfg.model, cfg.q);

  std::vector<ReplicationRecord> records(reps);
  std::atomic<std::size_t> done{0};

  parallel_for(reps, cfg.workers, [&](std::size_t r) {
    RngStream data_rng(cfg.seed, StreamKind::data, r);
    Sample sample = draw_sample(cfg.model, cfg.n, data_rng);

    BootstrapPlan plan = cfg.plan;
    plan.seed = derive_seed(cfg.seed, StreamKind::derive, r);
    plan.workers = 1;
    plan.q = cfg.q;
    plan.progress = nullptr;

    ReplicationRecord rec;
    rec.one_sided.assign(n_methods * n_alphas, 0);
    rec.two_sided.assign(n_methods * n_pairs, 0);
    rec.lengths.assign(n_methods * n_pairs, 0.0);
    rec.failed.assign(n_methods, 0);

    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      Method m = cfg.methods[mi];
      Bandwidths bw = default_bandwidths(m, cfg.n);
      if (cfg.overrides.eta > 0.0) bw.eta = cfg.overrides.eta;
      if (cfg.overrides.beta > 0.0 && bw.beta > 0.0) bw.beta = cfg.overrides.beta;
      if (cfg.overrides.xi > 0.0 && bw.xi > 0.0) bw.xi = cfg.overrides.xi;
      if (cfg.overrides.zeta > 0.0 && bw.zeta > 0.0) bw.zeta = cfg.overrides.zeta;
      try {
        FittedMethod fit = fit_method(m, sample, bw, plan);
        std::vector<IntervalResult> at_alpha(n_alphas);
        for (std::size_t ai = 0; ai < n_alphas; ++ai) {
          at_alpha[ai] = fit.at(cfg.alphas[ai]);
          rec.one_sided[mi * n_alphas + ai] =
              theta <= at_alpha[ai].upper ? 1 : 0;
        }
        for (std::size_t pi = 0; pi < n_pairs; ++pi) {
          auto [lo, hi] = cfg.two_sided_pairs[pi];
          auto idx_of = [&](double a) {
            return static_cast<std::size_t>(
                std::find(cfg.alphas.begin(), cfg.alphas.end(), a) -
                cfg.alphas.begin());
          };
          TwoSidedResult ts =
              two_sided(at_alpha[idx_of(hi)], at_alpha[idx_of(lo)]);
          rec.two_sided[mi * n_pairs + pi] =
              (ts.lower < theta && theta <= ts.upper) ? 1 : 0;
          rec.lengths[mi * n_pairs + pi] = ts.length;
        }
      } catch (const DegenerateStudentizer&) {
        rec.failed[mi] = 1;
      }
    }
    records[r] = std::move(rec);
    if (cfg.progress)
      cfg.progress(done.fetch_add(1, std::memory_order_relaxed) + 1, reps);
  });

  // Serial aggregation in replication order keeps results independent of the
  // worker count.
  CoverageReport report;
  report.config = cfg;
  report.config_hash = study_config_hash(cfg);
  for (std::size_t mi = 0; mi < n_methods; ++mi) {
    for (std::size_t ai = 0; ai < n_alphas; ++ai) {
      OneSidedStat stat;
      stat.method = cfg.methods[mi];
      stat.alpha = cfg.alphas[ai];
      stat.indicators.resize(reps);
      std::size_t hits = 0, valid = 0;
      for (std::size_t r = 0; r < reps; ++r) {
        if (records[r].failed[mi]) {
          stat.indicators[r] = 2;
          continue;
        }
        stat.indicators[r] = records[r].one_sided[mi * n_alphas + ai];
        hits += stat.indicators[r];
        ++valid;
      }
      if (valid == 0)
        throw std::runtime_error("all replications failed for method " +
                                 method_name(cfg.methods[mi]));
      stat.coverage = static_cast<double>(hits) / static_cast<double>(valid);
      stat.se = std::sqrt(stat.coverage * (1.0 - stat.coverage) /
                          static_cast<double>(valid));
      report.one_sided.push_back(std::move(stat));
    }
    for (std::size_t pi = 0; pi < n_pairs; ++pi) {
      TwoSidedStat stat;
      stat.method = cfg.methods[mi];
      stat.alpha_lo = cfg.two_sided_pairs[pi].first;
      stat.alpha_hi = cfg.two_sided_pairs[pi].second;
      stat.indicators.resize(reps);
      std::size_t hits = 0, valid = 0;
      for (std::size_t r = 0; r < reps; ++r) {
        if (records[r].failed[mi]) {
          stat.indicators[r] = 2;
          continue;
        }
        stat.indicators[r] = records[r].two_sided[mi * n_pairs + pi];
        hits += stat.indicators[r];
        ++valid;
        stat.lengths.push_back(records[r].lengths[mi * n_pairs + pi]);
      }
      stat.coverage = static_cast<double>(hits) / static_cast<double>(valid);
      stat.se = std::sqrt(stat.coverage * (1.0 - stat.coverage) /
                          static_cast<double>(valid));
      double mean = 0.0;
      for (double len : stat.lengths) mean += len;
      mean /= static_cast<double>(stat.lengths.size());
      double var = 0.0;
      for (double len : stat.lengths) var += (len - mean) * (len - mean);
      var = stat.lengths.size() > 1
                ? var / static_cast<double>(stat.lengths.size() - 1)
                : 0.0;
      stat.mean_length = mean;
      stat.var_length = var;
      report.two_sided.push_back(std::move(stat));
    }
  }

  int failed = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    bool any = false;
    for (std::size_t mi = 0; mi < n_methods; ++mi)
      if (records[r].failed[mi]) any = true;
    if (any) ++failed;
  }
  report.failed_replications = failed;
  report.failure_flag =
      static_cast<double>(failed) > 0.01 * static_cast<double>(reps);
  return report;
}

}  // namespace qboot
