// Command-line front end: interval construction, bandwidth selection,
// coverage studies and the analytic error-term predictor.
//
// All data results go to stdout or files and are byte-identical across
// reruns with the same seed; progress and timing go to stderr.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>

#include "qboot/bandwidth.hpp"
#include "qboot/errors.hpp"
#include "qboot/flat_config.hpp"
#include "qboot/intervals.hpp"
#include "qboot/report_io.hpp"
#include "qboot/study.hpp"
#include "qboot/version.hpp"

namespace {

using namespace qboot;

// Data files hold one real per line; "path:N" picks the N-th comma-separated
// column (1-based) instead.
std::vector<double> read_data_file(const std::string& spec) {
  std::string path = spec;
  int column = 0;
  auto colon = spec.rfind(':');
  if (colon != std::string::npos && colon + 1 < spec.size()) {
    bool digits = true;
    for (std::size_t i = colon + 1; i < spec.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(spec[i]))) digits = false;
    if (digits) {
      column = std::stoi(spec.substr(colon + 1));
      path = spec.substr(0, colon);
    }
  }
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file: " + path);
  std::vector<double> values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string cell = line;
    if (column > 0) {
      std::vector<std::string> cols;
      std::string cur;
      for (char c : line) {
        if (c == ',') {
          cols.push_back(cur);
          cur.clear();
        } else {
          cur += c;
        }
      }
      cols.push_back(cur);
      if (static_cast<std::size_t>(column) > cols.size())
        throw DataError(path + " line " + std::to_string(lineno) +
                        ": no column " + std::to_string(column));
      cell = cols[static_cast<std::size_t>(column) - 1];
    }
    auto b = cell.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;  // blank line
    auto e = cell.find_last_not_of(" \t\r");
    cell = cell.substr(b, e - b + 1);
    try {
      std::size_t pos = 0;
      values.push_back(std::stod(cell, &pos));
      if (pos != cell.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw DataError(path + " line " + std::to_string(lineno) +
                      ": not a number: " + cell);
    }
  }
  if (values.empty()) throw DataError(path + ": no data values");
  return values;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out << content;
}

struct IntervalArgs {
  std::string data;
  std::string method = "i1";
  double q = 0.5;
  double alpha = 0.05;
  double eta = 0.0, beta = 0.0, xi = 0.0, zeta = 0.0;
  int b1 = 1000, b2 = 1500, b3 = 1000;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string format = "csv";
  std::string out;
  bool no_share = false;
  bool unit_variance_kernel = false;
  std::string i1k_center = "eta";
};

// Canonical parameter record; its hash ties every artifact of one run
// together.
std::string interval_param_text(const IntervalResult& res, std::size_t n,
                                double q, double alpha, std::uint64_t seed) {
  std::ostringstream os;
  os << "method=" << method_name(res.method) << ";n=" << n
     << ";q=" << format_double(q) << ";alpha=" << format_double(alpha)
     << ";eta=" << format_double(res.bandwidths.eta)
     << ";beta=" << format_double(res.bandwidths.beta)
     << ";xi=" << format_double(res.bandwidths.xi)
     << ";zeta=" << format_double(res.bandwidths.zeta)
     << ";b1=" << res.mc_sizes.b_first << ";b2=" << res.mc_sizes.b_outer
     << ";b3=" << res.mc_sizes.b_inner << ";seed=" << seed;
  return os.str();
}

std::string interval_record_text(const IntervalResult& res, std::size_t n,
                                 double q, double alpha, std::uint64_t seed) {
  std::ostringstream os;
  os << "version = " << kVersion << "\n";
  os << "method = " << method_name(res.method) << "\n";
  os << "n = " << n << "\n";
  os << "q = " << format_double(q) << "\n";
  os << "alpha = " << format_double(alpha) << "\n";
  os << "nominal = " << format_double(res.nominal) << "\n";
  os << "upper = " << format_double(res.upper) << "\n";
  if (res.calibrated_level)
    os << "calibrated_level = " << format_double(*res.calibrated_level) << "\n";
  if (res.bandwidths.eta > 0)
    os << "eta = " << format_double(res.bandwidths.eta) << "\n";
  if (res.bandwidths.beta > 0)
    os << "beta = " << format_double(res.bandwidths.beta) << "\n";
  if (res.bandwidths.xi > 0)
    os << "xi = " << format_double(res.bandwidths.xi) << "\n";
  if (res.bandwidths.zeta > 0)
    os << "zeta = " << format_double(res.bandwidths.zeta) << "\n";
  os << "b1 = " << res.mc_sizes.b_first << "\n";
  if (res.mc_sizes.b_outer > 0) os << "b2 = " << res.mc_sizes.b_outer << "\n";
  if (res.mc_sizes.b_inner > 0) os << "b3 = " << res.mc_sizes.b_inner << "\n";
  os << "seed = " << seed << "\n";
  os << "config_hash = "
     << fnv1a64_hex(interval_param_text(res, n, q, alpha, seed)) << "\n";
  return os.str();
}

nlohmann::json interval_record_json(const IntervalResult& res, std::size_t n,
                                    double q, double alpha,
                                    std::uint64_t seed) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["method"] = method_name(res.method);
  j["n"] = n;
  j["q"] = q;
  j["alpha"] = alpha;
  j["nominal"] = res.nominal;
  j["upper"] = res.upper;
  if (res.calibrated_level) j["calibrated_level"] = *res.calibrated_level;
  j["bandwidths"] = {{"eta", res.bandwidths.eta},
                     {"beta", res.bandwidths.beta},
                     {"xi", res.bandwidths.xi},
                     {"zeta", res.bandwidths.zeta}};
  j["mc_sizes"] = {{"b1", res.mc_sizes.b_first},
                   {"b2", res.mc_sizes.b_outer},
                   {"b3", res.mc_sizes.b_inner}};
  j["seed"] = seed;
  j["config_hash"] = fnv1a64_hex(interval_param_text(res, n, q, alpha, seed));
  return j;
}

std::string interval_record_csv(const IntervalResult& res, std::size_t n,
                                double q, double alpha, std::uint64_t seed) {
  std::ostringstream os;
  os << "# qboot " << kVersion << " seed=" << seed << " config_hash="
     << fnv1a64_hex(interval_param_text(res, n, q, alpha, seed)) << "\n";
  os << "method,n,q,alpha,upper,calibrated_level,eta,beta,xi,zeta,b1,b2,b3,"
        "seed\n";
  os << method_name(res.method) << "," << n << "," << format_double(q) << ","
     << format_double(alpha) << "," << format_double(res.upper) << ",";
  if (res.calibrated_level) os << format_double(*res.calibrated_level);
  os << "," << format_double(res.bandwidths.eta) << ","
     << format_double(res.bandwidths.beta) << ","
     << format_double(res.bandwidths.xi) << ","
     << format_double(res.bandwidths.zeta) << "," << res.mc_sizes.b_first
     << "," << res.mc_sizes.b_outer << "," << res.mc_sizes.b_inner << ","
     << seed << "\n";
  return os.str();
}

int cmd_interval(const IntervalArgs& args) {
  auto method = method_from_name(args.method);
  if (!method) throw ConfigError("unknown method: " + args.method);

  std::vector<double> data = read_data_file(args.data);
  Sample sample(std::move(data));
  const std::size_t n = sample.size();

  Bandwidths bw = default_bandwidths(*method, n);
  if (args.eta > 0) bw.eta = args.eta;
  if (args.beta > 0) bw.beta = args.beta;
  if (args.xi > 0) bw.xi = args.xi;
  if (args.zeta > 0) bw.zeta = args.zeta;

  BootstrapPlan plan;
  plan.b_first = args.b1;
  plan.b_outer = args.b2;
  plan.b_inner = args.b3;
  plan.seed = args.seed;
  plan.q = args.q;
  plan.alpha = args.alpha;
  plan.share_batches = !args.no_share;
  plan.workers = args.workers;
  if (args.unit_variance_kernel) {
    plan.kernel = rescale_to_unit_variance(plan.kernel);
    plan.kernel_h = rescale_to_unit_variance(plan.kernel_h);
  }

  SmoothedRootCenter center = SmoothedRootCenter::eta_smoothed;
  if (args.i1k_center == "zeta")
    center = SmoothedRootCenter::zeta_smoothed;
  else if (args.i1k_center != "eta")
    throw ConfigError("--i1k-center must be eta or zeta");

  plan.progress = [](std::size_t done, std::size_t total) {
    if (done % 50 == 0 || done == total)
      std::cerr << "\router replicate " << done << "/" << total << std::flush;
    if (done == total) std::cerr << "\n";
  };

  auto t0 = std::chrono::steady_clock::now();
  IntervalResult res = fit_method(*method, sample, bw, plan, center)
                           .at(args.alpha);
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  std::cout << interval_record_text(res, n, args.q, args.alpha, args.seed);
  std::cerr << "elapsed_seconds = " << elapsed << "\n";

  if (!args.out.empty()) {
    if (args.format == "json")
      write_file(args.out,
                 interval_record_json(res, n, args.q, args.alpha, args.seed)
                         .dump(2) +
                     "\n");
    else if (args.format == "csv")
      write_file(args.out,
                 interval_record_csv(res, n, args.q, args.alpha, args.seed));
    else
      throw ConfigError("--format must be csv or json");
  }
  return 0;
}

struct SelectArgs {
  std::string data;
  std::string method = "i1";
  double q = 0.5;
  double alpha = 0.05;
  double mult = 1.5;
  int outermost = 500;
  int b_build = 500;
  int grid_points = 20;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string format = "csv";
  std::string out;
};

int cmd_select(const SelectArgs& args) {
  auto method = method_from_name(args.method);
  if (!method) throw ConfigError("unknown method: " + args.method);
  Sample sample(read_data_file(args.data));

  SelectionConfig cfg;
  cfg.method = *method;
  cfg.q = args.q;
  cfg.alpha = args.alpha;
  cfg.multiplier = args.mult;
  cfg.n_outermost = args.outermost;
  cfg.b_build = args.b_build;
  cfg.grid_points = args.grid_points;

  BootstrapPlan plan;
  plan.seed = args.seed;
  plan.q = args.q;
  plan.workers = args.workers;

  auto t0 = std::chrono::steady_clock::now();
  SelectionResult res = select_bandwidths(sample, cfg, plan);
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  std::ostringstream params;
  params << "select;method=" << args.method << ";q=" << format_double(args.q)
         << ";alpha=" << format_double(args.alpha)
         << ";mult=" << format_double(args.mult)
         << ";outermost=" << args.outermost << ";b_build=" << args.b_build
         << ";grid_points=" << args.grid_points << ";seed=" << args.seed;
  std::string config_hash = fnv1a64_hex(params.str());

  auto roles = method_roles(*method);
  std::ostringstream csv;
  csv << "# qboot " << kVersion << " seed=" << args.seed
      << " config_hash=" << config_hash << "\n";
  for (std::size_t r = 0; r < roles.size(); ++r)
    csv << (r ? "," : "") << role_name(roles[r]);
  csv << ",coverage\n";
  auto bw_of = [&](const Bandwidths& bw, BandwidthRole role) {
    switch (role) {
      case BandwidthRole::outer_beta: return bw.beta;
      case BandwidthRole::inner_eta: return bw.eta;
      case BandwidthRole::studentize_xi: return bw.xi;
    }
    return 0.0;
  };
  for (const auto& entry : res.table) {
    for (std::size_t r = 0; r < roles.size(); ++r)
      csv << (r ? "," : "") << format_double(bw_of(entry.bandwidths, roles[r]));
    csv << "," << format_double(entry.coverage) << "\n";
  }

  std::cout << "version = " << kVersion << "\n";
  std::cout << "method = " << args.method << "\n";
  std::cout << "config_hash = " << config_hash << "\n";
  std::cout << "gamma = " << format_double(res.gamma) << "\n";
  std::cout << "pseudo_true = " << format_double(res.pseudo_true) << "\n";
  for (auto role : roles)
    std::cout << "chosen_" << role_name(role) << " = "
              << format_double(bw_of(res.chosen, role)) << "\n";
  std::cout << "chosen_coverage = " << format_double(res.chosen_coverage)
            << "\n";
  std::cout << csv.str();
  std::cerr << "elapsed_seconds = " << elapsed << "\n";

  if (!args.out.empty()) {
    if (args.format == "csv") {
      write_file(args.out, csv.str());
    } else if (args.format == "json") {
      nlohmann::json j;
      j["version"] = kVersion;
      j["method"] = args.method;
      j["config_hash"] = config_hash;
      j["gamma"] = res.gamma;
      j["pseudo_true"] = res.pseudo_true;
      j["seed"] = args.seed;
      nlohmann::json chosen;
      for (auto role : roles) chosen[role_name(role)] = bw_of(res.chosen, role);
      j["chosen"] = chosen;
      j["chosen_coverage"] = res.chosen_coverage;
      nlohmann::json table = nlohmann::json::array();
      for (const auto& entry : res.table) {
        nlohmann::json row;
        for (auto role : roles)
          row[role_name(role)] = bw_of(entry.bandwidths, role);
        row["coverage"] = entry.coverage;
        table.push_back(row);
      }
      j["table"] = table;
      write_file(args.out, j.dump(2) + "\n");
    } else {
      throw ConfigError("--format must be csv or json");
    }
  }
  return 0;
}

struct StudyArgs {
  std::string config;
  std::string out = "study";
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

int cmd_study(const StudyArgs& args) {
  std::ifstream in(args.config);
  if (!in) throw ConfigError("cannot open config file: " + args.config);
  std::stringstream buf;
  buf << in.rdbuf();
  StudyConfig cfg = study_config_from_text(buf.str());
  if (args.seed) cfg.seed = *args.seed;
  if (args.workers) cfg.workers = *args.workers;
  cfg.progress = [](std::size_t done, std::size_t total) {
    if (done == total || done % 25 == 0)
      std::cerr << "\rreplication " << done << "/" << total << std::flush;
  };

  auto t0 = std::chrono::steady_clock::now();
  CoverageReport report = run_coverage_study(cfg);
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::cerr << "\n";
  report.runtime_seconds = elapsed;

  std::string csv_path = args.out + ".csv";
  std::string json_path = args.out + ".json";
  std::string manifest_path = args.out + "_manifest.json";
  write_file(csv_path, report_to_csv(report));
  write_file(json_path, report_to_json(report).dump(2) + "\n");
  write_file(manifest_path,
             run_manifest(report, {csv_path, json_path}, elapsed));

  // Human-facing summary, 4 decimals.
  std::cout << "model=" << model_name(cfg.model) << " n=" << cfg.n
            << " q=" << format_double(cfg.q)
            << " replications=" << cfg.replications << " seed=" << cfg.seed
            << "\n";
  char line[160];
  std::snprintf(line, sizeof(line), "%-6s %-8s %-10s %-10s %-12s %-12s",
                "method", "alpha", "coverage", "se", "mean_len", "var_len");
  std::cout << line << "\n";
  for (const auto& stat : report.one_sided) {
    std::snprintf(line, sizeof(line), "%-6s %-8.4f %-10.4f %-10.4f %-12s %-12s",
                  method_name(stat.method).c_str(), stat.alpha, stat.coverage,
                  stat.se, "", "");
    std::cout << line << "\n";
  }
  for (const auto& stat : report.two_sided) {
    std::snprintf(line, sizeof(line),
                  "%-6s %-8.4f %-10.4f %-10.4f %-12.4f %-12.4f",
                  method_name(stat.method).c_str(),
                  1.0 - (stat.alpha_hi - stat.alpha_lo), stat.coverage,
                  stat.se, stat.mean_length, stat.var_length);
    std::cout << line << "\n";
  }
  if (report.failed_replications > 0)
    std::cout << "failed_replications = " << report.failed_replications
              << (report.failure_flag ? " (FLAGGED: > 1%)" : "") << "\n";
  std::cout << "wrote " << csv_path << " " << json_path << " " << manifest_path
            << "\n";
  return 0;
}

struct ErrorTermArgs {
  std::string model = "std_normal";
  double q = 0.5;
  double alpha = 0.05;
  long long n = 100;
};

int cmd_error_term(const ErrorTermArgs& args) {
  auto model = model_from_name(args.model);
  if (!model) throw ConfigError("unknown model: " + args.model);
  if (args.n < 1) throw ConfigError("--n must be >= 1");
  double xq = true_quantile(*model, args.q);
  double f = model_pdf(*model, xq);
  double fp = model_pdf_derivative(*model, xq);
  double term = eq1_error_term(f, fp, args.q, args.alpha);
  double predicted =
      1.0 - args.alpha + term / std::sqrt(static_cast<double>(args.n));
  std::cout << "model = " << model_name(*model) << "\n";
  std::cout << "q = " << format_double(args.q) << "\n";
  std::cout << "alpha = " << format_double(args.alpha) << "\n";
  std::cout << "n = " << args.n << "\n";
  std::cout << "f_at_quantile = " << format_double(f) << "\n";
  std::cout << "f_prime_at_quantile = " << format_double(fp) << "\n";
  std::cout << "error_term = " << format_double(term) << "\n";
  std::cout << "predicted_coverage = " << format_double(predicted) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"smoothed and iterated bootstrap confidence intervals for "
               "population quantiles"};
  app.set_version_flag("--version", qboot::kVersion);
  app.require_subcommand(1);

  IntervalArgs ia;
  auto* interval = app.add_subcommand(
      "interval", "build one confidence interval from a data file");
  interval->add_option("--data", ia.data, "data file, one value per line (path:N for CSV column N)")
      ->required();
  interval->add_option("--method", ia.method, "i1|i2|i3|i4|i1k");
  interval->add_option("--q", ia.q, "quantile level");
  interval->add_option("--alpha", ia.alpha, "alpha (nominal level 1-alpha)");
  interval->add_option("--eta", ia.eta, "inner/first-level bandwidth override");
  interval->add_option("--beta", ia.beta, "outer-level bandwidth override");
  interval->add_option("--xi", ia.xi, "Studentization bandwidth override");
  interval->add_option("--zeta", ia.zeta, "quantile-smoothing bandwidth (i1k)");
  interval->add_option("--b1", ia.b1, "first-level replicates");
  interval->add_option("--b2", ia.b2, "outer-level replicates");
  interval->add_option("--b3", ia.b3, "inner-level replicates");
  interval->add_option("--seed", ia.seed, "RNG seed");
  interval->add_option("--workers", ia.workers, "worker threads");
  interval->add_option("--format", ia.format, "output format: csv|json");
  interval->add_option("--out", ia.out, "output file");
  interval->add_flag("--no-share", ia.no_share,
                     "disable batch sharing across bandwidth levels");
  interval->add_flag("--unit-variance-kernel", ia.unit_variance_kernel,
                     "rescale the kernel to unit second moment");
  interval->add_option("--i1k-center", ia.i1k_center,
                       "root center for i1k: eta|zeta");

  SelectArgs sa;
  auto* select = app.add_subcommand(
      "select", "bandwidth selection by the outermost bootstrap");
  select->add_option("--data", sa.data, "data file")->required();
  select->add_option("--method", sa.method, "i1|i2|i3|i4");
  select->add_option("--q", sa.q, "quantile level");
  select->add_option("--alpha", sa.alpha, "alpha the selection targets");
  select->add_option("--mult", sa.mult, "outermost bandwidth multiplier M");
  select->add_option("--outermost", sa.outermost, "outermost sample count");
  select->add_option("--b-build", sa.b_build, "replicates per interval build");
  select->add_option("--grid-points", sa.grid_points, "grid points per role");
  select->add_option("--seed", sa.seed, "RNG seed");
  select->add_option("--workers", sa.workers, "worker threads");
  select->add_option("--format", sa.format, "output format: csv|json");
  select->add_option("--out", sa.out, "output file");

  StudyArgs sta;
  auto* study = app.add_subcommand(
      "study", "run a coverage study from a config file");
  study->add_option("--config", sta.config, "flat key = value config file")
      ->required();
  study->add_option("--out", sta.out, "output path prefix");
  std::uint64_t study_seed = 0;
  auto* seed_opt =
      study->add_option("--seed", study_seed, "override config seed");
  int study_workers = 0;
  auto* workers_opt =
      study->add_option("--workers", study_workers, "override config workers");

  ErrorTermArgs ea;
  auto* error_term = app.add_subcommand(
      "error-term", "analytic leading-term coverage prediction for i1");
  error_term->add_option("--model", ea.model,
                         "std_normal|double_exponential_unit|std_lognormal");
  error_term->add_option("--q", ea.q, "quantile level");
  error_term->add_option("--alpha", ea.alpha, "alpha");
  error_term->add_option("--n", ea.n, "sample size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(interval)) return cmd_interval(ia);
    if (app.got_subcommand(select)) return cmd_select(sa);
    if (app.got_subcommand(study)) {
      if (*seed_opt) sta.seed = study_seed;
      if (*workers_opt) sta.workers = study_workers;
      return cmd_study(sta);
    }
    if (app.got_subcommand(error_term)) return cmd_error_term(ea);
  } catch (const qboot::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const qboot::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const qboot::DegenerateStudentizer& e) {
    std::cerr << "numerical degeneracy: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
