#include "qboot/report_io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qboot/errors.hpp"
#include "qboot/flat_config.hpp"
#include "qboot/version.hpp"

namespace qboot {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s, const char* what) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw DataError(std::string("cannot parse ") + what + ": " + s);
  return v;
}

std::string indicators_to_string(const std::vector<std::uint8_t>& ind) {
  std::string s(ind.size(), '0');
  for (std::size_t i = 0; i < ind.size(); ++i)
    s[i] = static_cast<char>('0' + ind[i]);
  return s;
}

std::vector<std::uint8_t> indicators_from_string(const std::string& s) {
  std::vector<std::uint8_t> ind(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '2') throw DataError("bad indicator digest");
    ind[i] = static_cast<std::uint8_t>(s[i] - '0');
  }
  return ind;
}

}  // namespace

std::string study_config_to_text(const StudyConfig& cfg) {
  std::ostringstream os;
  os << "model = " << model_name(cfg.model) << "\n";
  os << "n = " << cfg.n << "\n";
  os << "q = " << format_double(cfg.q) << "\n";
  {
    os << "alphas = ";
    for (std::size_t i = 0; i < cfg.alphas.size(); ++i)
      os << (i ? "," : "") << format_double(cfg.alphas[i]);
    os << "\n";
  }
  {
    os << "two_sided = ";
    for (std::size_t i = 0; i < cfg.two_sided_pairs.size(); ++i)
      os << (i ? ";" : "") << format_double(cfg.two_sided_pairs[i].first)
         << ":" << format_double(cfg.two_sided_pairs[i].second);
    os << "\n";
  }
  {
    os << "methods = ";
    for (std::size_t i = 0; i < cfg.methods.size(); ++i)
      os << (i ? "," : "") << method_name(cfg.methods[i]);
    os << "\n";
  }
  os << "replications = " << cfg.replications << "\n";
  os << "b1 = " << cfg.plan.b_first << "\n";
  os << "b2 = " << cfg.plan.b_outer << "\n";
  os << "b3 = " << cfg.plan.b_inner << "\n";
  os << "share_batches = " << (cfg.plan.share_batches ? "true" : "false")
     << "\n";
  os << "eta = " << format_double(cfg.overrides.eta) << "\n";
  os << "beta = " << format_double(cfg.overrides.beta) << "\n";
  os << "xi = " << format_double(cfg.overrides.xi) << "\n";
  os << "zeta = " << format_double(cfg.overrides.zeta) << "\n";
  os << "seed = " << cfg.seed << "\n";
  return os.str();
}

StudyConfig study_config_from_text(const std::string& text) {
  FlatConfig flat = FlatConfig::parse(text);
  static const std::vector<std::string> allowed = {
      "model", "n", "q", "alphas", "two_sided", "methods", "replications",
      "b1", "b2", "b3", "share_batches", "eta", "beta", "xi", "zeta",
      "seed", "workers"};
  auto bad = flat.unknown_keys(allowed);
  if (!bad.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& k : bad) msg += " " + k;
    throw ConfigError(msg);
  }

  StudyConfig cfg;
  auto model = model_from_name(flat.get_string("model", "std_normal"));
  if (!model)
    throw ConfigError("unknown model: " + flat.get_string("model", ""));
  cfg.model = *model;
  long long n = flat.get_int("n", 15);
  if (n < 1) throw ConfigError("n must be >= 1");
  cfg.n = static_cast<std::size_t>(n);
  cfg.q = flat.get_double("q", 0.5);
  cfg.alphas.clear();
  for (const auto& a : split_list(flat.get_string("alphas", "0.05,0.95"), ','))
    cfg.alphas.push_back(parse_double(a, "alpha"));
  cfg.two_sided_pairs.clear();
  for (const auto& pair :
       split_list(flat.get_string("two_sided", "0.05:0.95"), ';')) {
    auto parts = split_list(pair, ':');
    if (parts.size() != 2)
      throw ConfigError("two_sided entries look like alpha_lo:alpha_hi");
    cfg.two_sided_pairs.emplace_back(parse_double(parts[0], "alpha_lo"),
                                     parse_double(parts[1], "alpha_hi"));
  }
  cfg.methods.clear();
  for (const auto& name :
       split_list(flat.get_string("methods", "i1,i2,i3,i4"), ',')) {
    auto m = method_from_name(name);
    if (!m) throw ConfigError("unknown method: " + name);
    cfg.methods.push_back(*m);
  }
  cfg.replications = static_cast<int>(flat.get_int("replications", 1000));
  cfg.plan.b_first = static_cast<int>(flat.get_int("b1", 1000));
  cfg.plan.b_outer = static_cast<int>(flat.get_int("b2", 1500));
  cfg.plan.b_inner = static_cast<int>(flat.get_int("b3", 1000));
  cfg.plan.share_batches = flat.get_bool("share_batches", true);
  cfg.overrides.eta = flat.get_double("eta", 0.0);
  cfg.overrides.beta = flat.get_double("beta", 0.0);
  cfg.overrides.xi = flat.get_double("xi", 0.0);
  cfg.overrides.zeta = flat.get_double("zeta", 0.0);
  cfg.seed = flat.get_uint64("seed", 0);
  cfg.workers = static_cast<int>(flat.get_int("workers", 1));
  return cfg;
}

std::string study_config_hash(const StudyConfig& cfg) {
  return fnv1a64_hex(study_config_to_text(cfg));
}

std::string report_to_csv(const CoverageReport& report) {
  std::ostringstream os;
  os << "# qboot " << kVersion << " seed=" << report.config.seed
     << " config_hash=" << report.config_hash << "\n";
  os << "method,alpha,coverage,se,mean_length,var_length,n,q,model,seed\n";
  auto tail = [&](std::ostringstream& row) {
    row << "," << report.config.n << "," << format_double(report.config.q)
        << "," << model_name(report.config.model) << "," << report.config.seed
        << "\n";
  };
  for (const auto& stat : report.one_sided) {
    std::ostringstream row;
    row << method_name(stat.method) << "," << format_double(stat.alpha) << ","
        << format_double(stat.coverage) << "," << format_double(stat.se)
        << ",,";
    tail(row);
    os << row.str();
  }
  for (const auto& stat : report.two_sided) {
    std::ostringstream row;
    double alpha = 1.0 - (stat.alpha_hi - stat.alpha_lo);
    row << method_name(stat.method) << "," << format_double(alpha) << ","
        << format_double(stat.coverage) << "," << format_double(stat.se) << ","
        << format_double(stat.mean_length) << ","
        << format_double(stat.var_length);
    tail(row);
    os << row.str();
  }
  return os.str();
}

CoverageReport report_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  CoverageReport report;
  while (std::getline(in, line) && !line.empty() && line[0] == '#') {
    auto pos = line.find("config_hash=");
    if (pos != std::string::npos)
      report.config_hash = line.substr(pos + 12);
  }
  if (line != "method,alpha,coverage,se,mean_length,var_length,n,q,model,seed")
    throw DataError("unrecognized CSV header");
  bool config_set = false;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
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
    if (cols.size() != 10)
      throw DataError("CSV line " + std::to_string(lineno) +
                      ": expected 10 columns");
    auto m = method_from_name(cols[0]);
    if (!m) throw DataError("CSV line " + std::to_string(lineno) +
                            ": unknown method " + cols[0]);
    double alpha = parse_double(cols[1], "alpha");
    double coverage = parse_double(cols[2], "coverage");
    double se = parse_double(cols[3], "se");
    if (!config_set) {
      report.config.n = static_cast<std::size_t>(
          std::llround(parse_double(cols[6], "n")));
      report.config.q = parse_double(cols[7], "q");
      auto model = model_from_name(cols[8]);
      if (!model) throw DataError("unknown model in CSV: " + cols[8]);
      report.config.model = *model;
      report.config.seed = static_cast<std::uint64_t>(
          std::llround(parse_double(cols[9], "seed")));
      report.config.alphas.clear();
      report.config.two_sided_pairs.clear();
      report.config.methods.clear();
      config_set = true;
    }
    if (cols[4].empty() && cols[5].empty()) {
      OneSidedStat stat;
      stat.method = *m;
      stat.alpha = alpha;
      stat.coverage = coverage;
      stat.se = se;
      report.one_sided.push_back(std::move(stat));
    } else {
      TwoSidedStat stat;
      stat.method = *m;
      // Symmetric reconstruction of the pair from the row's nominal level;
      // exact for the symmetric pairs the study uses.
      double a = 1.0 - alpha;
      stat.alpha_lo = (1.0 - a) / 2.0;
      stat.alpha_hi = 1.0 - (1.0 - a) / 2.0;
      stat.coverage = coverage;
      stat.se = se;
      stat.mean_length = parse_double(cols[4], "mean_length");
      stat.var_length = parse_double(cols[5], "var_length");
      report.two_sided.push_back(std::move(stat));
    }
  }
  return report;
}

json report_to_json(const CoverageReport& report) {
  json j;
  j["version"] = kVersion;
  j["seed"] = report.config.seed;
  j["config_hash"] = report.config_hash.empty()
                         ? study_config_hash(report.config)
                         : report.config_hash;
  json cfg;
  cfg["model"] = model_name(report.config.model);
  cfg["n"] = report.config.n;
  cfg["q"] = report.config.q;
  cfg["alphas"] = report.config.alphas;
  json pairs = json::array();
  for (auto [lo, hi] : report.config.two_sided_pairs)
    pairs.push_back({lo, hi});
  cfg["two_sided_pairs"] = pairs;
  json methods = json::array();
  for (auto m : report.config.methods) methods.push_back(method_name(m));
  cfg["methods"] = methods;
  cfg["replications"] = report.config.replications;
  cfg["b1"] = report.config.plan.b_first;
  cfg["b2"] = report.config.plan.b_outer;
  cfg["b3"] = report.config.plan.b_inner;
  cfg["share_batches"] = report.config.plan.share_batches;
  cfg["overrides"] = {{"eta", report.config.overrides.eta},
                      {"beta", report.config.overrides.beta},
                      {"xi", report.config.overrides.xi},
                      {"zeta", report.config.overrides.zeta}};
  j["config"] = cfg;

  json one = json::array();
  for (const auto& stat : report.one_sided) {
    std::string ind = indicators_to_string(stat.indicators);
    one.push_back({{"method", method_name(stat.method)},
                   {"alpha", stat.alpha},
                   {"coverage", stat.coverage},
                   {"se", stat.se},
                   {"indicators", ind},
                   {"digest", fnv1a64_hex(ind)}});
  }
  j["one_sided"] = one;

  json two = json::array();
  for (const auto& stat : report.two_sided) {
    std::string ind = indicators_to_string(stat.indicators);
    two.push_back({{"method", method_name(stat.method)},
                   {"alpha_lo", stat.alpha_lo},
                   {"alpha_hi", stat.alpha_hi},
                   {"coverage", stat.coverage},
                   {"se", stat.se},
                   {"mean_length", stat.mean_length},
                   {"var_length", stat.var_length},
                   {"indicators", ind},
                   {"digest", fnv1a64_hex(ind)},
                   {"lengths", stat.lengths}});
  }
  j["two_sided"] = two;
  j["failed_replications"] = report.failed_replications;
  j["failure_flag"] = report.failure_flag;
  return j;
}

CoverageReport report_from_json(const json& j) {
  CoverageReport report;
  const json& cfg = j.at("config");
  auto model = model_from_name(cfg.at("model").get<std::string>());
  if (!model) throw DataError("unknown model in JSON report");
  report.config.model = *model;
  report.config.n = cfg.at("n").get<std::size_t>();
  report.config.q = cfg.at("q").get<double>();
  report.config.alphas = cfg.at("alphas").get<std::vector<double>>();
  report.config.two_sided_pairs.clear();
  for (const auto& p : cfg.at("two_sided_pairs"))
    report.config.two_sided_pairs.emplace_back(p.at(0).get<double>(),
                                               p.at(1).get<double>());
  report.config.methods.clear();
  for (const auto& name : cfg.at("methods")) {
    auto m = method_from_name(name.get<std::string>());
    if (!m) throw DataError("unknown method in JSON report");
    report.config.methods.push_back(*m);
  }
  report.config.replications = cfg.at("replications").get<int>();
  report.config.plan.b_first = cfg.at("b1").get<int>();
  report.config.plan.b_outer = cfg.at("b2").get<int>();
  report.config.plan.b_inner = cfg.at("b3").get<int>();
  report.config.plan.share_batches = cfg.at("share_batches").get<bool>();
  report.config.overrides.eta = cfg.at("overrides").at("eta").get<double>();
  report.config.overrides.beta = cfg.at("overrides").at("beta").get<double>();
  report.config.overrides.xi = cfg.at("overrides").at("xi").get<double>();
  report.config.overrides.zeta = cfg.at("overrides").at("zeta").get<double>();
  report.config.seed = j.at("seed").get<std::uint64_t>();
  report.config_hash = j.at("config_hash").get<std::string>();

  for (const auto& e : j.at("one_sided")) {
    OneSidedStat stat;
    auto m = method_from_name(e.at("method").get<std::string>());
    if (!m) throw DataError("unknown method in JSON report");
    stat.method = *m;
    stat.alpha = e.at("alpha").get<double>();
    stat.coverage = e.at("coverage").get<double>();
    stat.se = e.at("se").get<double>();
    stat.indicators =
        indicators_from_string(e.at("indicators").get<std::string>());
    report.one_sided.push_back(std::move(stat));
  }
  for (const auto& e : j.at("two_sided")) {
    TwoSidedStat stat;
    auto m = method_from_name(e.at("method").get<std::string>());
    if (!m) throw DataError("unknown method in JSON report");
    stat.method = *m;
    stat.alpha_lo = e.at("alpha_lo").get<double>();
    stat.alpha_hi = e.at("alpha_hi").get<double>();
    stat.coverage = e.at("coverage").get<double>();
    stat.se = e.at("se").get<double>();
    stat.mean_length = e.at("mean_length").get<double>();
    stat.var_length = e.at("var_length").get<double>();
    stat.indicators =
        indicators_from_string(e.at("indicators").get<std::string>());
    stat.lengths = e.at("lengths").get<std::vector<double>>();
    report.two_sided.push_back(std::move(stat));
  }
  report.failed_replications = j.at("failed_replications").get<int>();
  report.failure_flag = j.at("failure_flag").get<bool>();
  return report;
}

bool reports_equal(const CoverageReport& a, const CoverageReport& b) {
  if (study_config_to_text(a.config) != study_config_to_text(b.config))
    return false;
  if (a.config_hash != b.config_hash) return false;
  if (a.one_sided.size() != b.one_sided.size() ||
      a.two_sided.size() != b.two_sided.size())
    return false;
  for (std::size_t i = 0; i < a.one_sided.size(); ++i) {
    const auto& x = a.one_sided[i];
    const auto& y = b.one_sided[i];
    if (x.method != y.method || x.alpha != y.alpha ||
        x.coverage != y.coverage || x.se != y.se ||
        x.indicators != y.indicators)
      return false;
  }
  for (std::size_t i = 0; i < a.two_sided.size(); ++i) {
    const auto& x = a.two_sided[i];
    const auto& y = b.two_sided[i];
    if (x.method != y.method || x.alpha_lo != y.alpha_lo ||
        x.alpha_hi != y.alpha_hi || x.coverage != y.coverage || x.se != y.se ||
        x.mean_length != y.mean_length || x.var_length != y.var_length ||
        x.indicators != y.indicators || x.lengths != y.lengths)
      return false;
  }
  return a.failed_replications == b.failed_replications &&
         a.failure_flag == b.failure_flag;
}

std::string run_manifest(const CoverageReport& report,
                         const std::vector<std::string>& outputs,
                         double elapsed_seconds) {
  json j;
  j["version"] = kVersion;
  j["seed"] = report.config.seed;
  j["config_hash"] = report.config_hash.empty()
                         ? study_config_hash(report.config)
                         : report.config_hash;
  j["config_text"] = study_config_to_text(report.config);
  j["workers"] = report.config.workers;
  j["elapsed_seconds"] = elapsed_seconds;
  j["failed_replications"] = report.failed_replications;
  j["outputs"] = outputs;
  return j.dump(2) + "\n";
}

}  // namespace qboot
