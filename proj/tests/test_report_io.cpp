#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "qboot/errors.hpp"
#include "qboot/flat_config.hpp"
#include "qboot/report_io.hpp"
#include "qboot/study.hpp"

using namespace qboot;

namespace {

CoverageReport small_report() {
  StudyConfig cfg;
  cfg.model = DataModel::std_lognormal;
  cfg.n = 9;
  cfg.q = 0.75;
  cfg.alphas = {0.05, 0.95};
  cfg.two_sided_pairs = {{0.05, 0.95}};
  cfg.methods = {Method::i1, Method::i3};
  cfg.replications = 16;
  cfg.plan.b_first = 40;
  cfg.plan.b_outer = 10;
  cfg.plan.b_inner = 8;
  cfg.seed = 99;
  return run_coverage_study(cfg);
}

}  // namespace

TEST_CASE("format_double round-trips exactly") {
  for (double v : {0.1, 1.0 / 3.0, 12345.6789, -2.5e-7, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("flat config parsing") {
  FlatConfig cfg = FlatConfig::parse(
      "a = 1\n# comment\n b = two \nflag = true\nx = 2.5 # trailing\n");
  CHECK(cfg.get_int("a", 0) == 1);
  CHECK(cfg.get_string("b", "") == "two");
  CHECK(cfg.get_bool("flag", false));
  CHECK(cfg.get_double("x", 0) == 2.5);
  CHECK(cfg.get_double("missing", -1.0) == -1.0);
  auto bad = cfg.unknown_keys({"a", "b", "x"});
  REQUIRE(bad.size() == 1);
  CHECK(bad[0] == "flag");
  CHECK_THROWS_AS(FlatConfig::parse("novalue\n"), ConfigError);
  CHECK_THROWS_AS(cfg.get_int("b", 0), ConfigError);
}

TEST_CASE("study config round-trips through flat text") {
  StudyConfig cfg;
  cfg.model = DataModel::double_exponential_unit;
  cfg.n = 30;
  cfg.q = 0.75;
  cfg.alphas = {0.05, 0.1, 0.9, 0.95};
  cfg.two_sided_pairs = {{0.05, 0.95}, {0.1, 0.9}};
  cfg.methods = {Method::i2, Method::i4};
  cfg.replications = 500;
  cfg.plan.b_first = 777;
  cfg.plan.b_outer = 111;
  cfg.plan.b_inner = 222;
  cfg.plan.share_batches = false;
  cfg.overrides.eta = 0.3;
  cfg.seed = 31337;

  std::string text = study_config_to_text(cfg);
  StudyConfig back = study_config_from_text(text);
  CHECK(study_config_to_text(back) == text);
  CHECK(study_config_hash(back) == study_config_hash(cfg));

  CHECK_THROWS_WITH_AS(study_config_from_text("bogus_key = 1\n"),
                       doctest::Contains("bogus_key"), ConfigError);
  CHECK_THROWS_AS(study_config_from_text("methods = i9\n"), ConfigError);
}

TEST_CASE("CSV round trip is byte-stable") {
  CoverageReport report = small_report();
  std::string csv = report_to_csv(report);
  CoverageReport back = report_from_csv(csv);
  CHECK(report_to_csv(back) == csv);
  REQUIRE(back.one_sided.size() == report.one_sided.size());
  for (std::size_t i = 0; i < back.one_sided.size(); ++i) {
    CHECK(back.one_sided[i].coverage == report.one_sided[i].coverage);
    CHECK(back.one_sided[i].se == report.one_sided[i].se);
  }
  REQUIRE(back.two_sided.size() == report.two_sided.size());
  for (std::size_t i = 0; i < back.two_sided.size(); ++i) {
    CHECK(back.two_sided[i].mean_length == report.two_sided[i].mean_length);
    CHECK(back.two_sided[i].var_length == report.two_sided[i].var_length);
    // pairs reconstruct symmetrically, to the last bit or two
    CHECK(std::abs(back.two_sided[i].alpha_lo - report.two_sided[i].alpha_lo) <=
          1e-15);
    CHECK(std::abs(back.two_sided[i].alpha_hi - report.two_sided[i].alpha_hi) <=
          1e-15);
  }
}

TEST_CASE("JSON round trip preserves the full report") {
  CoverageReport report = small_report();
  nlohmann::json j = report_to_json(report);
  CoverageReport back = report_from_json(j);
  CHECK(reports_equal(report, back));
  CHECK(back.config_hash == report.config_hash);
  // indicators survive, so every aggregate is recomputable
  CHECK(back.one_sided[0].indicators == report.one_sided[0].indicators);
  CHECK(back.two_sided[0].lengths == report.two_sided[0].lengths);
  // runtime is deliberately not serialized
  CHECK(j.find("runtime_seconds") == j.end());
  CHECK(j.at("version").get<std::string>() == std::string("0.1.0"));
}

TEST_CASE("manifest embeds seed, hash and version") {
  CoverageReport report = small_report();
  std::string manifest = run_manifest(report, {"a.csv", "b.json"}, 1.25);
  nlohmann::json j = nlohmann::json::parse(manifest);
  CHECK(j.at("seed").get<std::uint64_t>() == 99);
  CHECK(j.at("config_hash").get<std::string>() ==
        study_config_hash(report.config));
  CHECK(j.at("version").get<std::string>() == std::string("0.1.0"));
  CHECK(j.at("outputs").size() == 2);
  // the embedded config text reproduces the exact configuration
  StudyConfig back =
      study_config_from_text(j.at("config_text").get<std::string>());
  CHECK(study_config_hash(back) == study_config_hash(report.config));
}
