// End-to-end checks of the command-line tool. The binary path comes from the
// QBOOT_BIN environment variable (set by ctest).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const char* bin = std::getenv("QBOOT_BIN");
  REQUIRE(bin != nullptr);
  std::string cmd = std::string(bin) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult res;
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    res.out.append(buf.data(), got);
  int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string field(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  std::string prefix = key + " = ";
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
  return "";
}

fs::path make_data_file(int n, const std::string& name) {
  fs::path path = fs::temp_directory_path() / name;
  std::ofstream out(path);
  for (int i = 1; i <= n; ++i) out << (0.37 * i - 2.0) << "\n";
  return path;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("interval subcommand: record fields and determinism") {
  fs::path data = make_data_file(15, "qboot_cli_data.txt");
  std::string args = "interval --data " + data.string() +
                     " --method i1 --q 0.5 --alpha 0.05 --b1 200 --seed 7";
  RunResult a = run(args);
  REQUIRE(a.exit_code == 0);
  CHECK(field(a.out, "method") == "i1");
  CHECK(field(a.out, "version") == "0.1.0");
  CHECK(!field(a.out, "config_hash").empty());
  CHECK(field(a.out, "n") == "15");
  CHECK(field(a.out, "nominal") == "0.95");
  CHECK(!field(a.out, "upper").empty());
  CHECK(!field(a.out, "eta").empty());

  RunResult b = run(args);
  CHECK(a.out == b.out);  // byte-identical rerun
}

TEST_CASE("interval subcommand: i4 default bandwidths") {
  fs::path data = make_data_file(15, "qboot_cli_data_i4.txt");
  RunResult r = run("interval --data " + data.string() +
                    " --method i4 --b1 50 --b2 20 --b3 10 --seed 3");
  REQUIRE(r.exit_code == 0);
  CHECK(std::stod(field(r.out, "beta")) ==
        doctest::Approx(std::pow(15.0, -2.0 / 19.0)).epsilon(1e-12));
  CHECK(std::stod(field(r.out, "eta")) ==
        doctest::Approx(std::pow(15.0, -11.0 / 57.0)).epsilon(1e-12));
  CHECK(std::stod(field(r.out, "xi")) ==
        doctest::Approx(std::pow(15.0, -1.0 / 2.0)).epsilon(1e-12));
  CHECK(!field(r.out, "calibrated_level").empty());
}

TEST_CASE("exit codes: config, data, missing column") {
  fs::path data = make_data_file(10, "qboot_cli_codes.txt");
  CHECK(run("interval --data " + data.string() + " --method i9").exit_code == 2);
  CHECK(run("interval --data /nonexistent/file.txt").exit_code == 3);

  fs::path bad = fs::temp_directory_path() / "qboot_cli_bad.txt";
  {
    std::ofstream out(bad);
    out << "1.5\n2.5\nnot_a_number\n";
  }
  CHECK(run("interval --data " + bad.string()).exit_code == 3);
  // unknown flag is a usage error
  CHECK(run("interval --data " + data.string() + " --frobnicate").exit_code == 2);
}

TEST_CASE("CSV column selector") {
  fs::path csv = fs::temp_directory_path() / "qboot_cli_cols.csv";
  {
    std::ofstream out(csv);
    for (int i = 1; i <= 12; ++i) out << "x," << (0.25 * i) << ",y\n";
  }
  RunResult r = run("interval --data " + csv.string() +
                    ":2 --method i1 --b1 50 --seed 1");
  CHECK(r.exit_code == 0);
  RunResult miss = run("interval --data " + csv.string() + ":7 --method i1");
  CHECK(miss.exit_code == 3);
}

TEST_CASE("select subcommand emits the grid table") {
  fs::path data = make_data_file(12, "qboot_cli_select.txt");
  RunResult r = run("select --data " + data.string() +
                    " --method i1 --grid-points 4 --outermost 10 "
                    "--b-build 20 --seed 5");
  REQUIRE(r.exit_code == 0);
  CHECK(!field(r.out, "chosen_eta").empty());
  CHECK(!field(r.out, "gamma").empty());
  // 4 grid rows plus the eta,coverage header
  CHECK(r.out.find("eta,coverage") != std::string::npos);
  int rows = 0;
  std::istringstream in(r.out);
  std::string line;
  bool in_table = false;
  while (std::getline(in, line)) {
    if (line.rfind("eta,coverage", 0) == 0) {
      in_table = true;
      continue;
    }
    if (in_table && !line.empty()) ++rows;
  }
  CHECK(rows == 4);
}

TEST_CASE("study subcommand writes csv, json and manifest") {
  fs::path cfg = fs::temp_directory_path() / "qboot_cli_study.cfg";
  {
    std::ofstream out(cfg);
    out << "model = std_normal\nn = 9\nq = 0.5\nalphas = 0.05,0.95\n"
        << "two_sided = 0.05:0.95\nmethods = i1\nreplications = 4\n"
        << "b1 = 30\nb2 = 8\nb3 = 6\nseed = 12\n";
  }
  fs::path prefix = fs::temp_directory_path() / "qboot_cli_study_out";
  RunResult r = run("study --config " + cfg.string() + " --out " +
                    prefix.string());
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(prefix.string() + ".csv"));
  CHECK(fs::exists(prefix.string() + ".json"));
  CHECK(fs::exists(prefix.string() + "_manifest.json"));

  std::string csv = slurp(prefix.string() + ".csv");
  // provenance comment + header + 2 one-sided rows + 1 two-sided row
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(csv.rfind("# qboot", 0) == 0);

  // rerun with more workers: identical artifacts
  fs::path prefix2 = fs::temp_directory_path() / "qboot_cli_study_out2";
  RunResult r2 = run("study --config " + cfg.string() + " --out " +
                     prefix2.string() + " --workers 4");
  REQUIRE(r2.exit_code == 0);
  CHECK(slurp(prefix.string() + ".csv") == slurp(prefix2.string() + ".csv"));
  CHECK(slurp(prefix.string() + ".json") == slurp(prefix2.string() + ".json"));

  // unknown config keys are rejected with exit code 2
  fs::path badcfg = fs::temp_directory_path() / "qboot_cli_bad.cfg";
  {
    std::ofstream out(badcfg);
    out << "model = std_normal\nnot_a_key = 3\n";
  }
  CHECK(run("study --config " + badcfg.string()).exit_code == 2);
}

TEST_CASE("error-term subcommand") {
  RunResult r = run("error-term --model std_normal --q 0.5 --alpha 0.05 --n 100");
  REQUIRE(r.exit_code == 0);
  // normal at its median: zero coefficient, exactly the nominal level
  CHECK(std::stod(field(r.out, "predicted_coverage")) == 0.95);

  RunResult mid = run("error-term --model std_lognormal --q 0.5 --alpha 0.5 --n 50");
  REQUIRE(mid.exit_code == 0);
  CHECK(std::stod(field(mid.out, "predicted_coverage")) == 0.5);

  RunResult ln = run("error-term --model std_lognormal --q 0.5 --alpha 0.05 --n 100");
  REQUIRE(ln.exit_code == 0);
  double term = std::stod(field(ln.out, "error_term"));
  CHECK(term < 0.0);
  CHECK(std::stod(field(ln.out, "predicted_coverage")) ==
        doctest::Approx(0.95 + 0.1 * term).epsilon(1e-12));
}

TEST_CASE("select uses a 20-point grid by default") {
  fs::path data = make_data_file(15, "qboot_cli_grid20.txt");
  RunResult r = run("select --data " + data.string() +
                    " --method i1 --outermost 6 --b-build 10 --seed 2");
  REQUIRE(r.exit_code == 0);
  int rows = 0;
  std::istringstream in(r.out);
  std::string line;
  bool in_table = false;
  while (std::getline(in, line)) {
    if (line.rfind("eta,coverage", 0) == 0) {
      in_table = true;
      continue;
    }
    if (in_table && !line.empty()) ++rows;
  }
  CHECK(rows == 20);
}

TEST_CASE("rerunning from the manifest reproduces the artifacts") {
  fs::path cfg = fs::temp_directory_path() / "qboot_cli_manifest.cfg";
  {
    std::ofstream out(cfg);
    out << "model = std_lognormal\nn = 8\nq = 0.5\nalphas = 0.05,0.95\n"
        << "two_sided = 0.05:0.95\nmethods = i1,i3\nreplications = 5\n"
        << "b1 = 40\nb2 = 10\nb3 = 8\nseed = 77\n";
  }
  fs::path p1 = fs::temp_directory_path() / "qboot_cli_m1";
  REQUIRE(run("study --config " + cfg.string() + " --out " + p1.string())
              .exit_code == 0);

  // extract config_text from the manifest and rerun from it
  std::string manifest = slurp(p1.string() + "_manifest.json");
  auto key = manifest.find("\"config_text\"");
  REQUIRE(key != std::string::npos);
  auto colon = manifest.find(':', key);
  auto open = manifest.find('"', colon + 1);
  auto close = manifest.find("\",", open + 1);
  std::string escaped = manifest.substr(open + 1, close - open - 1);
  std::string text;
  for (std::size_t i = 0; i < escaped.size(); ++i) {
    if (escaped[i] == '\\' && i + 1 < escaped.size() && escaped[i + 1] == 'n') {
      text += '\n';
      ++i;
    } else {
      text += escaped[i];
    }
  }
  fs::path cfg2 = fs::temp_directory_path() / "qboot_cli_manifest2.cfg";
  {
    std::ofstream out(cfg2);
    out << text;
  }
  fs::path p2 = fs::temp_directory_path() / "qboot_cli_m2";
  REQUIRE(run("study --config " + cfg2.string() + " --out " + p2.string())
              .exit_code == 0);
  CHECK(slurp(p1.string() + ".csv") == slurp(p2.string() + ".csv"));
  CHECK(slurp(p1.string() + ".json") == slurp(p2.string() + ".json"));
}

TEST_CASE("invalid parameter values exit with the config code") {
  fs::path data = make_data_file(10, "qboot_cli_params.txt");
  CHECK(run("interval --data " + data.string() + " --q 0").exit_code == 2);
  CHECK(run("interval --data " + data.string() + " --alpha 1.5").exit_code == 2);
  CHECK(run("interval --data " + data.string() + " --b1 0").exit_code == 2);
}
