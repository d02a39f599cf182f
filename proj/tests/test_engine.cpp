#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qboot/engine.hpp"
#include "qboot/smoothed.hpp"
#include "support.hpp"

using namespace qboot;

namespace {

Sample normal_sample(std::size_t n, std::uint64_t seed) {
  // uniform(-3, 3) data; engine mechanics do not care about the shape
  RngStream rng(seed, StreamKind::data, 0);
  std::vector<double> values(n);
  for (auto& v : values) v = rng.next_double() * 6.0 - 3.0;
  return Sample(std::move(values));
}

BootstrapPlan small_plan() {
  BootstrapPlan plan;
  plan.b_first = 64;
  plan.b_outer = 16;
  plan.b_inner = 8;
  plan.seed = 42;
  plan.q = 0.5;
  return plan;
}

}  // namespace

TEST_CASE("shared batch basics") {
  Kernel k = make_triangular_kernel();
  RngStream rng(1, StreamKind::shared_outer, 0);
  SharedBatch b = draw_shared_batch(1, k, rng);
  REQUIRE(b.indices.size() == 1);
  CHECK(b.indices[0] == 0);
  CHECK(std::abs(b.kernel_noise[0]) <= 1.0);

  RngStream r1(9, StreamKind::shared_outer, 3);
  RngStream r2(9, StreamKind::shared_outer, 3);
  SharedBatch b1 = draw_shared_batch(5, k, r1);
  SharedBatch b2 = draw_shared_batch(5, k, r2);
  CHECK(b1.indices == b2.indices);
  CHECK(b1.kernel_noise == b2.kernel_noise);
}

TEST_CASE("index frequencies are uniform") {
  Kernel k = make_triangular_kernel();
  const std::size_t n = 4;
  const int batches = 100000;
  std::vector<long> counts(n, 0);
  for (int b = 0; b < batches; ++b) {
    RngStream rng(123, StreamKind::shared_outer, static_cast<std::uint64_t>(b));
    SharedBatch batch = draw_shared_batch(n, k, rng);
    for (auto idx : batch.indices) ++counts[idx];
  }
  double total = static_cast<double>(batches) * n;
  double p = 1.0 / static_cast<double>(n);
  double sigma = std::sqrt(total * p * (1 - p));
  for (auto c : counts)
    CHECK(std::abs(static_cast<double>(c) - total * p) < 3.0 * sigma);
}

TEST_CASE("realize_resample by hand") {
  Sample s({0.0, 10.0});
  SharedBatch batch;
  batch.indices = {1, 0};  // second datum, then first
  batch.kernel_noise = {0.5, -0.5};
  Sample r = realize_resample(s, batch, 1.0);
  CHECK(r.values() == std::vector<double>{-0.5, 10.5});

  Sample plain = realize_resample(s, batch, 0.0);
  CHECK(plain.values() == std::vector<double>{0.0, 10.0});
}

TEST_CASE("one batch realized at two bandwidths is coupled") {
  Kernel k = make_triangular_kernel();
  Sample s = normal_sample(12, 5);
  RngStream rng(77, StreamKind::shared_outer, 4);
  SharedBatch batch = draw_shared_batch(s.size(), k, rng);
  double eta = 0.3, beta = 0.7;
  Sample a = realize_resample(s, batch, eta);
  Sample b = realize_resample(s, batch, beta);
  // reconstruct the pre-sorting values to compare pointwise
  const auto& v = s.values();
  for (std::size_t i = 0; i < s.size(); ++i) {
    double base = v[batch.indices[i]];
    double da = base + eta * batch.kernel_noise[i];
    double db = base + beta * batch.kernel_noise[i];
    CHECK((db - base) * eta == doctest::Approx((da - base) * beta).epsilon(1e-14));
    CHECK(std::count(a.values().begin(), a.values().end(), da) >= 1);
    CHECK(std::count(b.values().begin(), b.values().end(), db) >= 1);
  }
}

TEST_CASE("empirical distribution quantile and cdf") {
  EmpiricalDist d({4.0, 2.0, 3.0, 1.0});
  CHECK(d.values() == std::vector<double>{1, 2, 3, 4});
  CHECK(d.quantile(0.5) == 2.0);
  CHECK(d.quantile(0.76) == doctest::Approx(4.0));
  CHECK(d.quantile(0.9999) == 4.0);
  CHECK(d.cdf(0.5) == 0.0);
  CHECK(d.cdf(2.0) == 0.5);
  CHECK(d.cdf(9.0) == 1.0);
}

TEST_CASE("prepivot equals the naive count") {
  RngStream rng(31, StreamKind::data, 9);
  std::vector<double> values(257);
  for (auto& v : values) v = rng.next_double() * 8.0 - 4.0;
  EmpiricalDist d(values);
  for (double t = -4.5; t < 4.5; t += 0.27) {
    std::size_t count = 0;
    for (double v : values)
      if (v <= t) ++count;
    CHECK(prepivot(d, t) ==
          static_cast<double>(count) / static_cast<double>(values.size()));
  }
}

TEST_CASE("prepivot of the p-quantile is at least p") {
  RngStream rng(37, StreamKind::data, 10);
  std::vector<double> values(400);
  for (auto& v : values) v = rng.next_double();
  EmpiricalDist d(values);
  for (double p = 0.01; p < 1.0; p += 0.037) {
    double gap = prepivot(d, empirical_quantile(d, p)) - p;
    CHECK(gap >= 0.0);
    CHECK(gap < 1.0 / static_cast<double>(values.size()));
  }
}

TEST_CASE("empirical quantile at uniform scale") {
  std::vector<double> values(100000);
  RngStream rng(41, StreamKind::data, 11);
  for (auto& v : values) v = rng.next_double();
  EmpiricalDist d(values);
  CHECK(std::abs(d.quantile(0.3) - 0.3) < 0.005);
}

TEST_CASE("estimate_root_dist matches composition from public ops") {
  Sample s = normal_sample(9, 13);
  BootstrapPlan plan = small_plan();
  plan.b_first = 5;
  plan.eta = 0.4;

  EmpiricalDist got = estimate_root_dist(s, plan, plan.eta);

  SmoothedDistribution d(s, plan.eta, plan.kernel);
  double center = d.quantile(plan.q);
  std::vector<double> expected;
  for (int b = 0; b < plan.b_first; ++b) {
    RngStream rng(plan.seed, StreamKind::shared_outer,
                  static_cast<std::uint64_t>(b));
    SharedBatch batch = draw_shared_batch(s.size(), plan.kernel, rng);
    Sample rs = realize_resample(s, batch, plan.eta);
    expected.push_back(std::sqrt(9.0) * (sample_quantile(rs, plan.q) - center));
  }
  std::sort(expected.begin(), expected.end());
  REQUIRE(got.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i)
    CHECK(got.values()[i] == doctest::Approx(expected[i]).epsilon(1e-13));
}

TEST_CASE("single-replicate root distribution") {
  Sample s = normal_sample(7, 21);
  BootstrapPlan plan = small_plan();
  plan.b_first = 1;
  EmpiricalDist d = estimate_root_dist(s, plan, 0.3);
  CHECK(d.size() == 1);
  CHECK(std::isfinite(d.values()[0]));
}

TEST_CASE("root distribution is centered and scaled sanely") {
  // Asymptotically, n Var(sample quantile) ~ q(1-q)/f^2; the bootstrap
  // root spread should land within 15% of the plug-in value.
  const std::size_t n = 15;
  RngStream data_rng(2024, StreamKind::data, 0);
  std::vector<double> values(n);
  // rough normal via sum of 12 uniforms
  for (auto& v : values) {
    double acc = 0.0;
    for (int i = 0; i < 12; ++i) acc += data_rng.next_double();
    v = acc - 6.0;
  }
  Sample s(values);
  BootstrapPlan plan = small_plan();
  plan.b_first = 10000;
  double eta = std::pow(static_cast<double>(n), -1.0 / 3.0);
  EmpiricalDist d = estimate_root_dist(s, plan, eta);

  std::vector<double> roots = d.values();
  double mean = testsupport::mean_of(roots);
  double sd = testsupport::sd_of(roots);
  SmoothedDistribution sd_dist(s, eta, plan.kernel);
  double f = sd_dist.pdf(sd_dist.quantile(plan.q));
  double target_sd = std::sqrt(plan.q * (1 - plan.q)) / f;
  double mc_se = sd / std::sqrt(static_cast<double>(roots.size()));
  CHECK(std::abs(mean) < 3.0 * mc_se + 0.35);  // grid jitter of order n^-1/2
  CHECK(std::abs(sd - target_sd) / target_sd < 0.15);
}

TEST_CASE("prepivot distribution: degenerate sizes and range") {
  Sample s = normal_sample(6, 33);
  BootstrapPlan plan = small_plan();
  plan.b_outer = 1;
  plan.b_inner = 1;
  plan.eta = 0.4;
  plan.beta = 0.5;
  EmpiricalDist d = estimate_prepivot_dist(s, plan);
  REQUIRE(d.size() == 1);
  CHECK((d.values()[0] == 0.0 || d.values()[0] == 1.0));

  plan.b_outer = 40;
  plan.b_inner = 16;
  EmpiricalDist d2 = estimate_prepivot_dist(s, plan);
  for (double u : d2.values()) {
    CHECK(u >= 0.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("prepivot distribution matches an independent reimplementation") {
  Sample s = normal_sample(5, 55);
  BootstrapPlan plan = small_plan();
  plan.b_outer = 3;
  plan.b_inner = 5;
  plan.eta = 0.35;
  plan.beta = 0.6;

  for (bool studentized : {false, true}) {
    std::optional<StudentizeSpec> spec;
    if (studentized)
      spec = StudentizeSpec{0.45, plan.kernel_h, plan.q};
    EmpiricalDist got = estimate_prepivot_dist(s, plan, spec);

    const std::size_t n = s.size();
    const double rootn = std::sqrt(static_cast<double>(n));
    SmoothedDistribution beta_dist(s, plan.beta, plan.kernel);
    double center_beta = beta_dist.quantile(plan.q);
    std::vector<double> expected;
    for (int m = 0; m < plan.b_outer; ++m) {
      RngStream rng(plan.seed, StreamKind::shared_outer,
                    static_cast<std::uint64_t>(m));
      SharedBatch batch = draw_shared_batch(n, plan.kernel, rng);
      Sample outer = realize_resample(s, batch, plan.beta);
      double outer_q = sample_quantile(outer, plan.q);
      double r = rootn * (outer_q - center_beta);
      if (spec) r /= std::sqrt(s_hat_squared(outer, *spec));
      SmoothedDistribution inner_dist(outer, plan.eta, plan.kernel);
      double inner_center = inner_dist.quantile(plan.q);
      int count = 0;
      for (int j = 0; j < plan.b_inner; ++j) {
        RngStream rng_j(plan.seed, StreamKind::inner_level,
                        static_cast<std::uint64_t>(m),
                        static_cast<std::uint64_t>(j));
        SharedBatch bj = draw_shared_batch(n, plan.kernel, rng_j);
        Sample inner = realize_resample(outer, bj, plan.eta);
        double ir = rootn * (sample_quantile(inner, plan.q) - inner_center);
        if (spec) ir /= std::sqrt(s_hat_squared(inner, *spec));
        if (ir <= r) ++count;
      }
      expected.push_back(static_cast<double>(count) / plan.b_inner);
    }
    std::sort(expected.begin(), expected.end());
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i)
      CHECK(got.values()[i] == doctest::Approx(expected[i]).epsilon(1e-13));
  }
}

TEST_CASE("prepivoted roots are near-uniform at realistic sizes") {
  const std::size_t n = 30;
  RngStream data_rng(7, StreamKind::data, 99);
  std::vector<double> values(n);
  for (auto& v : values) {
    double acc = 0.0;
    for (int i = 0; i < 12; ++i) acc += data_rng.next_double();
    v = acc - 6.0;
  }
  Sample s(values);
  BootstrapPlan plan;
  plan.b_outer = 500;
  plan.b_inner = 300;
  plan.seed = 4242;
  plan.q = 0.5;
  plan.eta = std::pow(static_cast<double>(n), -1.0 / 3.0);
  plan.beta = std::pow(static_cast<double>(n), -1.0 / 5.0);
  EmpiricalDist d = estimate_prepivot_dist(s, plan);
  double ks = testsupport::ks_distance(
      d.values(), [](double u) { return std::clamp(u, 0.0, 1.0); });
  CHECK(ks < 0.15);
}

TEST_CASE("determinism across runs and worker counts") {
  Sample s = normal_sample(11, 77);
  BootstrapPlan plan = small_plan();
  plan.eta = 0.3;
  plan.beta = 0.5;
  plan.b_outer = 24;
  plan.b_inner = 12;

  EmpiricalDist a = estimate_prepivot_dist(s, plan);
  EmpiricalDist b = estimate_prepivot_dist(s, plan);
  CHECK(a.values() == b.values());

  BootstrapPlan wide = plan;
  wide.workers = 4;
  EmpiricalDist c = estimate_prepivot_dist(s, wide);
  CHECK(a.values() == c.values());

  EmpiricalDist r1 = estimate_root_dist(s, plan, plan.eta);
  EmpiricalDist r2 = estimate_root_dist(s, wide, plan.eta);
  CHECK(r1.values() == r2.values());
}

TEST_CASE("zero bandwidths reduce to the classical bootstrap") {
  Sample s = normal_sample(8, 202);
  BootstrapPlan plan = small_plan();
  plan.b_first = 32;

  EmpiricalDist got = estimate_root_dist(s, plan, 0.0);

  // Independent classical bootstrap consuming the streams the same way:
  // index draw, then a kernel draw that gets multiplied away.
  double center = sample_quantile(s, plan.q);
  std::vector<double> expected;
  const auto& v = s.values();
  for (int b = 0; b < plan.b_first; ++b) {
    RngStream rng(plan.seed, StreamKind::shared_outer,
                  static_cast<std::uint64_t>(b));
    std::vector<double> rs(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      rs[i] = v[rng.next_below(s.size())];
      (void)plan.kernel.quantile(rng.next_open01());
    }
    std::sort(rs.begin(), rs.end());
    std::size_t k1 = order_stat_index(s.size(), plan.q);
    expected.push_back(std::sqrt(static_cast<double>(s.size())) *
                       (rs[k1 - 1] - center));
  }
  std::sort(expected.begin(), expected.end());
  REQUIRE(got.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i)
    CHECK(got.values()[i] == expected[i]);
}

TEST_CASE("studentized root distribution matches composition") {
  Sample s = normal_sample(9, 111);
  BootstrapPlan plan = small_plan();
  plan.b_first = 6;
  plan.eta = 0.5;
  StudentizeSpec spec{0.4, plan.kernel_h, plan.q};

  EmpiricalDist got = estimate_root_dist(s, plan, plan.eta, spec);

  SmoothedDistribution d(s, plan.eta, plan.kernel);
  double center = d.quantile(plan.q);
  std::vector<double> expected;
  for (int b = 0; b < plan.b_first; ++b) {
    RngStream rng(plan.seed, StreamKind::shared_outer,
                  static_cast<std::uint64_t>(b));
    SharedBatch batch = draw_shared_batch(s.size(), plan.kernel, rng);
    Sample rs = realize_resample(s, batch, plan.eta);
    double num = std::sqrt(9.0) * (sample_quantile(rs, plan.q) - center);
    expected.push_back(num / std::sqrt(s_hat_squared(rs, spec)));
  }
  std::sort(expected.begin(), expected.end());
  REQUIRE(got.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i)
    CHECK(got.values()[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("smoothed resample quantiles match composition") {
  Sample s = normal_sample(7, 131);
  BootstrapPlan plan = small_plan();
  plan.b_first = 5;
  double eta = 0.45, zeta = 0.3;
  RootDistOptions opts;
  opts.resample_smoothing = zeta;

  EmpiricalDist got = estimate_root_dist(s, plan, eta, std::nullopt, opts);

  SmoothedDistribution d(s, eta, plan.kernel);
  double center = d.quantile(plan.q);
  std::vector<double> expected;
  for (int b = 0; b < plan.b_first; ++b) {
    RngStream rng(plan.seed, StreamKind::shared_outer,
                  static_cast<std::uint64_t>(b));
    SharedBatch batch = draw_shared_batch(s.size(), plan.kernel, rng);
    Sample rs = realize_resample(s, batch, eta);
    SmoothedDistribution rd(rs, zeta, plan.kernel);
    expected.push_back(std::sqrt(7.0) * (rd.quantile(plan.q) - center));
  }
  std::sort(expected.begin(), expected.end());
  REQUIRE(got.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i)
    CHECK(got.values()[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("pooled resample draws follow the smoothed distribution") {
  Sample s = normal_sample(10, 171);
  Kernel kernel = make_triangular_kernel();
  double eta = 0.6;
  std::vector<double> draws;
  for (int b = 0; b < 3000; ++b) {
    RngStream rng(55, StreamKind::shared_outer, static_cast<std::uint64_t>(b));
    SharedBatch batch = draw_shared_batch(s.size(), kernel, rng);
    Sample rs = realize_resample(s, batch, eta);
    draws.insert(draws.end(), rs.values().begin(), rs.values().end());
  }
  SmoothedDistribution d(s, eta, kernel);
  double ks = testsupport::ks_distance(
      draws, [&](double x) { return d.cdf(x); });
  CHECK(ks < 0.01);
}

TEST_CASE("disabling batch sharing decouples the levels") {
  Sample s = normal_sample(10, 211);
  BootstrapPlan plan = small_plan();
  plan.eta = 0.4;
  plan.beta = 0.6;
  plan.b_outer = 30;
  plan.b_inner = 20;

  BootstrapPlan fresh = plan;
  fresh.share_batches = false;

  // both modes are deterministic, but they consume different streams
  EmpiricalDist shared_g = estimate_root_dist(s, plan, plan.eta);
  EmpiricalDist fresh_g = estimate_root_dist(s, fresh, fresh.eta);
  CHECK(shared_g.values() != fresh_g.values());
  CHECK(fresh_g.values() ==
        estimate_root_dist(s, fresh, fresh.eta).values());

  EmpiricalDist shared_j = estimate_prepivot_dist(s, plan);
  EmpiricalDist fresh_j = estimate_prepivot_dist(s, fresh);
  CHECK(fresh_j.values() == estimate_prepivot_dist(s, fresh).values());
  // with sharing on, the outer resamples of the prepivot pass reuse the
  // root-distribution batches; without it they are fresh draws
  CHECK(shared_j.values() != fresh_j.values());
}
