#include "qboot/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qboot/errors.hpp"
#include "qboot/parallel.hpp"
#include "qboot/smoothed.hpp"

namespace qboot {

std::string role_name(BandwidthRole role) {
  switch (role) {
    case BandwidthRole::outer_beta: return "beta";
    case BandwidthRole::inner_eta: return "eta";
    case BandwidthRole::studentize_xi: return "xi";
  }
  return "?";
}

std::vector<BandwidthRole> method_roles(Method m) {
  switch (m) {
    case Method::i1: return {BandwidthRole::inner_eta};
    case Method::i2: return {BandwidthRole::outer_beta, BandwidthRole::inner_eta};
    case Method::i3: return {BandwidthRole::inner_eta, BandwidthRole::studentize_xi};
    case Method::i4:
      return {BandwidthRole::outer_beta, BandwidthRole::inner_eta,
              BandwidthRole::studentize_xi};
    case Method::i1_kappa:
      throw ConfigError("bandwidth selection supports methods i1-i4 only");
  }
  throw ConfigError("unknown method");
}

namespace {

struct GridSpan {
  double lo_exp;  // smaller -log_n exponent (wider bandwidth end)
  double hi_exp;  // larger exponent (narrower end)
};

GridSpan grid_span(Method m, BandwidthRole role) {
  switch (m) {
    case Method::i1:
      if (role == BandwidthRole::inner_eta) return {1.0 / 4.0, 3.0 / 8.0};
      break;
    case Method::i2:
      if (role == BandwidthRole::outer_beta) return {1.0 / 12.0, 2.0 / 9.0};
      if (role == BandwidthRole::inner_eta) return {1.0 / 3.0, 1.0 / 3.0};
      break;
    case Method::i3:
      if (role == BandwidthRole::inner_eta) return {1.0 / 6.0, 1.0 / 6.0};
      if (role == BandwidthRole::studentize_xi) return {3.0 / 8.0, 1.0 / 2.0};
      break;
    case Method::i4:
      if (role == BandwidthRole::outer_beta) return {2.0 / 19.0, 2.0 / 19.0};
      if (role == BandwidthRole::inner_eta) return {11.0 / 57.0, 11.0 / 57.0};
      if (role == BandwidthRole::studentize_xi) return {1.0 / 2.0, 11.0 / 19.0};
      break;
    default:
      break;
  }
  throw ConfigError("no bandwidth grid for method " + method_name(m) +
                    ", role " + role_name(role));
}

double& field_for(Bandwidths& bw, BandwidthRole role) {
  switch (role) {
    case BandwidthRole::outer_beta: return bw.beta;
    case BandwidthRole::inner_eta: return bw.eta;
    case BandwidthRole::studentize_xi: return bw.xi;
  }
  throw ConfigError("unknown bandwidth role");
}

}  // namespace

BandwidthGrid default_grid(Method m, BandwidthRole role, std::size_t n,
                           int points) {
  if (points < 1) throw ConfigError("grid needs at least one point");
  GridSpan span = grid_span(m, role);
  double nn = static_cast<double>(n);
  double lo = 0.2 * std::pow(nn, -span.hi_exp);
  double hi = 2.0 * std::pow(nn, -span.lo_exp);
  BandwidthGrid grid;
  grid.role = role;
  grid.order_exponents = {span.lo_exp, span.hi_exp};
  if (points == 1) {
    grid.values = {0.5 * (lo + hi)};
    return grid;
  }
  grid.values.resize(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    grid.values[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * static_cast<double>(i) / (points - 1);
  return grid;
}

SelectionResult select_bandwidths(const Sample& s, const SelectionConfig& cfg,
                                  const BootstrapPlan& plan) {
  if (!(cfg.multiplier > 1.0))
    throw ConfigError("selection multiplier must be > 1");
  if (cfg.n_outermost < 1 || cfg.b_build < 1)
    throw ConfigError("selection counts must be >= 1");

  const auto roles = method_roles(cfg.method);
  std::vector<BandwidthGrid> grids;
  if (cfg.grids.empty()) {
    for (auto role : roles)
      grids.push_back(default_grid(cfg.method, role, s.size(), cfg.grid_points));
  } else {
    if (cfg.grids.size() != roles.size())
      throw ConfigError("explicit grids do not match the method's roles");
    grids = cfg.grids;
    for (std::size_t r = 0; r < roles.size(); ++r) {
      if (grids[r].role != roles[r])
        throw ConfigError("explicit grid roles out of order for method " +
                          method_name(cfg.method));
      if (grids[r].values.empty()) throw ConfigError("empty bandwidth grid");
    }
  }

  // The outermost bandwidth is a multiple of the largest outer-level pilot
  // value. The canonical role order lists the outer role first (beta when
  // the method has one, else the single smoothing level eta).
  const BandwidthGrid& outer_grid = grids.front();
  double gamma = cfg.multiplier *
                 *std::max_element(outer_grid.values.begin(),
                                   outer_grid.values.end());

  double pseudo_true = smoothed_quantile_over(
      s.values(), s.min(), s.max(), gamma, plan.kernel, cfg.q);

  // Cartesian product of the per-role grids, ascending lexicographic.
  std::vector<Bandwidths> tuples;
  {
    std::vector<std::size_t> idx(grids.size(), 0);
    for (;;) {
      Bandwidths bw;
      for (std::size_t r = 0; r < grids.size(); ++r)
        field_for(bw, grids[r].role) = grids[r].values[idx[r]];
      tuples.push_back(bw);
      std::size_t r = grids.size();
      while (r > 0) {
        --r;
        if (++idx[r] < grids[r].values.size()) break;
        idx[r] = 0;
        if (r == 0) goto done;
      }
    }
  done:;
  }

  const std::size_t n_tuples = tuples.size();
  const std::size_t n_outer = static_cast<std::size_t>(cfg.n_outermost);
  std::vector<std::uint8_t> contained(n_tuples * n_outer, 0);

  const std::size_t n = s.size();
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const std::size_t k1 = order_stat_index(n, cfg.q);
  const StreamKind first_kind = plan.share_batches ? StreamKind::shared_outer
                                                   : StreamKind::first_level;

  parallel_for(n_outer, plan.workers, [&](std::size_t i) {
    RngStream rng(plan.seed, StreamKind::outermost, i);
    SharedBatch batch = draw_shared_batch(n, plan.kernel, rng);
    Sample pseudo = realize_resample(s, batch, gamma);

    BootstrapPlan build = plan;
    build.seed = derive_seed(plan.seed, StreamKind::derive, i);
    build.workers = 1;
    build.q = cfg.q;
    build.b_first = cfg.b_build;
    build.b_outer = cfg.b_build;
    build.b_inner = cfg.b_build;
    build.progress = nullptr;

    if (cfg.method == Method::i1) {
      // All grid points reuse one batch set: realizing a cached batch at
      // each eta is far cheaper than redrawing it, and the resulting roots
      // are identical to what estimate_root_dist would produce.
      const std::size_t nb = static_cast<std::size_t>(cfg.b_build);
      std::vector<std::uint32_t> cached_idx(nb * n);
      std::vector<double> cached_noise(nb * n);
      const auto& kq = build.kernel.quantile;
      for (std::size_t b = 0; b < nb; ++b) {
        RngStream g(build.seed, first_kind, b);
        for (std::size_t t = 0; t < n; ++t) {
          cached_idx[b * n + t] = static_cast<std::uint32_t>(g.next_below(n));
          cached_noise[b * n + t] = kq(g.next_open01());
        }
      }
      const auto& pv = pseudo.values();
      double center_q = sample_quantile(pseudo, cfg.q);
      std::vector<double> buf(n);
      std::vector<double> roots(nb);
      for (std::size_t g = 0; g < n_tuples; ++g) {
        double eta = tuples[g].eta;
        double center = smoothed_quantile_over(pv, pseudo.min(), pseudo.max(),
                                               eta, build.kernel, cfg.q);
        for (std::size_t b = 0; b < nb; ++b) {
          for (std::size_t t = 0; t < n; ++t)
            buf[t] = pv[cached_idx[b * n + t]] + eta * cached_noise[b * n + t];
          auto mid = buf.begin() + static_cast<std::ptrdiff_t>(k1 - 1);
          std::nth_element(buf.begin(), mid, buf.end());
          roots[b] = sqrt_n * (*mid - center);
        }
        EmpiricalDist dist(roots);
        double upper = center_q - dist.quantile(cfg.alpha) / sqrt_n;
        contained[g * n_outer + i] = pseudo_true <= upper ? 1 : 0;
      }
    } else {
      for (std::size_t g = 0; g < n_tuples; ++g) {
        try {
          IntervalResult res =
              fit_method(cfg.method, pseudo, tuples[g], build).at(cfg.alpha);
          contained[g * n_outer + i] = pseudo_true <= res.upper ? 1 : 0;
        } catch (const DegenerateStudentizer&) {
          contained[g * n_outer + i] = 2;  // excluded from the average
        }
      }
    }
  });

  SelectionResult result;
  result.gamma = gamma;
  result.pseudo_true = pseudo_true;
  result.table.resize(n_tuples);
  double target = 1.0 - cfg.alpha;
  bool any_valid = false;
  std::size_t best = 0;
  double best_err = 2.0;
  for (std::size_t g = 0; g < n_tuples; ++g) {
    std::size_t hits = 0, valid = 0;
    for (std::size_t i = 0; i < n_outer; ++i) {
      std::uint8_t c = contained[g * n_outer + i];
      if (c == 2) continue;
      hits += c;
      ++valid;
    }
    double coverage =
        valid > 0 ? static_cast<double>(hits) / static_cast<double>(valid)
                  : std::numeric_limits<double>::quiet_NaN();
    result.table[g] = {tuples[g], coverage};
    if (valid == 0) continue;
    any_valid = true;
    double err = std::abs(coverage - target);
    if (err < best_err) {
      best_err = err;
      best = g;
    }
  }
  if (!any_valid) {
    std::ostringstream os;
    os << "bandwidth selection: every grid point degenerated (method "
       << method_name(cfg.method) << ", n=" << s.size() << ", gamma=" << gamma
       << ", " << n_tuples << " grid points, " << n_outer
       << " outermost samples)";
    throw std::runtime_error(os.str());
  }
  result.chosen = result.table[best].bandwidths;
  result.chosen_coverage = result.table[best].coverage;
  return result;
}

}  // namespace qboot
