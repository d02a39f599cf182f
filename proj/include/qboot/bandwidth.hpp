#pragma once

#include <utility>
#include <vector>

#include "qboot/engine.hpp"
#include "qboot/intervals.hpp"
#include "qboot/sample.hpp"

namespace qboot {

enum class BandwidthRole { outer_beta, inner_eta, studentize_xi };

std::string role_name(BandwidthRole role);

// Roles a method's bandwidths play, in canonical order
// (outer_beta, inner_eta, studentize_xi).
std::vector<BandwidthRole> method_roles(Method m);

// A pilot grid for one bandwidth role. Endpoints scale as
// [0.2 n^(-hi_exponent), 2 n^(-lo_exponent)] so every pilot value has an
// asymptotically valid order.
struct BandwidthGrid {
  BandwidthRole role = BandwidthRole::inner_eta;
  std::vector<double> values;  // ascending, all positive
  std::pair<double, double> order_exponents{0.0, 0.0};  // (low, high)
};

// Evenly spaced default grid for the (method, role) pair. Throws ConfigError
// for combinations the method does not use.
BandwidthGrid default_grid(Method m, BandwidthRole role, std::size_t n,
                           int points = 20);

struct SelectionConfig {
  Method method = Method::i1;
  double q = 0.5;
  double alpha = 0.05;
  double multiplier = 1.5;  // outermost bandwidth = multiplier * largest
                            // outer-level pilot value; must be > 1
  int n_outermost = 500;    // outermost samples used to estimate coverage
  int b_build = 500;        // Monte Carlo size of each interval build
  int grid_points = 20;     // per role, when grids are defaulted
  std::vector<BandwidthGrid> grids;  // explicit grids; defaults when empty
};

struct SelectionEntry {
  Bandwidths bandwidths;
  double coverage = 0.0;
};

struct SelectionResult {
  Bandwidths chosen;
  double chosen_coverage = 0.0;
  double gamma = 0.0;        // outermost bandwidth actually used
  double pseudo_true = 0.0;  // gamma-smoothed quantile of the data
  std::vector<SelectionEntry> table;  // full grid, ascending lexicographic
};

// Pick the grid point whose estimated coverage is closest to 1 - alpha, by
// resampling n_outermost pseudo-samples from the gamma-smoothed empirical
// and checking whether each built interval covers the gamma-smoothed
// quantile of the data. Ties break toward the smallest bandwidths
// (lexicographic in canonical role order). Deterministic under a fixed seed.
SelectionResult select_bandwidths(const Sample& s, const SelectionConfig& cfg,
                                  const BootstrapPlan& plan);

}  // namespace qboot
