#include "qboot/intervals.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <stdexcept>

#include "qboot/smoothed.hpp"

namespace qboot {

std::string method_name(Method m) {
  switch (m) {
    case Method::i1: return "i1";
    case Method::i2: return "i2";
    case Method::i3: return "i3";
    case Method::i4: return "i4";
    case Method::i1_kappa: return "i1k";
  }
  return "?";
}

std::optional<Method> method_from_name(const std::string& name) {
  if (name == "i1") return Method::i1;
  if (name == "i2") return Method::i2;
  if (name == "i3") return Method::i3;
  if (name == "i4") return Method::i4;
  if (name == "i1k") return Method::i1_kappa;
  return std::nullopt;
}

Bandwidths default_bandwidths(Method m, std::size_t n) {
  double nn = static_cast<double>(n);
  Bandwidths bw;
  switch (m) {
    case Method::i1:
      bw.eta = std::pow(nn, -1.0 / 3.0);
      break;
    case Method::i2:
      bw.beta = std::pow(nn, -1.0 / 5.0);
      bw.eta = std::pow(nn, -1.0 / 3.0);
      break;
    case Method::i3:
      bw.eta = std::pow(nn, -1.0 / 6.0);
      bw.xi = std::pow(nn, -1.0 / 2.0);
      break;
    case Method::i4:
      bw.beta = std::pow(nn, -2.0 / 19.0);
      bw.eta = std::pow(nn, -11.0 / 57.0);
      bw.xi = std::pow(nn, -1.0 / 2.0);
      break;
    case Method::i1_kappa:
      bw.eta = std::pow(nn, -0.3);
      bw.zeta = std::pow(nn, -1.0 / 2.0);
      break;
  }
  return bw;
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must be in (0, 1)");
}

BootstrapPlan with_bandwidths(const BootstrapPlan& plan, const Bandwidths& bw) {
  BootstrapPlan p = plan;
  p.eta = bw.eta;
  p.beta = bw.beta;
  p.xi = bw.xi;
  return p;
}

}  // namespace

IntervalResult FittedMethod::at(double alpha) const {
  check_alpha(alpha);
  IntervalResult res;
  res.method = method_;
  res.nominal = 1.0 - alpha;
  res.mc_sizes = mc_sizes_;
  res.bandwidths = bandwidths_;
  double level = alpha;
  if (calibration_dist_) {
    level = calibration_dist_->quantile(alpha);
    res.calibrated_level = level;
  }
  res.upper = center_ - scale_ * root_dist_.quantile(level) / sqrt_n_;
  return res;
}

FittedMethod fit_method(Method m, const Sample& s, const Bandwidths& bw,
                        const BootstrapPlan& plan, SmoothedRootCenter center) {
  const BootstrapPlan p = with_bandwidths(plan, bw);
  const double sqrt_n = std::sqrt(static_cast<double>(s.size()));
  McSizes sizes;
  sizes.b_first = p.b_first;

  switch (m) {
    case Method::i1: {
      EmpiricalDist g = estimate_root_dist(s, p, bw.eta);
      return FittedMethod(m, sample_quantile(s, p.q), 1.0, sqrt_n,
                          std::move(g), std::nullopt, sizes, bw);
    }
    case Method::i2: {
      EmpiricalDist g = estimate_root_dist(s, p, bw.eta);
      EmpiricalDist j = estimate_prepivot_dist(s, p);
      sizes.b_outer = p.b_outer;
      sizes.b_inner = p.b_inner;
      return FittedMethod(m, sample_quantile(s, p.q), 1.0, sqrt_n,
                          std::move(g), std::move(j), sizes, bw);
    }
    case Method::i3: {
      StudentizeSpec spec{bw.xi, p.kernel_h, p.q};
      double scale = std::sqrt(s_hat_squared(s, spec));  // hard error if degenerate
      EmpiricalDist k = estimate_root_dist(s, p, bw.eta, spec);
      return FittedMethod(m, sample_quantile(s, p.q), scale, sqrt_n,
                          std::move(k), std::nullopt, sizes, bw);
    }
    case Method::i4: {
      StudentizeSpec spec{bw.xi, p.kernel_h, p.q};
      double scale = std::sqrt(s_hat_squared(s, spec));
      EmpiricalDist k = estimate_root_dist(s, p, bw.eta, spec);
      EmpiricalDist l = estimate_prepivot_dist(s, p, spec);
      sizes.b_outer = p.b_outer;
      sizes.b_inner = p.b_inner;
      return FittedMethod(m, sample_quantile(s, p.q), scale, sqrt_n,
                          std::move(k), std::move(l), sizes, bw);
    }
    case Method::i1_kappa: {
      double zeta_q =
          bw.zeta > 0.0
              ? smoothed_quantile_over(s.values(), s.min(), s.max(), bw.zeta,
                                       p.kernel, p.q)
              : sample_quantile(s, p.q);
      RootDistOptions opts;
      opts.resample_smoothing = bw.zeta;
      if (center == SmoothedRootCenter::zeta_smoothed)
        opts.center_override = zeta_q;
      EmpiricalDist g = estimate_root_dist(s, p, bw.eta, std::nullopt, opts);
      return FittedMethod(m, zeta_q, 1.0, sqrt_n, std::move(g), std::nullopt,
                          sizes, bw);
    }
  }
  throw std::logic_error("fit_method: unknown method");
}

IntervalResult build_i1(const Sample& s, double eta, double alpha,
                        const BootstrapPlan& plan) {
  check_alpha(alpha);
  Bandwidths bw;
  bw.eta = eta;
  return fit_method(Method::i1, s, bw, plan).at(alpha);
}

IntervalResult build_i2(const Sample& s, double beta, double eta, double alpha,
                        const BootstrapPlan& plan) {
  check_alpha(alpha);
  Bandwidths bw;
  bw.eta = eta;
  bw.beta = beta;
  return fit_method(Method::i2, s, bw, plan).at(alpha);
}

IntervalResult build_i3(const Sample& s, double eta, double xi, double alpha,
                        const BootstrapPlan& plan) {
  check_alpha(alpha);
  Bandwidths bw;
  bw.eta = eta;
  bw.xi = xi;
  return fit_method(Method::i3, s, bw, plan).at(alpha);
}

IntervalResult build_i4(const Sample& s, double beta, double eta, double xi,
                        double alpha, const BootstrapPlan& plan) {
  check_alpha(alpha);
  Bandwidths bw;
  bw.eta = eta;
  bw.beta = beta;
  bw.xi = xi;
  return fit_method(Method::i4, s, bw, plan).at(alpha);
}

IntervalResult build_i1_kappa(const Sample& s, double eta, double zeta,
                              double alpha, const BootstrapPlan& plan,
                              SmoothedRootCenter center) {
  check_alpha(alpha);
  Bandwidths bw;
  bw.eta = eta;
  bw.zeta = zeta;
  return fit_method(Method::i1_kappa, s, bw, plan, center).at(alpha);
}

TwoSidedResult two_sided(const IntervalResult& lower_from,
                         const IntervalResult& upper_from) {
  if (lower_from.method != upper_from.method)
    throw std::invalid_argument("two_sided: methods differ");
  if (!(lower_from.nominal < upper_from.nominal))
    throw std::invalid_argument(
        "two_sided: need alpha_lo < alpha_hi (nominal levels out of order)");
  TwoSidedResult res;
  res.nominal = upper_from.nominal - lower_from.nominal;
  res.lower = lower_from.upper;
  res.upper = upper_from.upper;
  if (res.lower > res.upper) {
    // Possible only at degenerate Monte Carlo sizes.
    double mid = 0.5 * (res.lower + res.upper);
    res.lower = res.upper = mid;
    res.crossed = true;
  }
  res.length = res.upper - res.lower;
  return res;
}

double eq1_error_term(double f_at_q, double f_prime_at_q, double q,
                      double alpha) {
  if (!(f_at_q > 0.0))
    throw std::invalid_argument("eq1_error_term: density must be positive");
  check_alpha(alpha);
  boost::math::normal_distribution<double> normal;
  double sigma_q = std::sqrt(q * (1.0 - q));
  double coef = (2.0 * q - 1.0) / (2.0 * sigma_q) +
                sigma_q * f_prime_at_q / (f_at_q * f_at_q);
  double z = boost::math::quantile(normal, alpha);
  return coef * z * z * boost::math::pdf(normal, z);
}

}  // namespace qboot
