#pragma once

#include <optional>
#include <string>

#include "qboot/engine.hpp"
#include "qboot/sample.hpp"

namespace qboot {

enum class Method { i1, i2, i3, i4, i1_kappa };

std::string method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

// Bandwidths by role; 0 means unused by the method at hand.
struct Bandwidths {
  double eta = 0.0;
  double beta = 0.0;
  double xi = 0.0;
  double zeta = 0.0;
};

// The fixed per-method bandwidth defaults n^(-e) with the asymptotically
// optimal exponents e, unit multipliers.
Bandwidths default_bandwidths(Method m, std::size_t n);

struct McSizes {
  int b_first = 0;
  int b_outer = 0;
  int b_inner = 0;
};

// One-sided upper confidence interval (-inf, upper].
struct IntervalResult {
  double upper = 0.0;
  Method method = Method::i1;
  double nominal = 0.0;  // 1 - alpha
  std::optional<double> calibrated_level;  // lambda for the iterated methods
  McSizes mc_sizes;
  Bandwidths bandwidths;
};

struct TwoSidedResult {
  double lower = 0.0;
  double upper = 0.0;
  double nominal = 0.0;
  double length = 0.0;
  bool crossed = false;  // endpoints crossed and were clamped to empty
};

// Which quantile of the data centers the smoothed-sample-quantile root: the
// eta-smoothed one (direct substitution) or the zeta-smoothed one. Kept
// switchable for sensitivity runs.
enum class SmoothedRootCenter { eta_smoothed, zeta_smoothed };

// A method fitted to one sample: the Monte Carlo distributions are estimated
// once and endpoints at any alpha read off them.
class FittedMethod {
 public:
  IntervalResult at(double alpha) const;  // requires 0 < alpha < 1

  Method method() const { return method_; }
  const EmpiricalDist& root_dist() const { return root_dist_; }
  const std::optional<EmpiricalDist>& calibration_dist() const {
    return calibration_dist_;
  }

 private:
  friend FittedMethod fit_method(Method, const Sample&, const Bandwidths&,
                                 const BootstrapPlan&, SmoothedRootCenter);
  FittedMethod(Method m, double center, double scale, double sqrt_n,
               EmpiricalDist root_dist, std::optional<EmpiricalDist> calib,
               McSizes sizes, Bandwidths bw)
      : method_(m),
        center_(center),
        scale_(scale),
        sqrt_n_(sqrt_n),
        root_dist_(std::move(root_dist)),
        calibration_dist_(std::move(calib)),
        mc_sizes_(sizes),
        bandwidths_(bw) {}

  Method method_;
  double center_;
  double scale_;
  double sqrt_n_;
  EmpiricalDist root_dist_;
  std::optional<EmpiricalDist> calibration_dist_;
  McSizes mc_sizes_;
  Bandwidths bandwidths_;
};

// Estimate everything alpha-independent for the given method: root
// distribution, calibration distribution for the iterated methods, plug-in
// scale for the Studentized ones. Throws DegenerateStudentizer if the
// Studentizer fails on the data sample itself (i3/i4).
FittedMethod fit_method(
    Method m, const Sample& s, const Bandwidths& bw, const BootstrapPlan& plan,
    SmoothedRootCenter center = SmoothedRootCenter::eta_smoothed);

IntervalResult build_i1(const Sample& s, double eta, double alpha,
                        const BootstrapPlan& plan);
IntervalResult build_i2(const Sample& s, double beta, double eta, double alpha,
                        const BootstrapPlan& plan);
IntervalResult build_i3(const Sample& s, double eta, double xi, double alpha,
                        const BootstrapPlan& plan);
IntervalResult build_i4(const Sample& s, double beta, double eta, double xi,
                        double alpha, const BootstrapPlan& plan);
IntervalResult build_i1_kappa(
    const Sample& s, double eta, double zeta, double alpha,
    const BootstrapPlan& plan,
    SmoothedRootCenter center = SmoothedRootCenter::eta_smoothed);

// Two-sided interval from the two one-sided pieces of the same method:
// lower endpoint from the alpha_hi interval, upper from the alpha_lo one.
// Crossed endpoints clamp to an empty interval and set the flag.
TwoSidedResult two_sided(const IntervalResult& lower_from,
                         const IntervalResult& upper_from);

// Leading coverage-error coefficient of the percentile interval:
//   ((2q-1)/(2 sigma_q) + sigma_q f'(x_q) / f(x_q)^2) z_a^2 phi(z_a),
// with z_a the standard normal alpha-quantile. The one-sided coverage is
// approximately 1 - alpha + n^(-1/2) times this value.
double eq1_error_term(double f_at_q, double f_prime_at_q, double q,
                      double alpha);

}  // namespace qboot
