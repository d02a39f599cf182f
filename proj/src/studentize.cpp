#include "qboot/studentize.hpp"

#include <cmath>
#include <sstream>

#include "qboot/errors.hpp"

namespace qboot {

DegenerateStudentizer::DegenerateStudentizer(std::size_t n_, double xi_,
                                             double q_)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "degenerate Studentizer: kernel sum is zero (n=" << n_
           << ", xi=" << xi_ << ", q=" << q_ << ")";
        return os.str();
      }()),
      n(n_),
      xi(xi_),
      q(q_) {}

double s_hat_squared_at(std::span<const double> xs, double quantile_value,
                        const StudentizeSpec& spec) {
  const auto& h = spec.kernel_h.pdf;
  const double inv_xi = 1.0 / spec.xi;
  double sum = 0.0;
  for (double x : xs) sum += h((quantile_value - x) * inv_xi);
  if (sum <= 0.0)
    throw DegenerateStudentizer(xs.size(), spec.xi, spec.q);
  double n_xi = static_cast<double>(xs.size()) * spec.xi;
  double ratio = n_xi / sum;
  return spec.q * (1.0 - spec.q) * ratio * ratio;
}

double s_hat_squared(const Sample& s, const StudentizeSpec& spec) {
  return s_hat_squared_at(s.values(), sample_quantile(s, spec.q), spec);
}

double studentized_root(const Sample& s, double target,
                        const StudentizeSpec& spec) {
  double qv = sample_quantile(s, spec.q);
  double shat = std::sqrt(s_hat_squared_at(s.values(), qv, spec));
  return std::sqrt(static_cast<double>(s.size())) * (qv - target) / shat;
}

}  // namespace qboot
