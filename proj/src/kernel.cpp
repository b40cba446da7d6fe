#include "desmr/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace desmr {

double biweight_kernel(double u) {
  if (u <= -1.0 || u >= 1.0) return 0.0;
  const double u2 = u * u;
  return ((-315.0 / 64.0 * u2 + 735.0 / 64.0) * u2 - 525.0 / 64.0) * u2 +
         105.0 / 64.0;
}

KernelFn biweight() { return {[](double u) { return biweight_kernel(u); }, 1.0}; }

double estimate_density(const Vector& residuals, double h, const KernelFn& k) {
  if (!(h > 0.0)) throw std::invalid_argument("bandwidth must be > 0");
  const Index n = residuals.size();
  if (n < 1) throw std::invalid_argument("need at least one residual");
  double sum = 0.0;
  for (Index i = 0; i < n; ++i) sum += k.evaluate(residuals[i] / h);
  return sum / (static_cast<double>(n) * h);
}

Vector pseudo_response(const Matrix& X, const Vector& y, const Vector& beta0,
                       double f0) {
  if (!(f0 > 0.0)) throw std::invalid_argument("density must be > 0");
  const Vector fitted = X * beta0;
  Vector out(y.size());
  const double inv_f0 = 1.0 / f0;
  for (Index i = 0; i < y.size(); ++i) {
    const double indicator = y[i] <= fitted[i] ? 1.0 : 0.0;
    out[i] = fitted[i] - inv_f0 * (indicator - 0.5);
  }
  return out;
}

double bandwidth(int v, const BandwidthSchedule& sched) {
  if (sched.n < 1 || sched.m < 1 || sched.s_hat < 1)
    throw std::invalid_argument("schedule sizes must be >= 1");
  const double s = static_cast<double>(sched.s_hat);
  const double log_n = std::log(static_cast<double>(sched.n));
  const double stat_term = std::sqrt(s * log_n / static_cast<double>(sched.n));
  const double base = sched.c0 * s * s * log_n / static_cast<double>(sched.m);
  const double geo_term =
      std::pow(base, 0.5 * static_cast<double>(v + 1)) / std::sqrt(s);
  return stat_term + geo_term;
}

}  // namespace desmr
