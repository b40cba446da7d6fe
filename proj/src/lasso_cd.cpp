#include "desmr/lasso_cd.hpp"

#include <cmath>
#include <stdexcept>

#include "desmr/soft_threshold.hpp"

namespace desmr {

Vector lasso_cd_gram(const Matrix& q, const Vector& c, double lambda,
                     const LassoCdOptions& opts) {
  const Index p = q.rows();
  if (q.cols() != p || c.size() != p)
    throw std::invalid_argument("inconsistent Gram dimensions");

  Vector beta = opts.warm_start && opts.warm_start->size() == p
                    ? *opts.warm_start
                    : Vector::Zero(p);
  Vector qb = q * beta;

  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    double max_delta = 0.0;
    for (Index j = 0; j < p; ++j) {
      const double qjj = q(j, j);
      if (qjj <= 0.0) {
        beta[j] = 0.0;
        continue;
      }
      const double old = beta[j];
      const double partial = c[j] - qb[j] + qjj * old;
      const double updated = soft_threshold(partial, lambda) / qjj;
      if (updated != old) {
        beta[j] = updated;
        qb += (updated - old) * q.col(j);
        max_delta = std::max(max_delta, std::abs(updated - old));
      }
    }
    if (max_delta < opts.tol) break;
  }
  if (!beta.allFinite())
    throw std::runtime_error("non-finite iterate in coordinate descent");
  return beta;
}

Vector lasso_cd(const Matrix& X, const Vector& y, double lambda,
                const LassoCdOptions& opts) {
  const double inv_n = 1.0 / static_cast<double>(X.rows());
  const Matrix q = X.transpose() * X * inv_n;
  const Vector c = X.transpose() * y * inv_n;
  return lasso_cd_gram(q, c, lambda, opts);
}

}  // namespace desmr
