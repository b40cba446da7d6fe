#include "desmr/lad_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "desmr/soft_threshold.hpp"

namespace desmr {

double lad_objective(const Matrix& X, const Vector& y, double lambda,
                     const Vector& beta) {
  const double fit = (y - X * beta).lpNorm<1>() / static_cast<double>(X.rows());
  return fit + lambda * beta.lpNorm<1>();
}

SolverReport solve_lad_lasso(const LadLassoProblem& prob,
                             const LadSolveOptions& opts) {
  const Matrix& X = prob.X;
  const Vector& y = prob.y;
  const Index n = X.rows(), p = X.cols();
  if (n < 1 || y.size() != n)
    throw std::invalid_argument("inconsistent problem dimensions");
  if (!(prob.lambda >= 0.0) || !std::isfinite(prob.lambda))
    throw std::invalid_argument("lambda must be finite and nonnegative");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("tol must be > 0");

  // Splitting: r = y - X b (residuals), z = b (coefficient copy).
  // The beta step then solves (X^T X + I) b = X^T (y - r + u) + (z - w),
  // which is penalty-independent, so the factorization is computed once.
  Matrix gram = X.transpose() * X;
  gram.diagonal().array() += 1.0;
  const Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("factorization failed in LAD solve");

  Vector beta = opts.warm_start && opts.warm_start->size() == p
                    ? *opts.warm_start
                    : Vector::Zero(p);
  Vector z = beta;
  Vector r = y - X * beta;
  Vector u = Vector::Zero(n);  // scaled dual for the residual constraint
  Vector w = Vector::Zero(p);  // scaled dual for the copy constraint

  double mu = opts.penalty;
  const double inv_n = 1.0 / static_cast<double>(n);
  const double norm_primal = std::sqrt(static_cast<double>(n + p));
  const double norm_dual = std::sqrt(static_cast<double>(p));

  SolverReport report;
  for (int it = 0; it < opts.max_iter; ++it) {
    beta = llt.solve(X.transpose() * (y - r + u) + (z - w));

    const Vector xb = X * beta;
    const Vector r_prev = std::move(r);
    const Vector z_prev = std::move(z);
    r = soft_threshold(y - xb + u, inv_n / mu);
    z = soft_threshold(beta + w, prob.lambda / mu);

    u += y - xb - r;
    w += beta - z;

    const double primal =
        std::sqrt((y - xb - r).squaredNorm() + (beta - z).squaredNorm()) /
        norm_primal;
    const double dual =
        mu *
        std::sqrt((X.transpose() * (r - r_prev) - (z - z_prev)).squaredNorm()) /
        norm_dual;
    report.iterations = it + 1;
    report.primal_residual = primal;
    report.dual_residual = dual;

    if (!std::isfinite(primal) || !std::isfinite(dual) || !beta.allFinite())
      throw std::runtime_error("non-finite iterate in LAD solve");

    if (std::max(primal, dual) < opts.tol) {
      report.converged = true;
      break;
    }
    if (opts.adapt_penalty && (it + 1) % 25 == 0) {
      if (primal > 10.0 * dual && mu < 1e6) {
        mu *= 2.0;
        u *= 0.5;
        w *= 0.5;
      } else if (dual > 10.0 * primal && mu > 1e-6) {
        mu *= 0.5;
        u *= 2.0;
        w *= 2.0;
      }
    }
  }
  report.beta = std::move(z);  // thresholded copy carries exact zeros
  return report;
}

Vector lambda_grid(const Matrix& X, const Vector& y, int k) {
  if (k < 2) throw std::invalid_argument("grid needs k >= 2");
  std::vector<double> sorted(y.begin(), y.end());
  std::sort(sorted.begin(), sorted.end());
  const size_t half = sorted.size() / 2;
  const double median = sorted.size() % 2 == 1
                            ? sorted[half]
                            : 0.5 * (sorted[half - 1] + sorted[half]);
  const Vector signs =
      (y.array() - median).unaryExpr([](double v) {
        return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
      });
  const double base = (X.transpose() * signs).lpNorm<Eigen::Infinity>() /
                      (2.0 * static_cast<double>(X.rows()));
  const double head = 2.0 * base;

  Vector grid(k);
  for (int i = 0; i < k; ++i)
    grid[i] = head * std::pow(10.0, -3.0 * i / static_cast<double>(k - 1));
  return grid;
}

}  // namespace desmr
