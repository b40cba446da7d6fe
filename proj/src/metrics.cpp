#include "desmr/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace desmr {

SupportScores support_metrics(const Vector& beta_hat, const Vector& beta_star,
                              double zero_tol) {
  if (beta_hat.size() != beta_star.size())
    throw std::invalid_argument("coefficient lengths differ");
  int detected = 0, truth = 0, hits = 0;
  for (Index i = 0; i < beta_hat.size(); ++i) {
    const bool in_hat = std::abs(beta_hat[i]) > zero_tol;
    const bool in_star = beta_star[i] != 0.0;
    detected += in_hat;
    truth += in_star;
    hits += in_hat && in_star;
  }
  SupportScores s;
  s.recall = truth == 0 ? 1.0 : static_cast<double>(hits) / truth;
  s.precision = detected == 0 ? (truth == 0 ? 1.0 : 0.0)
                              : static_cast<double>(hits) / detected;
  s.f1 = (s.precision + s.recall) == 0.0
             ? 0.0
             : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

double l2_error(const Matrix& per_node_beta, const Vector& beta_star) {
  if (per_node_beta.cols() != beta_star.size())
    throw std::invalid_argument("dimension mismatch");
  return (per_node_beta.rowwise() - beta_star.transpose()).rowwise().squaredNorm().sum();
}

PredScores prediction_metrics(const Vector& beta, const Matrix& x_test,
                              const Vector& y_test) {
  if (x_test.rows() == 0) throw std::invalid_argument("empty test set");
  const Vector resid = y_test - x_test * beta;
  PredScores s;
  s.rmse = std::sqrt(resid.squaredNorm() / static_cast<double>(resid.size()));
  s.mae = resid.lpNorm<1>() / static_cast<double>(resid.size());
  return s;
}

BicResult bic_select(const Vector& grid,
                     const std::function<Vector(double)>& fit,
                     const std::function<double(const Vector&)>& mean_loss,
                     Index n_samples, double zero_tol) {
  if (grid.size() == 0) throw std::invalid_argument("empty lambda grid");
  const double n = static_cast<double>(n_samples);
  const double log_n = std::log(n);

  BicResult best;
  best.scores.reserve(grid.size());
  double best_score = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.size(); ++i) {
    const Vector beta = fit(grid[i]);
    const double loss = std::max(mean_loss(beta), 1e-300);
    int df = 0;
    for (Index j = 0; j < beta.size(); ++j) df += std::abs(beta[j]) > zero_tol;
    const double score = n * std::log(loss) + df * log_n;
    best.scores.push_back(score);
    // grid is descending, so strict improvement keeps the larger lambda on
    // ties
    if (score < best_score) {
      best_score = score;
      best.lambda = grid[i];
      best.index = i;
      best.beta = beta;
    }
  }
  if (best.index < 0) throw std::runtime_error("all lambda fits failed");
  return best;
}

double stage_accuracy(int v, Index total_n, Index local_n, int s,
                      double gamma_t) {
  const double n_total = static_cast<double>(total_n);
  const double n_local = static_cast<double>(local_n);
  const double sd = static_cast<double>(s);
  const double log_total = std::log(n_total);
  if (v <= 0) return std::sqrt(sd * log_total / n_local);
  return std::sqrt(sd * log_total / n_total) +
         std::pow(sd, (2.0 * v + 1.0) / 2.0) *
             std::pow(log_total / n_local, (v + 1.0) / 2.0) +
         gamma_t;
}

double lambda_theoretical(int v, double c0_const, Index total_n, Index local_n,
                          int s, double gamma_t) {
  const double n_total = static_cast<double>(total_n);
  const double n_local = static_cast<double>(local_n);
  const double log_total = std::log(n_total);
  const double a_cur = stage_accuracy(v, total_n, local_n, s, gamma_t);
  return c0_const * (std::sqrt(log_total / n_total) +
                     a_cur * std::sqrt(s * log_total / n_local));
}

}  // namespace desmr
