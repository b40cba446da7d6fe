#pragma once

#include <functional>
#include <vector>

#include "desmr/types.hpp"

namespace desmr {

struct SupportScores {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

/// Support recovery scores. Detected support is {i : |beta_hat_i| > zero_tol};
/// empty detected and empty true support scores precision 1, empty detected
/// against nonempty truth scores 0; f1 is 0 when precision + recall = 0.
SupportScores support_metrics(const Vector& beta_hat, const Vector& beta_star,
                              double zero_tol);

/// Sum over nodes (rows) of squared Euclidean distance to beta_star.
double l2_error(const Matrix& per_node_beta, const Vector& beta_star);

struct PredScores {
  double rmse = 0.0;
  double mae = 0.0;
};

PredScores prediction_metrics(const Vector& beta, const Matrix& x_test,
                              const Vector& y_test);

struct BicResult {
  double lambda = 0.0;
  int index = -1;
  Vector beta;                 // fit at the chosen lambda
  std::vector<double> scores;  // one per grid entry
};

/// Scores BIC(lambda) = n log(mean loss) + df log(n) over a descending grid
/// and returns the argmin; on ties the larger lambda (sparser model) wins.
/// fit(lambda) produces the coefficient; mean_loss(beta) is the average
/// per-sample loss (squared residual for least-squares fits, absolute
/// residual for LAD fits); df is the count of |beta_i| > zero_tol.
BicResult bic_select(const Vector& grid,
                     const std::function<Vector(double)>& fit,
                     const std::function<double(const Vector&)>& mean_loss,
                     Index n_samples, double zero_tol = 1e-4);

/// Theoretical regularization schedule (an optional alternative to BIC):
///   lambda_v = C0 (sqrt(log N / N) + a_v sqrt(s log N / n)),
/// where a_v is the accuracy of the estimator entering stage v
///   a_0 = sqrt(s log N / n),
///   a_v = sqrt(s log N / N) + s^{(2v+1)/2} (log N / n)^{(v+1)/2} + gamma_t
/// with gamma_t the (usually negligible) inner-loop optimization error.
double stage_accuracy(int v, Index total_n, Index local_n, int s,
                      double gamma_t = 0.0);
double lambda_theoretical(int v, double c0_const, Index total_n, Index local_n,
                          int s, double gamma_t = 0.0);

}  // namespace desmr
