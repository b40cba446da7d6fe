#pragma once

#include <optional>

#include "desmr/types.hpp"

namespace desmr {

/// l1-penalized least-absolute-deviation regression:
///   minimize (1/n) |y - X b|_1 + lambda |b|_1
struct LadLassoProblem {
  const Matrix& X;
  const Vector& y;
  double lambda = 0.0;
};

struct SolverReport {
  Vector beta;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool converged = false;
};

struct LadSolveOptions {
  double tol = 1e-6;
  int max_iter = 5000;
  double penalty = 1.0;        // operator-splitting penalty, adapted online
  bool adapt_penalty = true;   // residual balancing
  std::optional<Vector> warm_start;
};

/// Operator-splitting solve: the residual vector and the coefficient copy
/// are split out so the beta step is a plain quadratic with a cached
/// factorization of (X^T X + I) and both l1 terms reduce to coordinate-wise
/// shrinkage. Stops when max(primal, dual) residual < tol (residuals are
/// dimension-normalized norms). Throws on non-finite iterates; returns
/// converged=false with the best iterate when max_iter is exhausted.
SolverReport solve_lad_lasso(const LadLassoProblem& prob,
                             const LadSolveOptions& opts = {});

double lad_objective(const Matrix& X, const Vector& y, double lambda,
                     const Vector& beta);

/// Descending log-spaced grid of k values. The head is twice
/// |X^T sign(y - median(y))|_inf / (2n) (the factor 2 is safety margin so
/// the head reliably forces the all-zero solution); the tail is 1e-3 of
/// the head.
Vector lambda_grid(const Matrix& X, const Vector& y, int k);

}  // namespace desmr
