#pragma once

#include <vector>

#include "desmr/datagen.hpp"
#include "desmr/topology.hpp"
#include "desmr/types.hpp"

namespace desmr {

/// Per-node coefficients and accumulated duals, one row per node.
/// Duals start at zero each time the inner loop is entered and their
/// node-sum stays zero throughout (every edge contributes antisymmetric
/// increments).
struct ConsensusState {
  Matrix beta;
  Matrix p_dual;
  int t = 0;
};

struct AdmmConfig {
  double tau = 1.0;   // edge penalty
  Vector rho;         // per-node step lengths, > lambda_max(X_j^T X_j / n_j)
  double lambda = 0.0;
  int rounds = 50;
  Index total_rows = 0;  // pooled sample count; run_inner fills it when 0

  bool track_convergence = false;
  int reference_multiplier = 20;  // extra rounds (x rounds) for the reference
  int fit_window_begin = 10;
  int fit_window_end = 60;

  /// Use the published closed-form constants (weight 1/(tau d_j + rho_j),
  /// threshold 2 lambda weight) instead of the rederived ones. The default
  /// derivation makes the network fixed point solve the pooled lasso
  /// exactly; see admm_step_beta.
  bool printed_update_rule = false;

  int divergence_patience = 10;
};

struct ConvergenceTrace {
  std::vector<double> distance;       // ||B_t - B_ref||_F per round
  std::vector<double> consensus_gap;  // max over edges of |b_j - b_k|_inf
  double gamma_hat = 0.0;             // fitted geometric rate of distance^2
  double r_squared = 0.0;             // quality of the log-linear fit
  double max_dual_sum = 0.0;          // max_t |sum_j p_j|_inf (zero-sum check)
  int fit_begin = 0, fit_end = 0;
};

struct InnerResult {
  ConsensusState state;
  ConvergenceTrace trace;
};

/// Largest eigenvalue of X^T X / n by power iteration on the p x p Gram
/// matrix. Falls back to the Gram trace (an upper bound) with a warning on
/// stderr if the iteration fails to settle.
double max_eigenvalue(const Matrix& X, double tol = 1e-10,
                      int max_iter = 5000);

/// rho_j = margin * lambda_max(X_j^T X_j / n_j) for each node.
Vector default_step_lengths(const NetworkDataset& data, double margin = 1.05);

/// Dual advance: p_j += tau * sum_{k in N(j)} (beta_j - beta_k), computed
/// for all nodes from the round-t snapshot.
Matrix admm_step_p(const ConsensusState& state, const Topology& topo,
                   double tau);

/// Closed-form coefficient update for node j. Expects state.p_dual already
/// advanced to round t+1 while state.beta still holds round t.
///
/// Derivation sketch: the consensus objective is
///   sum_j [ (m/(2N)) |ytilde_j - X_j b_j|^2 + lambda |b_j|_1 ]
/// subject to b_j = b_k on edges; at consensus this is m times the pooled
/// lasso (1/(2N)) |ytilde - X b|^2 + lambda |b|_1, so the minimizer is the
/// pooled one. The m/N data weight (1/n_j for equal node sizes) is the
/// scaling under which the step-length condition
/// rho_j > lambda_max(X_j^T X_j / n_j) is exactly what keeps the proximal
/// linearization positive semidefinite. Splitting each edge through a
/// midpoint variable and linearizing the local quadratic around the
/// previous iterate gives
///   b_j <- S_{lambda w_j}( w_j [ rho_j b_j - g_j - p_j
///                                + tau sum_k (b_j + b_k) ] ),
/// with g_j = (m/N) X_j^T (X_j b_j - ytilde_j) and
/// w_j = 1 / (2 tau |N(j)| + rho_j). Each ordered edge pair carries its own
/// half-penalty, hence the factor 2 in the weight; with these constants the
/// recursion's fixed point is exactly the pooled-lasso minimizer (the
/// printed_update_rule flag switches to the published constants instead).
Vector admm_step_beta(const ConsensusState& state, int j, const Matrix& x_j,
                      const Vector& ytilde_j, const AdmmConfig& cfg,
                      const Topology& topo);

/// T bulk-synchronous rounds of the dual and coefficient updates from
/// init_beta (duals start at zero). With track_convergence the run is
/// extended by reference_multiplier x rounds to obtain a high-accuracy
/// reference, per-round Frobenius distances to it are recorded, and a
/// log-linear fit over [fit_window_begin, fit_window_end] estimates the
/// geometric rate. Aborts with a diagnostic if successive-iterate distance
/// grows for divergence_patience consecutive rounds.
InnerResult run_inner(const NetworkDataset& data,
                      const std::vector<Vector>& ytilde, const Topology& topo,
                      const Matrix& init_beta, const AdmmConfig& cfg);

}  // namespace desmr
