#pragma once

#include <vector>

#include "desmr/datagen.hpp"
#include "desmr/metrics.hpp"
#include "desmr/types.hpp"

namespace desmr {

/// Pooled Gram data for the network-wide least-squares problem
///   (1/(2N)) sum_j |t_j - X_j b|^2 + lambda |b|_1,
/// cached once per dataset (the targets t_j change across calls, X does
/// not).
struct PooledGram {
  Matrix q;          // sum_j X_j^T X_j / N
  Index total_rows;  // N
};

PooledGram pooled_gram(const NetworkDataset& data);

/// Descending log-spaced lasso grid; head is the smallest lambda that
/// zeroes the fit (|X^T t / N|_inf), tail is 1e-3 of it.
Vector lasso_lambda_grid_from_gradient(const Vector& xty_over_n, int k);

/// BIC selection over a lasso path on the pooled problem with per-node
/// targets. Fits are warm-started down the grid; the mean squared loss is
/// evaluated through the Gram identity, so cost is independent of N.
BicResult select_lambda_lasso_bic(const PooledGram& pg,
                                  const NetworkDataset& data,
                                  const std::vector<Vector>& targets,
                                  int grid_size, double zero_tol);

}  // namespace desmr
