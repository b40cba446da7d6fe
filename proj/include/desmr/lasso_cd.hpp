#pragma once

#include <optional>

#include "desmr/types.hpp"

namespace desmr {

struct LassoCdOptions {
  double tol = 1e-9;     // max coordinate change per sweep
  int max_sweeps = 2000;
  std::optional<Vector> warm_start;
};

/// Cyclic coordinate descent on the Gram form of
///   minimize (1/2) b^T Q b - c^T b + lambda |b|_1
/// with Q positive semidefinite (Q = X^T X / n, c = X^T y / n for the
/// least-squares problem (1/(2n)) |y - X b|^2 + lambda |b|_1).
Vector lasso_cd_gram(const Matrix& q, const Vector& c, double lambda,
                     const LassoCdOptions& opts = {});

/// Convenience wrapper building the Gram form from (X, y).
Vector lasso_cd(const Matrix& X, const Vector& y, double lambda,
                const LassoCdOptions& opts = {});

}  // namespace desmr
