#pragma once

#include <cmath>

#include <Eigen/Dense>

namespace desmr {

inline double soft_threshold(double v, double t) {
  const double shrunk = std::abs(v) - t;
  return shrunk > 0.0 ? (v > 0.0 ? shrunk : -shrunk) : 0.0;
}

/// Coordinate-wise shrinkage sign(v_i) * max(|v_i| - t, 0). Accepts any
/// dense Eigen expression; t must be >= 0.
template <class Derived>
auto soft_threshold(const Eigen::MatrixBase<Derived>& v, double t) {
  return v.unaryExpr([t](double x) { return soft_threshold(x, t); });
}

}  // namespace desmr
