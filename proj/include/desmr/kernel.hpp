#pragma once

#include <functional>

#include "desmr/types.hpp"

namespace desmr {

/// Compactly supported density kernel: evaluate(u) = 0 for |u| >= radius,
/// unit integral, bounded derivative inside the support.
struct KernelFn {
  std::function<double(double)> evaluate;
  double support_radius = 1.0;
};

/// Sixth-degree polynomial bump on [-1, 1]:
///   -(315/64) u^6 + (735/64) u^4 - (525/64) u^2 + 105/64,
/// zero outside. Integrates to one, vanishes continuously at +-1, and its
/// second moment is zero (higher-order kernel).
double biweight_kernel(double u);

KernelFn biweight();

/// Kernel density estimate at zero: (1/(n h)) sum_i K(r_i / h).
/// Returns the raw value; callers that divide by it should apply
/// clamp_density first.
double estimate_density(const Vector& residuals, double h, const KernelFn& k);

/// Lower clamp protecting downstream divisions; a value at the floor marks
/// a degenerate estimate.
inline double clamp_density(double f, double floor_value) {
  return f < floor_value ? floor_value : f;
}

/// Newton-style response transformation: for each row,
///   ytilde_i = x_i^T b0 - (1/f0) (1[y_i <= x_i^T b0] - 1/2),
/// so |ytilde_i - x_i^T b0| = 1/(2 f0) exactly. Requires f0 > 0.
Vector pseudo_response(const Matrix& X, const Vector& y, const Vector& beta0,
                       double f0);

/// Shrinking bandwidth sequence
///   h_v = sqrt(s log(n) / n) + s^{-1/2} (c0 s^2 log(n) / m)^{(v+1)/2}
/// (natural log). Nonincreasing in v whenever the geometric base is < 1.
struct BandwidthSchedule {
  int s_hat = 1;      // assumed sparsity level, >= 1
  double c0 = 0.013;  // keeps the geometric base below one
  int n = 1;
  int m = 1;
};

double bandwidth(int v, const BandwidthSchedule& sched);

}  // namespace desmr
