#include "desmr/pooled_fit.hpp"

#include <cmath>
#include <stdexcept>

#include "desmr/lasso_cd.hpp"

namespace desmr {

PooledGram pooled_gram(const NetworkDataset& data) {
  if (data.m() == 0) throw std::invalid_argument("empty dataset");
  PooledGram pg;
  pg.total_rows = data.total_rows();
  pg.q = Matrix::Zero(data.p(), data.p());
  for (const auto& node : data.nodes)
    pg.q.selfadjointView<Eigen::Lower>().rankUpdate(node.X.transpose());
  pg.q = pg.q.selfadjointView<Eigen::Lower>();
  pg.q /= static_cast<double>(pg.total_rows);
  return pg;
}

Vector lasso_lambda_grid_from_gradient(const Vector& xty_over_n, int k) {
  if (k < 2) throw std::invalid_argument("grid needs k >= 2");
  const double head = xty_over_n.lpNorm<Eigen::Infinity>();
  Vector grid(k);
  for (int i = 0; i < k; ++i)
    grid[i] = head * std::pow(10.0, -3.0 * i / static_cast<double>(k - 1));
  return grid;
}

BicResult select_lambda_lasso_bic(const PooledGram& pg,
                                  const NetworkDataset& data,
                                  const std::vector<Vector>& targets,
                                  int grid_size, double zero_tol) {
  if (static_cast<int>(targets.size()) != data.m())
    throw std::invalid_argument("one target vector per node required");
  const double n_total = static_cast<double>(pg.total_rows);

  Vector c = Vector::Zero(data.p());
  double tt = 0.0;
  for (int j = 0; j < data.m(); ++j) {
    c += data.nodes[j].X.transpose() * targets[j];
    tt += targets[j].squaredNorm();
  }
  c /= n_total;
  tt /= n_total;

  const Vector grid = lasso_lambda_grid_from_gradient(c, grid_size);

  Vector warm = Vector::Zero(data.p());
  auto fit = [&](double lambda) {
    LassoCdOptions opts;
    opts.warm_start = warm;
    Vector beta = lasso_cd_gram(pg.q, c, lambda, opts);
    warm = beta;
    return beta;
  };
  auto mean_loss = [&](const Vector& beta) {
    // (1/N) |t - X b|^2 expanded through the cached Gram
    return std::max(tt - 2.0 * c.dot(beta) + beta.dot(pg.q * beta), 0.0);
  };
  return bic_select(grid, fit, mean_loss, pg.total_rows, zero_tol);
}

}  // namespace desmr
