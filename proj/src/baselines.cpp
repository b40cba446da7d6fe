#include "desmr/baselines.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "desmr/metrics.hpp"
#include "desmr/pooled_fit.hpp"
#include "desmr/rounds.hpp"

namespace desmr {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

/// BIC-selected LAD-lasso path on one (X, y), warm-started down the grid.
BicResult lad_bic_path(const Matrix& X, const Vector& y,
                       const LadFitOptions& opts) {
  const Vector grid = lambda_grid(X, y, opts.lambda_grid_size);
  Vector warm = Vector::Zero(X.cols());
  auto fit = [&](double lambda) {
    LadSolveOptions solve = opts.solve;
    solve.warm_start = warm;
    const SolverReport report = solve_lad_lasso({X, y, lambda}, solve);
    warm = report.beta;
    return report.beta;
  };
  auto mean_loss = [&](const Vector& beta) {
    return (y - X * beta).lpNorm<1>() / static_cast<double>(X.rows());
  };
  return bic_select(grid, fit, mean_loss, X.rows(), opts.zero_tol);
}

}  // namespace

MethodResult pooled_mr(const NetworkDataset& data, const LadFitOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const Index p = data.p();
  const Index total = data.total_rows();
  Matrix X(total, p);
  Vector y(total);
  Index at = 0;
  for (const auto& node : data.nodes) {
    X.middleRows(at, node.n()) = node.X;
    y.segment(at, node.n()) = node.y;
    at += node.n();
  }
  const BicResult best = lad_bic_path(X, y, opts);

  MethodResult result;
  result.method_id = "pooled_mr";
  result.per_node_beta = best.beta.transpose().replicate(data.m(), 1);
  result.lambda_selected = best.lambda;
  result.wall_time = seconds_since(start);
  return result;
}

MethodResult local_mr(const NetworkDataset& data, const LadFitOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  MethodResult result;
  result.method_id = "local_mr";
  result.per_node_beta.resize(data.m(), data.p());
  for (int j = 0; j < data.m(); ++j) {
    const auto& node = data.nodes[j];
    result.per_node_beta.row(j) = lad_bic_path(node.X, node.y, opts).beta;
  }
  result.wall_time = seconds_since(start);
  return result;
}

MethodResult avg_mr(const MethodResult& local) {
  MethodResult result;
  result.method_id = "avg_mr";
  const Vector mean = local.per_node_beta.colwise().mean();
  result.per_node_beta =
      mean.transpose().replicate(local.per_node_beta.rows(), 1);
  result.wall_time = local.wall_time;
  return result;
}

DsubgdResult d_subgd(const NetworkDataset& data, const Topology& topo,
                     const Matrix& init, const DsubgdOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  if (init.rows() != topo.m || init.cols() != data.p())
    throw std::invalid_argument("init must be m x p");
  const Matrix weights = metropolis_weights(topo);

  auto sign0 = [](double v) {
    return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
  };
  auto node_objective = [&](int j, const Vector& beta) {
    return lad_objective(data.nodes[j].X, data.nodes[j].y, opts.lambda, beta);
  };

  std::vector<Vector> state(topo.m);
  for (int j = 0; j < topo.m; ++j) state[j] = init.row(j);

  DsubgdResult out;
  out.objective_trace.reserve(opts.steps);
  double prev_step = -1.0;
  int growth_streak = 0;
  Matrix prev_beta = init;

  auto update = [&](int t, int j, const std::vector<Vector>& prev) {
    Vector mixed = weights(j, j) * prev[j];
    for (int k : topo.neighbors[j]) mixed += weights(j, k) * prev[k];

    const auto& node = data.nodes[j];
    const Vector resid = node.y - node.X * prev[j];
    Vector grad = -node.X.transpose() *
                  resid.unaryExpr(sign0) / static_cast<double>(node.n());
    if (opts.lambda > 0.0)
      grad += opts.lambda * prev[j].unaryExpr(sign0);

    const double eta = opts.eta0 / std::sqrt(static_cast<double>(t + 1));
    return (mixed - eta * grad).eval();
  };

  auto observer = [&](int /*t*/, const std::vector<Vector>& cur) {
    double obj = 0.0;
    Matrix beta_t(topo.m, data.p());
    for (int j = 0; j < topo.m; ++j) {
      obj += node_objective(j, cur[j]);
      beta_t.row(j) = cur[j];
    }
    out.objective_trace.push_back(obj / topo.m);

    const double step = (beta_t - prev_beta).norm();
    if (prev_step >= 0.0 && step > prev_step && step > 1e-12)
      ++growth_streak;
    else
      growth_streak = 0;
    if (growth_streak >= opts.divergence_patience)
      throw std::runtime_error("subgradient descent diverging; lower eta0");
    prev_step = step;
    prev_beta = std::move(beta_t);
  };

  state = run_rounds(topo, std::move(state), update, opts.steps, observer);

  out.result.method_id = "d_subgd";
  out.result.iterations = opts.steps;
  out.result.per_node_beta.resize(topo.m, data.p());
  for (int j = 0; j < topo.m; ++j) out.result.per_node_beta.row(j) = state[j];
  out.result.wall_time = seconds_since(start);
  return out;
}

MethodResult delr(const NetworkDataset& data, const Topology& topo,
                  const DelrOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<Vector> targets;
  targets.reserve(data.m());
  for (const auto& node : data.nodes) targets.push_back(node.y);

  const PooledGram pg = pooled_gram(data);
  const BicResult selected = select_lambda_lasso_bic(
      pg, data, targets, opts.lambda_grid_size, opts.zero_tol);

  AdmmConfig cfg;
  cfg.tau = opts.tau;
  cfg.rho = default_step_lengths(data, opts.rho_margin);
  cfg.lambda = selected.lambda;
  cfg.rounds = opts.rounds;
  const Matrix init = Matrix::Zero(topo.m, data.p());
  const InnerResult inner = run_inner(data, targets, topo, init, cfg);

  MethodResult result;
  result.method_id = "delr";
  result.per_node_beta = inner.state.beta;
  result.lambda_selected = selected.lambda;
  result.iterations = opts.rounds;
  result.wall_time = seconds_since(start);
  return result;
}

}  // namespace desmr
