#include "desmr/surrogate.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "desmr/metrics.hpp"
#include "desmr/pooled_fit.hpp"

namespace desmr {

namespace {

int support_size(const Vector& beta, double zero_tol) {
  int count = 0;
  for (Index i = 0; i < beta.size(); ++i)
    count += std::abs(beta[i]) > zero_tol;
  return count;
}

}  // namespace

OuterResult run_outer_loop(const NetworkDataset& data, const Topology& topo,
                           const SurrogateConfig& cfg) {
  if (data.m() != topo.m)
    throw std::invalid_argument("data/topology node counts differ");
  if (!is_connected(topo)) throw std::invalid_argument("topology not connected");
  if (cfg.outer_rounds < 0 || cfg.inner_rounds < 1)
    throw std::invalid_argument("need outer_rounds >= 0, inner_rounds >= 1");

  const int m = data.m();
  const Index p = data.p();

  OuterResult result;
  if (cfg.init_beta) {
    if (cfg.init_beta->rows() != m || cfg.init_beta->cols() != p)
      throw std::invalid_argument("init_beta must be m x p");
    result.outer.beta_hat = *cfg.init_beta;
  } else {
    result.outer.beta_hat = local_mr(data, cfg.init).per_node_beta;
  }
  result.outer.f_hat = Vector::Zero(m);
  if (data.beta_star)
    result.outer.init_l2 = l2_error(result.outer.beta_hat, *data.beta_star);

  const PooledGram pg = pooled_gram(data);
  const Vector rho = default_step_lengths(data, cfg.rho_margin);

  for (int v = 0; v < cfg.outer_rounds; ++v) {
    std::vector<Vector> ytilde(m);
    Vector h_used(m);
    int clamped = 0;
    for (int j = 0; j < m; ++j) {
      const auto& node = data.nodes[j];
      const Vector beta_j = result.outer.beta_hat.row(j);
      const Vector residuals = node.y - node.X * beta_j;
      BandwidthSchedule sched;
      sched.s_hat = cfg.oracle_s > 0
                        ? cfg.oracle_s
                        : std::max(1, support_size(beta_j, cfg.zero_tol));
      sched.c0 = cfg.c0;
      sched.n = static_cast<int>(node.n());
      sched.m = m;
      h_used[j] = bandwidth(v, sched);

      const double raw = estimate_density(residuals, h_used[j], cfg.kernel);
      const double f = clamp_density(raw, cfg.density_floor);
      if (raw < cfg.density_floor) {
        ++clamped;
        std::cerr << "density estimate clamped at node " << (j + 1)
                  << " (outer " << v << "): " << raw << " -> " << f << "\n";
      }
      result.outer.f_hat[j] = f;
      ytilde[j] = pseudo_response(node.X, node.y, beta_j, f);
    }
    result.outer.clamped_nodes += clamped;
    if (2 * clamped > m)
      throw std::runtime_error(
          "density estimate degenerate on most nodes at outer iteration " +
          std::to_string(v) + "; initializer is too far off");

    double lambda;
    if (cfg.fixed_lambda) {
      lambda = *cfg.fixed_lambda;
    } else if (cfg.use_theoretical_lambda) {
      const int s = cfg.oracle_s > 0 ? cfg.oracle_s : 1;
      lambda = lambda_theoretical(v, cfg.theory_const, pg.total_rows,
                                  data.nodes[0].n(), s);
    } else {
      lambda = select_lambda_lasso_bic(pg, data, ytilde, cfg.lambda_grid_size,
                                       cfg.zero_tol)
                   .lambda;
    }

    AdmmConfig inner_cfg;
    inner_cfg.tau = cfg.tau;
    inner_cfg.rho = rho;
    inner_cfg.lambda = lambda;
    inner_cfg.rounds = cfg.inner_rounds;
    inner_cfg.total_rows = pg.total_rows;
    inner_cfg.track_convergence = cfg.track_inner_convergence;
    InnerResult inner = run_inner(data, ytilde, topo,
                                  result.outer.beta_hat, inner_cfg);
    result.outer.beta_hat = inner.state.beta;
    result.consensus = std::move(inner.state);
    if (cfg.track_inner_convergence)
      result.inner_traces.push_back(std::move(inner.trace));

    for (int j = 0; j < m; ++j) {
      OuterTraceRow row;
      row.v = v;
      row.node = j + 1;
      row.l2_error =
          data.beta_star
              ? (result.outer.beta_hat.row(j).transpose() - *data.beta_star)
                    .squaredNorm()
              : std::numeric_limits<double>::quiet_NaN();
      row.f_hat = result.outer.f_hat[j];
      row.h_v = h_used[j];
      row.lambda = lambda;
      result.outer.trace.push_back(row);
    }
    if (data.beta_star)
      result.outer.l2_trace.push_back(
          l2_error(result.outer.beta_hat, *data.beta_star));
    result.outer.v = v + 1;
  }

  if (cfg.outer_rounds == 0) {
    // No inner pass ran; expose the initializer as the consensus state.
    result.consensus.beta = result.outer.beta_hat;
    result.consensus.p_dual = Matrix::Zero(m, p);
    result.consensus.t = 0;
  }
  return result;
}

MethodResult desmr(const NetworkDataset& data, const Topology& topo,
                   const SurrogateConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const OuterResult run = run_outer_loop(data, topo, cfg);
  MethodResult result;
  result.method_id = "desmr";
  result.per_node_beta = run.outer.beta_hat;
  result.iterations = cfg.outer_rounds * cfg.inner_rounds;
  result.wall_time = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  return result;
}

void write_outer_trace_csv(const std::string& path,
                           const std::vector<OuterTraceRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "v,node,l2_error,f_hat,h_v,lambda_selected\n";
  out.precision(12);
  for (const auto& row : rows)
    out << row.v << "," << row.node << "," << row.l2_error << "," << row.f_hat
        << "," << row.h_v << "," << row.lambda << "\n";
}

void write_inner_trace_csv(const std::string& path,
                           const ConvergenceTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "round,frobenius_distance,max_pairwise_consensus_gap\n";
  out.precision(12);
  for (size_t t = 0; t < trace.distance.size(); ++t) {
    const double gap =
        t < trace.consensus_gap.size() ? trace.consensus_gap[t] : 0.0;
    out << t << "," << trace.distance[t] << "," << gap << "\n";
  }
}

}  // namespace desmr
