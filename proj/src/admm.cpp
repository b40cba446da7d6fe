#include "desmr/admm.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "desmr/rounds.hpp"
#include "desmr/soft_threshold.hpp"

namespace desmr {

double max_eigenvalue(const Matrix& X, double tol, int max_iter) {
  const Index n = X.rows(), p = X.cols();
  if (n < 1 || p < 1) throw std::invalid_argument("empty matrix");
  const Matrix gram = X.transpose() * X / static_cast<double>(n);

  Vector v = Vector::Ones(p) / std::sqrt(static_cast<double>(p));
  double eig = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector gv = gram * v;
    const double norm = gv.norm();
    if (norm == 0.0) return 0.0;  // X was all zeros
    gv /= norm;
    const double next = gv.dot(gram * gv);
    const bool settled = std::abs(next - eig) <= tol * std::max(1.0, std::abs(next));
    eig = next;
    v = std::move(gv);
    if (settled && it > 0) return eig;
  }
  std::cerr << "max_eigenvalue: power iteration did not settle, using trace bound\n";
  return gram.trace();
}

Vector default_step_lengths(const NetworkDataset& data, double margin) {
  // bound for the proximal term: rho_j > lambda_max((m/N) X_j^T X_j); for
  // equal node sizes this is exactly lambda_max(X_j^T X_j / n_j)
  const double total = static_cast<double>(data.total_rows());
  Vector rho(data.m());
  for (int j = 0; j < data.m(); ++j) {
    const double scale =
        data.m() * static_cast<double>(data.nodes[j].n()) / total;
    rho[j] = margin * scale * max_eigenvalue(data.nodes[j].X);
  }
  return rho;
}

Matrix admm_step_p(const ConsensusState& state, const Topology& topo,
                   double tau) {
  Matrix p_next = state.p_dual;
  for (int j = 0; j < topo.m; ++j)
    for (int k : topo.neighbors[j])
      p_next.row(j) += tau * (state.beta.row(j) - state.beta.row(k));
  return p_next;
}

Vector admm_step_beta(const ConsensusState& state, int j, const Matrix& x_j,
                      const Vector& ytilde_j, const AdmmConfig& cfg,
                      const Topology& topo) {
  const Index total = cfg.total_rows > 0 ? cfg.total_rows : x_j.rows();
  const double degree = static_cast<double>(topo.degrees[j]);
  const int m = topo.m;

  const Vector beta_j = state.beta.row(j);
  Vector mix = degree * beta_j;
  for (int k : topo.neighbors[j]) mix += state.beta.row(k);

  double grad_scale, weight, threshold;
  if (cfg.printed_update_rule) {
    grad_scale = 1.0 / static_cast<double>(total);
    weight = 1.0 / (cfg.tau * degree + cfg.rho[j]);
    threshold = 2.0 * cfg.lambda * weight;
  } else {
    grad_scale = static_cast<double>(m) / static_cast<double>(total);
    weight = 1.0 / (2.0 * cfg.tau * degree + cfg.rho[j]);
    threshold = cfg.lambda * weight;
  }
  const Vector grad = x_j.transpose() * (x_j * beta_j - ytilde_j) * grad_scale;

  const Vector inner = cfg.rho[j] * beta_j - grad -
                       state.p_dual.row(j).transpose() + cfg.tau * mix;
  Vector out = soft_threshold((weight * inner).eval(), threshold);
  if (!out.allFinite())
    throw std::runtime_error("non-finite coefficient update at node " +
                             std::to_string(j + 1));
  return out;
}

namespace {

struct NodeState {
  Vector beta;
  Vector p;
};

struct LinearFit {
  double slope = 0.0;
  double r_squared = 0.0;
  bool valid = false;
};

LinearFit fit_log_distance(const std::vector<double>& dist, int begin,
                           int end) {
  LinearFit fit;
  std::vector<double> xs, ys;
  for (int t = begin; t <= end && t < static_cast<int>(dist.size()); ++t) {
    if (dist[t] > 1e-300) {
      xs.push_back(static_cast<double>(t));
      ys.push_back(std::log(dist[t]));
    }
  }
  if (xs.size() < 3) return fit;
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  const double sxx_c = sxx - sx * sx / n;
  const double sxy_c = sxy - sx * sy / n;
  const double syy_c = syy - sy * sy / n;
  if (sxx_c <= 0.0 || syy_c <= 0.0) return fit;
  fit.slope = sxy_c / sxx_c;
  fit.r_squared = (sxy_c * sxy_c) / (sxx_c * syy_c);
  fit.valid = true;
  return fit;
}

double max_consensus_gap(const Matrix& beta, const Topology& topo) {
  double gap = 0.0;
  for (int j = 0; j < topo.m; ++j)
    for (int k : topo.neighbors[j])
      if (k > j)
        gap = std::max(
            gap, (beta.row(j) - beta.row(k)).lpNorm<Eigen::Infinity>());
  return gap;
}

}  // namespace

InnerResult run_inner(const NetworkDataset& data,
                      const std::vector<Vector>& ytilde, const Topology& topo,
                      const Matrix& init_beta, const AdmmConfig& cfg_in) {
  const int m = topo.m;
  const Index p = data.p();
  if (data.m() != m || static_cast<int>(ytilde.size()) != m)
    throw std::invalid_argument("data/topology size mismatch");
  if (init_beta.rows() != m || init_beta.cols() != p)
    throw std::invalid_argument("init_beta must be m x p");
  if (cfg_in.rho.size() != m)
    throw std::invalid_argument("need one step length per node");
  if (!is_connected(topo)) throw std::invalid_argument("topology not connected");

  AdmmConfig cfg = cfg_in;
  if (cfg.total_rows == 0) cfg.total_rows = data.total_rows();

  std::vector<NodeState> init(m);
  for (int j = 0; j < m; ++j) {
    init[j].beta = init_beta.row(j);
    init[j].p = Vector::Zero(p);
  }

  auto as_state = [&](const std::vector<NodeState>& nodes) {
    ConsensusState s;
    s.beta.resize(m, p);
    s.p_dual.resize(m, p);
    for (int j = 0; j < m; ++j) {
      s.beta.row(j) = nodes[j].beta;
      s.p_dual.row(j) = nodes[j].p;
    }
    return s;
  };

  auto update = [&](int /*t*/, int j, const std::vector<NodeState>& prev) {
    NodeState next;
    next.p = prev[j].p;
    for (int k : topo.neighbors[j])
      next.p += cfg.tau * (prev[j].beta - prev[k].beta);

    // Same closed form as admm_step_beta, on the per-node snapshot.
    const Matrix& x_j = data.nodes[j].X;
    const double degree = static_cast<double>(topo.degrees[j]);
    Vector mix = degree * prev[j].beta;
    for (int k : topo.neighbors[j]) mix += prev[k].beta;
    double grad_scale, weight, threshold;
    if (cfg.printed_update_rule) {
      grad_scale = 1.0 / static_cast<double>(cfg.total_rows);
      weight = 1.0 / (cfg.tau * degree + cfg.rho[j]);
      threshold = 2.0 * cfg.lambda * weight;
    } else {
      grad_scale = static_cast<double>(m) / static_cast<double>(cfg.total_rows);
      weight = 1.0 / (2.0 * cfg.tau * degree + cfg.rho[j]);
      threshold = cfg.lambda * weight;
    }
    const Vector grad =
        x_j.transpose() * (x_j * prev[j].beta - ytilde[j]) * grad_scale;
    const Vector inner =
        cfg.rho[j] * prev[j].beta - grad - next.p + cfg.tau * mix;
    next.beta = soft_threshold((weight * inner).eval(), threshold);
    if (!next.beta.allFinite())
      throw std::runtime_error("non-finite coefficient update at node " +
                               std::to_string(j + 1));
    return next;
  };

  InnerResult result;
  std::vector<Matrix> history;  // B_t per round when tracking
  if (cfg.track_convergence) history.reserve(cfg.rounds);

  Matrix prev_beta = init_beta;
  double prev_step = -1.0;
  int growth_streak = 0;

  auto observer = [&](int t, const std::vector<NodeState>& nodes) {
    Matrix beta_t(m, p);
    Vector dual_sum = Vector::Zero(p);
    for (int j = 0; j < m; ++j) {
      beta_t.row(j) = nodes[j].beta;
      dual_sum += nodes[j].p;
    }
    result.trace.max_dual_sum = std::max(
        result.trace.max_dual_sum, dual_sum.lpNorm<Eigen::Infinity>());

    const double step = (beta_t - prev_beta).norm();
    if (prev_step >= 0.0 && step > prev_step && step > 1e-12)
      ++growth_streak;
    else
      growth_streak = 0;
    if (growth_streak >= cfg.divergence_patience)
      throw std::runtime_error(
          "consensus iteration diverging: successive-iterate distance grew "
          "for " +
          std::to_string(growth_streak) + " rounds (round " +
          std::to_string(t) + ", step " + std::to_string(step) +
          "); check step lengths against the local Gram spectra");
    prev_step = step;
    prev_beta = beta_t;

    if (cfg.track_convergence) {
      result.trace.consensus_gap.push_back(max_consensus_gap(beta_t, topo));
      history.push_back(std::move(beta_t));
    }
  };

  auto final_nodes =
      run_rounds(topo, init, update, cfg.rounds, observer);
  result.state = as_state(final_nodes);
  result.state.t = cfg.rounds;

  if (cfg.track_convergence) {
    // High-accuracy reference from a long continuation of the same
    // iteration.
    const int extra = cfg.reference_multiplier * cfg.rounds;
    growth_streak = 0;  // reference run keeps the guard but restarts it
    auto ref_nodes = run_rounds(topo, final_nodes, update, extra,
                                [](int, const std::vector<NodeState>&) {});
    Matrix reference(m, p);
    for (int j = 0; j < m; ++j) reference.row(j) = ref_nodes[j].beta;

    result.trace.distance.reserve(history.size());
    for (const Matrix& beta_t : history)
      result.trace.distance.push_back((beta_t - reference).norm());

    result.trace.fit_begin = cfg.fit_window_begin;
    result.trace.fit_end =
        std::min(cfg.fit_window_end, static_cast<int>(history.size()) - 1);
    const LinearFit fit = fit_log_distance(
        result.trace.distance, result.trace.fit_begin, result.trace.fit_end);
    if (fit.valid) {
      // distance^2 decays like gamma^t, so log(distance) has slope
      // log(gamma)/2
      result.trace.gamma_hat = std::exp(2.0 * fit.slope);
      result.trace.r_squared = fit.r_squared;
    }
  }
  return result;
}

}  // namespace desmr
