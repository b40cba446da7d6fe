#pragma once

#include <string>
#include <vector>

#include "desmr/admm.hpp"
#include "desmr/datagen.hpp"
#include "desmr/lad_solver.hpp"
#include "desmr/topology.hpp"

namespace desmr {

/// One method's estimate on the network: one coefficient row per node
/// (global methods replicate a single row).
struct MethodResult {
  Matrix per_node_beta;
  std::string method_id;
  double wall_time = 0.0;  // seconds, informational only
  int iterations = 0;
  double lambda_selected = 0.0;  // where a single network-wide lambda applies
};

struct LadFitOptions {
  int lambda_grid_size = 20;
  double zero_tol = 1e-4;
  LadSolveOptions solve;
};

/// All rows stacked into one problem, one BIC-selected LAD-lasso fit,
/// result replicated across nodes.
MethodResult pooled_mr(const NetworkDataset& data,
                       const LadFitOptions& opts = {});

/// Independent per-node LAD-lasso fits with per-node BIC selection.
/// This is also the local initializer the surrogate outer loop starts
/// from (same code path, bit-identical results).
MethodResult local_mr(const NetworkDataset& data,
                      const LadFitOptions& opts = {});

/// Every row replaced by the node average of `local`. Idempotent.
MethodResult avg_mr(const MethodResult& local);

struct DsubgdOptions {
  int steps = 500;
  double eta0 = 0.1;  // step size eta0 / sqrt(t)
  double lambda = 0.0;
  int divergence_patience = 10;
};

struct DsubgdResult {
  MethodResult result;
  std::vector<double> objective_trace;  // node-mean penalized LAD objective
};

/// Decentralized subgradient descent: per round each node mixes neighbor
/// estimates through the Metropolis weights and steps along a subgradient
/// of its local penalized LAD objective (subgradient of |.| at 0 taken as
/// 0), with diminishing steps eta0/sqrt(t).
DsubgdResult d_subgd(const NetworkDataset& data, const Topology& topo,
                     const Matrix& init, const DsubgdOptions& opts = {});

struct DelrOptions {
  int rounds = 500;  // budget matched to the surrogate's V x T
  double tau = 1.0;
  double rho_margin = 1.05;
  int lambda_grid_size = 30;
  double zero_tol = 1e-4;
};

/// Decentralized lasso on the raw responses (no transformation): one
/// consensus-ADMM run with lambda chosen by pooled BIC.
MethodResult delr(const NetworkDataset& data, const Topology& topo,
                  const DelrOptions& opts = {});

}  // namespace desmr
