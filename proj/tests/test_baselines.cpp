#include <cmath>

#include "desmr/baselines.hpp"
#include "desmr/metrics.hpp"
#include "doctest.h"

using namespace desmr;

namespace {

NetworkDataset small_network(int m, int n, int p, int s,
                             const NoiseSpec& noise, std::uint64_t seed) {
  return gen_network_data(m, n, p, default_beta_star(p, s),
                          CovMode::homogeneous({1.0, 0.1}),
                          NoiseMode::homogeneous(noise), seed);
}

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("pooling a single node is just the local fit") {
  const NetworkDataset data =
      small_network(1, 50, 8, 3, NoiseSpec::cauchy(0, 1), 5);
  const MethodResult pooled = pooled_mr(data);
  const MethodResult local = local_mr(data);
  CHECK(pooled.per_node_beta == local.per_node_beta);
}

TEST_CASE("identical node data gives identical local fits") {
  NetworkDataset data = small_network(1, 40, 6, 2, NoiseSpec::normal(0, 1), 6);
  data.nodes.push_back(data.nodes[0]);
  data.nodes.push_back(data.nodes[0]);
  const MethodResult local = local_mr(data);
  CHECK(local.per_node_beta.row(1) == local.per_node_beta.row(0));
  CHECK(local.per_node_beta.row(2) == local.per_node_beta.row(0));
}

TEST_CASE("averaging") {
  MethodResult local;
  local.method_id = "local_mr";
  local.per_node_beta.resize(2, 2);
  local.per_node_beta << 1.0, 0.0, 0.0, 1.0;
  const MethodResult avg = avg_mr(local);
  CHECK(avg.per_node_beta(0, 0) == 0.5);
  CHECK(avg.per_node_beta(0, 1) == 0.5);
  CHECK(avg.per_node_beta.row(1) == avg.per_node_beta.row(0));

  // idempotent
  const MethodResult twice = avg_mr(avg);
  CHECK(twice.per_node_beta == avg.per_node_beta);

  MethodResult same;
  same.per_node_beta = Matrix::Ones(3, 4) * 2.5;
  CHECK(avg_mr(same).per_node_beta == same.per_node_beta);
}

TEST_CASE("subgradient descent: zero step leaves equal estimates in place") {
  const NetworkDataset data =
      small_network(4, 20, 5, 2, NoiseSpec::normal(0, 1), 7);
  const Topology topo = gen_complete(4);
  const Matrix init = Matrix::Ones(4, 5) * 0.3;
  DsubgdOptions opts;
  opts.steps = 10;
  opts.eta0 = 0.0;
  const DsubgdResult run = d_subgd(data, topo, init, opts);
  CHECK((run.result.per_node_beta - init).lpNorm<Eigen::Infinity>() < 1e-14);
}

TEST_CASE("subgradient descent: stationary at an interpolating consensus") {
  // noiseless responses, zero penalty, exact truth at every node: the
  // residuals vanish, sign(0) = 0, so the subgradient is zero
  const NetworkDataset data =
      small_network(3, 30, 5, 2, NoiseSpec::none(), 8);
  const Topology topo = gen_complete(3);
  const Matrix init = data.beta_star->transpose().replicate(3, 1);
  DsubgdOptions opts;
  opts.steps = 25;
  opts.eta0 = 0.5;
  opts.lambda = 0.0;
  const DsubgdResult run = d_subgd(data, topo, init, opts);
  CHECK((run.result.per_node_beta - init).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("subgradient descent: objective falls over the first hundred steps") {
  const NetworkDataset data =
      small_network(2, 40, 6, 2, NoiseSpec::none(), 9);
  const Topology topo = gen_complete(2);
  DsubgdOptions opts;
  opts.steps = 100;
  opts.eta0 = 0.1;
  opts.lambda = 0.0;
  const DsubgdResult run =
      d_subgd(data, topo, Matrix::Zero(2, 6), opts);
  REQUIRE(run.objective_trace.size() == 100);
  CHECK(run.objective_trace[99] < run.objective_trace[0]);
  // and the trace is mostly monotone under the diminishing schedule
  int improvements = 0;
  for (int t = 1; t < 100; ++t)
    improvements += run.objective_trace[t] <= run.objective_trace[t - 1];
  CHECK(improvements > 80);
}

TEST_CASE("decentralized lasso: noiseless data is recovered nearly exactly") {
  const NetworkDataset data =
      small_network(4, 60, 10, 3, NoiseSpec::none(), 10);
  const Topology topo = gen_complete(4);
  DelrOptions opts;
  opts.rounds = 500;
  const MethodResult result = delr(data, topo, opts);
  for (int j = 0; j < 4; ++j)
    CHECK((result.per_node_beta.row(j).transpose() - *data.beta_star)
              .lpNorm<Eigen::Infinity>() < 0.02);
}

TEST_CASE("decentralized lasso at desk scale under gaussian noise") {
  const NetworkDataset data =
      small_network(10, 200, 100, 10, NoiseSpec::normal(0, 1), 11);
  const Topology topo = gen_erdos_renyi(10, 0.3, 12);
  const MethodResult result = delr(data, topo, {});
  const double err = l2_error(result.per_node_beta, *data.beta_star);
  CHECK(err > 0.02);
  CHECK(err < 0.5);
}

}  // TEST_SUITE
