#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "desmr/rounds.hpp"
#include "desmr/topology.hpp"
#include "doctest.h"

using namespace desmr;

namespace {

void check_invariants(const Topology& t) {
  REQUIRE(t.m >= 2);
  for (int j = 0; j < t.m; ++j) {
    CHECK_FALSE(t.adjacency(j, j));
    CHECK(t.degrees[j] == static_cast<int>(t.neighbors[j].size()));
    for (int k = 0; k < t.m; ++k) CHECK(t.adjacency(j, k) == t.adjacency(k, j));
    for (size_t i = 0; i + 1 < t.neighbors[j].size(); ++i)
      CHECK(t.neighbors[j][i] < t.neighbors[j][i + 1]);
    for (int k : t.neighbors[j]) CHECK(t.adjacency(j, k));
  }
  CHECK(is_connected(t));
}

}  // namespace

TEST_SUITE("topology") {

TEST_CASE("erdos renyi draws are connected and valid") {
  for (std::uint64_t seed : {1u, 2u, 3u, 17u}) {
    const Topology t = gen_erdos_renyi(10, 0.3, seed);
    check_invariants(t);
  }
}

TEST_CASE("erdos renyi forced edges at p=1") {
  const Topology pair = gen_erdos_renyi(2, 1.0, 5);
  CHECK(pair.degrees == std::vector<int>{1, 1});

  const Topology full = gen_erdos_renyi(5, 1.0, 5);
  for (int d : full.degrees) CHECK(d == 4);
}

TEST_CASE("erdos renyi is deterministic in the seed") {
  const Topology a = gen_erdos_renyi(12, 0.35, 99);
  const Topology b = gen_erdos_renyi(12, 0.35, 99);
  CHECK(a.adjacency == b.adjacency);
}

TEST_CASE("erdos renyi gives up when connectivity is hopeless") {
  CHECK_THROWS_AS(gen_erdos_renyi(40, 0.001, 1, 10), std::runtime_error);
}

TEST_CASE("complete graphs") {
  const Topology tri = gen_complete(3);
  CHECK(tri.degrees == std::vector<int>{2, 2, 2});
  const Topology ten = gen_complete(10);
  for (int d : ten.degrees) CHECK(d == 9);
  const Topology pair = gen_complete(2);
  CHECK(pair.degrees == std::vector<int>{1, 1});
  check_invariants(ten);
}

TEST_CASE("edge list construction") {
  const Topology path = topology_from_edges({{1, 2}, {2, 3}}, 3);
  CHECK(path.degrees == std::vector<int>{1, 2, 1});

  CHECK_THROWS_AS(topology_from_edges({{1, 2}}, 3), std::invalid_argument);
  CHECK_THROWS_AS(topology_from_edges({{1, 1}, {1, 2}}, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(topology_from_edges({{0, 2}}, 2), std::invalid_argument);

  // duplicates are idempotent
  const Topology dup = topology_from_edges({{1, 2}, {2, 1}, {1, 2}}, 2);
  CHECK(dup.degrees == std::vector<int>{1, 1});
}

TEST_CASE("edge list file parsing") {
  const std::string path = "topo_edges_test.txt";
  {
    std::ofstream out(path);
    out << "# comment line\n1 2\n2 3  # trailing comment\n\n3 4\n";
  }
  const Topology t = load_topology(path, 4);
  CHECK(t.degrees == std::vector<int>{1, 2, 2, 1});
  std::remove(path.c_str());
}

TEST_CASE("connectivity check") {
  CHECK(is_connected(gen_complete(4)));

  // two disjoint edges, assembled by hand since constructors reject it
  Topology t;
  t.m = 4;
  t.adjacency.resize(4, 4);
  t.adjacency.setConstant(false);
  t.adjacency(0, 1) = t.adjacency(1, 0) = true;
  t.adjacency(2, 3) = t.adjacency(3, 2) = true;
  t.neighbors = {{1}, {0}, {3}, {2}};
  t.degrees = {1, 1, 1, 1};
  CHECK_FALSE(is_connected(t));

  std::vector<std::pair<int, int>> path_edges;
  for (int j = 1; j < 10; ++j) path_edges.emplace_back(j, j + 1);
  CHECK(is_connected(topology_from_edges(path_edges, 10)));
}

TEST_CASE("metropolis weights") {
  const Matrix full = metropolis_weights(gen_complete(3));
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) CHECK(full(j, k) == doctest::Approx(1.0 / 3));

  const Matrix path =
      metropolis_weights(topology_from_edges({{1, 2}, {2, 3}}, 3));
  CHECK(path(0, 1) == doctest::Approx(1.0 / 3));
  CHECK(path(0, 0) == doctest::Approx(2.0 / 3));

  const Matrix star =
      metropolis_weights(topology_from_edges({{1, 2}, {1, 3}, {1, 4}}, 4));
  CHECK(star(0, 0) == doctest::Approx(1.0 / 4));

  // doubly stochastic, symmetric, nonnegative
  const Matrix w = metropolis_weights(gen_erdos_renyi(9, 0.4, 3));
  CHECK((w - w.transpose()).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(w.minCoeff() >= 0.0);
  for (int j = 0; j < 9; ++j) {
    CHECK(std::abs(w.row(j).sum() - 1.0) < 1e-12);
    CHECK(std::abs(w.col(j).sum() - 1.0) < 1e-12);
  }
}

TEST_CASE("hub augmentation") {
  const Topology t = add_fully_connected_node(gen_erdos_renyi(9, 0.3, 2));
  CHECK(t.m == 10);
  CHECK(t.degrees[9] == 9);
  check_invariants(t);
}

TEST_CASE("run_rounds identity and consensus fixed points") {
  const Topology t = gen_complete(4);
  std::vector<double> init = {2.5, 2.5, 2.5, 2.5};

  auto identity = [](int, int j, const std::vector<double>& prev) {
    return prev[j];
  };
  CHECK(run_rounds(t, init, identity, 7) == init);

  auto average = [&](int, int j, const std::vector<double>& prev) {
    double sum = prev[j];
    for (int k : t.neighbors[j]) sum += prev[k];
    return sum / (1.0 + t.degrees[j]);
  };
  CHECK(run_rounds(t, init, average, 5) == init);
}

TEST_CASE("run_rounds neighbor averaging matches the dense mixing operator") {
  const Topology t = topology_from_edges({{1, 2}, {2, 3}, {3, 4}, {4, 5}}, 5);
  std::vector<double> init = {1.0, -2.0, 0.5, 3.0, -1.0};

  auto average = [&](int, int j, const std::vector<double>& prev) {
    double sum = prev[j];
    for (int k : t.neighbors[j]) sum += prev[k];
    return sum / (1.0 + t.degrees[j]);
  };

  Matrix mix = Matrix::Zero(5, 5);
  for (int j = 0; j < 5; ++j) {
    mix(j, j) = 1.0 / (1.0 + t.degrees[j]);
    for (int k : t.neighbors[j]) mix(j, k) = 1.0 / (1.0 + t.degrees[j]);
  }
  Vector expected = Eigen::Map<Vector>(init.data(), 5);
  const int rounds = 20;
  for (int r = 0; r < rounds; ++r) expected = (mix * expected).eval();

  const auto got = run_rounds(t, init, average, rounds);
  const double mean =
      std::accumulate(init.begin(), init.end(), 0.0) / init.size();
  for (int j = 0; j < 5; ++j) {
    CHECK(got[j] == doctest::Approx(expected[j]).epsilon(1e-12));
    CHECK(std::abs(got[j] - mean) < 1.0);  // drifting toward consensus
  }
}

TEST_CASE("run_rounds is schedule independent bit for bit") {
  const Topology t = gen_erdos_renyi(8, 0.4, 7);
  std::vector<double> init(8);
  for (int j = 0; j < 8; ++j) init[j] = std::sin(j * 1.7) * 3.0;

  auto update = [&](int round, int j, const std::vector<double>& prev) {
    double acc = 0.37 * prev[j] + 0.01 * round;
    for (int k : t.neighbors[j]) acc += std::cos(prev[k]) / (1 + t.degrees[j]);
    return acc;
  };

  auto noop = [](int, const std::vector<double>&) {};
  const std::vector<int> natural = {0, 1, 2, 3, 4, 5, 6, 7};
  const std::vector<int> shuffled = {5, 2, 7, 0, 6, 1, 4, 3};
  const auto a = run_rounds(t, init, update, 9, noop, &natural);
  const auto b = run_rounds(t, init, update, 9, noop, &shuffled);
  for (int j = 0; j < 8; ++j) CHECK(a[j] == b[j]);  // exact equality
}

}  // TEST_SUITE
