#include "desmr/topology.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "desmr/rng.hpp"

namespace desmr {

Topology Topology::from_adjacency(
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> adj) {
  const int m = static_cast<int>(adj.rows());
  if (m < 2 || adj.cols() != m)
    throw std::invalid_argument("adjacency must be square with m >= 2");

  Topology t;
  t.m = m;
  t.neighbors.resize(m);
  t.degrees.resize(m);
  for (int j = 0; j < m; ++j) {
    if (adj(j, j))
      throw std::invalid_argument("self-loop at node " + std::to_string(j + 1));
    for (int k = 0; k < m; ++k) {
      if (adj(j, k) != adj(k, j))
        throw std::invalid_argument("adjacency not symmetric");
      if (adj(j, k)) t.neighbors[j].push_back(k);
    }
    t.degrees[j] = static_cast<int>(t.neighbors[j].size());
  }
  t.adjacency = std::move(adj);
  if (!is_connected(t)) throw std::invalid_argument("graph is not connected");
  return t;
}

Topology gen_erdos_renyi(int m, double edge_prob, std::uint64_t seed,
                         int max_attempts) {
  if (m < 2) throw std::invalid_argument("need m >= 2 nodes");
  if (!(edge_prob > 0.0 && edge_prob <= 1.0))
    throw std::invalid_argument("edge probability must be in (0, 1]");

  Rng rng(seed);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> adj(m, m);
    adj.setConstant(false);
    for (int j = 0; j < m; ++j)
      for (int k = j + 1; k < m; ++k)
        if (rng.uniform() < edge_prob) adj(j, k) = adj(k, j) = true;
    try {
      return Topology::from_adjacency(std::move(adj));
    } catch (const std::invalid_argument&) {
      // disconnected draw, resample
    }
  }
  throw std::runtime_error(
      "no connected graph after " + std::to_string(max_attempts) +
      " attempts; edge probability too small for m=" + std::to_string(m));
}

Topology gen_complete(int m) {
  if (m < 2) throw std::invalid_argument("need m >= 2 nodes");
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> adj(m, m);
  adj.setConstant(true);
  adj.diagonal().setConstant(false);
  return Topology::from_adjacency(std::move(adj));
}

Topology topology_from_edges(const std::vector<std::pair<int, int>>& edges,
                             int m) {
  if (m < 2) throw std::invalid_argument("need m >= 2 nodes");
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> adj(m, m);
  adj.setConstant(false);
  for (const auto& [a, b] : edges) {
    if (a < 1 || a > m || b < 1 || b > m)
      throw std::invalid_argument("edge endpoint out of range [1, m]");
    if (a == b)
      throw std::invalid_argument("self-loop edge (" + std::to_string(a) +
                                  ", " + std::to_string(b) + ")");
    adj(a - 1, b - 1) = adj(b - 1, a - 1) = true;  // 1-based at the boundary
  }
  return Topology::from_adjacency(std::move(adj));
}

Topology load_topology(const std::string& path, int m) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);
  std::vector<std::pair<int, int>> edges;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    int a = 0, b = 0;
    if (ls >> a >> b) edges.emplace_back(a, b);
  }
  return topology_from_edges(edges, m);
}

bool is_connected(const Topology& t) {
  if (t.m == 0) return false;
  std::vector<char> seen(t.m, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int j = frontier.front();
    frontier.pop();
    for (int k : t.neighbors[j]) {
      if (!seen[k]) {
        seen[k] = 1;
        ++reached;
        frontier.push(k);
      }
    }
  }
  return reached == t.m;
}

Matrix metropolis_weights(const Topology& t) {
  Matrix w = Matrix::Zero(t.m, t.m);
  for (int j = 0; j < t.m; ++j) {
    double off = 0.0;
    for (int k : t.neighbors[j]) {
      w(j, k) = 1.0 / (1.0 + std::max(t.degrees[j], t.degrees[k]));
      off += w(j, k);
    }
    w(j, j) = 1.0 - off;
  }
  return w;
}

Topology add_fully_connected_node(const Topology& t) {
  const int m = t.m + 1;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> adj(m, m);
  adj.setConstant(false);
  adj.topLeftCorner(t.m, t.m) = t.adjacency;
  for (int j = 0; j < t.m; ++j) adj(j, m - 1) = adj(m - 1, j) = true;
  return Topology::from_adjacency(std::move(adj));
}

}  // namespace desmr
