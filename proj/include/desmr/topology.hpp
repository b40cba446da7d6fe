#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "desmr/types.hpp"

namespace desmr {

/// Undirected connected communication graph over m nodes.
/// Invariants enforced on construction: symmetric adjacency, zero diagonal,
/// neighbor lists sorted and consistent with the adjacency, graph connected.
/// Immutable after construction; safe to share across threads.
struct Topology {
  int m = 0;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> adjacency;
  std::vector<std::vector<int>> neighbors;
  std::vector<int> degrees;

  /// Builds neighbor lists/degrees from an adjacency matrix and validates
  /// all invariants. Throws std::invalid_argument on violation.
  static Topology from_adjacency(
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> adj);
};

/// Erdos-Renyi G(m, p): each unordered pair is an edge independently with
/// probability edge_prob. Disconnected draws are rejected and the whole
/// graph resampled, up to max_attempts; throws std::runtime_error after
/// that (edge_prob too small for m). Deterministic given seed.
Topology gen_erdos_renyi(int m, double edge_prob, std::uint64_t seed,
                         int max_attempts = 1000);

/// Complete graph on m >= 2 nodes.
Topology gen_complete(int m);

/// Builds a Topology from 1-based node pairs. Duplicate edges are accepted
/// idempotently; self-loops and disconnected results are errors.
Topology topology_from_edges(const std::vector<std::pair<int, int>>& edges,
                             int m);

/// Reads an edge-list file: one "j k" pair per line, 1-based indices,
/// '#' starts a comment.
Topology load_topology(const std::string& path, int m);

/// True iff breadth-first traversal from node 0 reaches all m nodes.
bool is_connected(const Topology& t);

/// Metropolis-Hastings mixing matrix: w_jk = 1/(1+max(d_j,d_k)) on edges,
/// diagonal fills the slack. Symmetric, doubly stochastic, nonnegative.
Matrix metropolis_weights(const Topology& t);

/// Returns a copy of t with one extra node appended, connected to every
/// existing node.
Topology add_fully_connected_node(const Topology& t);

}  // namespace desmr
