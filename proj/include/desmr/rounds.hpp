#pragma once

#include <vector>

#include "desmr/topology.hpp"

namespace desmr {

/// Bulk-synchronous round execution. Per round, every node's new state is
/// computed by `update(round, j, prev)` where `prev` is the snapshot of all
/// states at the previous round; the contract is that update reads only
/// prev[j] and prev[k] for k in neighbors[j] and is a pure function of them.
/// Under that contract the result is independent of the order in which
/// nodes are evaluated (an explicit `order` can be passed to demonstrate
/// this; nullptr means natural order).
///
/// `observer(round, states)` is called after each round with the fresh
/// states; pass a no-capture lambda doing nothing if unneeded.
template <class State, class Update, class Observer>
std::vector<State> run_rounds(const Topology& topo, std::vector<State> state,
                              Update&& update, int rounds, Observer&& observer,
                              const std::vector<int>* order = nullptr) {
  std::vector<State> next(state.size());
  for (int t = 0; t < rounds; ++t) {
    if (order) {
      for (int j : *order) next[j] = update(t, j, state);
    } else {
      for (int j = 0; j < topo.m; ++j) next[j] = update(t, j, state);
    }
    state.swap(next);
    observer(t, state);
  }
  return state;
}

template <class State, class Update>
std::vector<State> run_rounds(const Topology& topo, std::vector<State> state,
                              Update&& update, int rounds) {
  return run_rounds(topo, std::move(state), std::forward<Update>(update),
                    rounds, [](int, const std::vector<State>&) {});
}

}  // namespace desmr
