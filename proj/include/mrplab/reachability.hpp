#pragma once

#include <array>
#include <deque>
#include <vector>

#include "mrplab/mrp.hpp"

namespace mrplab {

// True iff no trajectory started from the initial distribution can visit both
// `a` and `b`. Runs a search over the chain augmented with two bits recording
// whether `a` and `b` have been visited; a positive-probability path to a
// state with both bits set exists iff the event has positive probability.
inline bool check_disjoint(const MrpSpec& spec, StateId a, StateId b) {
  if (a == b) return false;
  const std::size_t n = spec.size();
  auto bits_for = [a, b](StateId s) { return (s == a ? 1u : 0u) | (s == b ? 2u : 0u); };
  std::vector<std::array<char, 4>> seen(n, std::array<char, 4>{0, 0, 0, 0});
  std::deque<std::pair<StateId, unsigned>> queue;
  for (const InitialMass& m : spec.initial()) {
    if (!(m.p > 0.0)) continue;
    const unsigned bits = bits_for(m.state);
    if (!seen[m.state.index()][bits]) {
      seen[m.state.index()][bits] = 1;
      queue.emplace_back(m.state, bits);
    }
  }
  while (!queue.empty()) {
    const auto [s, bits] = queue.front();
    queue.pop_front();
    if (bits == 3u) return false;
    for (const Edge& e : spec.edges(s)) {
      if (!(e.p > 0.0) || e.to.is_terminal()) continue;
      const unsigned next = bits | bits_for(e.to);
      if (!seen[e.to.index()][next]) {
        seen[e.to.index()][next] = 1;
        queue.emplace_back(e.to, next);
      }
    }
  }
  return true;
}

// Topological order of the non-terminal states, or empty when the positive
// edges contain a cycle.
inline std::vector<StateId> topological_order(const MrpSpec& spec) {
  const std::size_t n = spec.size();
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const Edge& e : spec.edges(StateId(i))) {
      if (e.p > 0.0 && !e.to.is_terminal()) ++indegree[e.to.index()];
    }
  }
  std::vector<StateId> order;
  order.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) order.emplace_back(i);
  }
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (const Edge& e : spec.edges(order[head])) {
      if (e.p > 0.0 && !e.to.is_terminal() && --indegree[e.to.index()] == 0) {
        order.push_back(e.to);
      }
    }
  }
  if (order.size() != n) return {};
  return order;
}

inline bool is_acyclic(const MrpSpec& spec) {
  return spec.size() == 0 || !topological_order(spec).empty();
}

}  // namespace mrplab
