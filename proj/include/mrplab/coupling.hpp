#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mrplab/errors.hpp"
#include "mrplab/mrp.hpp"
#include "mrplab/reachability.hpp"
#include "mrplab/rng.hpp"
#include "mrplab/transport.hpp"

namespace mrplab {

inline constexpr std::size_t kDefaultEnumerationCap = 100'000;

// One complete trajectory from a fixed start state; `path` ends with the
// terminal state.
struct TrajectoryAtom {
  std::vector<StateId> path;
  double prob = 0.0;
};

// Every trajectory from `start` with its exact probability. Parallel edges to
// the same successor are merged, so paths are distinct.
inline std::vector<TrajectoryAtom> enumerate_trajectories(const MrpSpec& spec, StateId start,
                                                          std::size_t cap = kDefaultEnumerationCap) {
  if (start.is_terminal() || start.index() >= spec.size()) {
    throw UsageError("enumeration must start from a non-terminal state");
  }
  if (!is_acyclic(spec)) {
    throw CyclicSpecError("trajectory enumeration needs an acyclic process; use the Monte-Carlo "
                          "crossing-time estimate instead");
  }
  // Successors with merged probabilities, in first-appearance order.
  std::vector<std::vector<std::pair<StateId, double>>> succ(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    for (const Edge& e : spec.edges(StateId(i))) {
      if (!(e.p > 0.0)) continue;
      auto& row = succ[i];
      auto it = std::find_if(row.begin(), row.end(), [&e](const auto& x) { return x.first == e.to; });
      if (it == row.end()) {
        row.emplace_back(e.to, e.p);
      } else {
        it->second += e.p;
      }
    }
  }

  std::vector<TrajectoryAtom> atoms;
  struct Frame {
    std::size_t next_child;
    double prob;
  };
  std::vector<StateId> path{start};
  std::vector<Frame> stack{{0, 1.0}};
  while (!stack.empty()) {
    Frame& top = stack.back();
    const auto& children = succ[path.back().index()];
    if (top.next_child == children.size()) {
      stack.pop_back();
      path.pop_back();
      continue;
    }
    const auto [to, p] = children[top.next_child++];
    const double prob = top.prob * p;
    if (to.is_terminal()) {
      if (atoms.size() == cap) {
        throw EnumerationCapExceeded("more than " + std::to_string(cap) + " trajectories from '" +
                                     spec.name(start) + "'; use the Monte-Carlo crossing-time estimate");
      }
      TrajectoryAtom atom{path, prob};
      atom.path.push_back(StateId::terminal());
      atoms.push_back(std::move(atom));
    } else {
      path.push_back(to);
      stack.push_back({0, prob});
    }
  }
  return atoms;
}

// First t >= 1 such that {S_0..S_t} and {S'_1..S'_t} share a state. Paths are
// padded with the terminal state, which both eventually contain.
inline std::size_t crossing_cost(std::span<const StateId> first, std::span<const StateId> second) {
  if (first.empty() || second.empty()) throw UsageError("crossing cost of an empty path");
  auto at = [](std::span<const StateId> p, std::size_t t) {
    return t < p.size() ? p[t] : StateId::terminal();
  };
  auto contains = [](const std::vector<StateId>& set, StateId s) {
    return std::find(set.begin(), set.end(), s) != set.end();
  };
  std::vector<StateId> seen_first{first[0]};
  std::vector<StateId> seen_second;
  const std::size_t limit = std::max(first.size(), second.size()) + 1;
  for (std::size_t t = 1; t <= limit; ++t) {
    const StateId a = at(first, t);
    const StateId b = at(second, t);
    seen_first.push_back(a);
    seen_second.push_back(b);
    if (contains(seen_second, a) || contains(seen_first, b)) return t;
  }
  throw UsageError("crossing cost: paths must end with the terminal state");
}

// Path form of a sampled trajectory (terminal appended).
inline std::vector<StateId> path_of(const Trajectory& t) {
  std::vector<StateId> p = t.states;
  p.push_back(StateId::terminal());
  return p;
}

struct CrossingTime {
  double value = 0.0;
  CouplingResult coupling;
  std::size_t atoms_from = 0;
  std::size_t atoms_to = 0;
};

inline TransportProblem crossing_problem(const std::vector<TrajectoryAtom>& from,
                                         const std::vector<TrajectoryAtom>& to) {
  TransportProblem problem;
  problem.cost = Matrix(from.size(), to.size());
  for (const auto& a : from) problem.supply.push_back(a.prob);
  for (const auto& b : to) problem.demand.push_back(b.prob);
  for (std::size_t i = 0; i < from.size(); ++i) {
    for (std::size_t j = 0; j < to.size(); ++j) {
      problem.cost(i, j) = static_cast<double>(crossing_cost(from[i].path, to[j].path));
    }
  }
  return problem;
}

// H(s, s'): minimum over couplings of the two trajectory laws of the expected
// crossing time, solved exactly as a transportation problem over the
// enumerated trajectories.
inline CrossingTime crossing_time_exact(const MrpSpec& spec, StateId s, StateId s_prime,
                                        std::size_t cap = kDefaultEnumerationCap) {
  const auto from = enumerate_trajectories(spec, s, cap);
  const auto to = enumerate_trajectories(spec, s_prime, cap);
  CrossingTime out;
  out.atoms_from = from.size();
  out.atoms_to = to.size();
  out.coupling = solve_transportation(crossing_problem(from, to));
  out.value = out.coupling.optimal_cost;
  return out;
}

struct CrossingEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

// Crossing time under the independent coupling, averaged over n sampled
// pairs. Its expectation is an upper bound on H(s, s').
inline CrossingEstimate crossing_time_upper(const MrpSpec& spec, StateId s, StateId s_prime,
                                            std::size_t n, std::uint64_t seed,
                                            std::size_t step_cap = kDefaultStepCap) {
  if (n < 2) throw PreconditionError("crossing-time estimate needs at least 2 samples");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream rng_a(derive_seed(seed, {i, 0}));
    RandomStream rng_b(derive_seed(seed, {i, 1}));
    const auto a = path_of(sample_trajectory_from(spec, s, rng_a, step_cap));
    const auto b = path_of(sample_trajectory_from(spec, s_prime, rng_b, step_cap));
    const double c = static_cast<double>(crossing_cost(a, b));
    sum += c;
    sum_sq += c * c;
  }
  const double k = static_cast<double>(n);
  const double mean = sum / k;
  const double var = std::max(0.0, (sum_sq - k * mean * mean) / (k - 1.0));
  return {mean, std::sqrt(var / k), n};
}

}  // namespace mrplab
