#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mrplab/errors.hpp"
#include "mrplab/rng.hpp"

namespace mrplab {

// Reserved name of the absorbing terminal state in files and CLI output.
inline constexpr std::string_view kTerminalName = "__terminal__";

// Index of a non-terminal state in an MrpSpec, or the terminal sentinel.
class StateId {
 public:
  static constexpr std::uint32_t kTerminalIndex = 0xffffffffu;

  constexpr StateId() noexcept = default;
  constexpr explicit StateId(std::size_t index) noexcept
      : index_(static_cast<std::uint32_t>(index)) {}

  static constexpr StateId terminal() noexcept { return StateId{}; }

  constexpr bool is_terminal() const noexcept { return index_ == kTerminalIndex; }
  constexpr std::size_t index() const noexcept { return index_; }

  constexpr auto operator<=>(const StateId&) const noexcept = default;

 private:
  std::uint32_t index_ = kTerminalIndex;
};

// Reward law attached to one transition. Mean and variance are closed forms.
class RewardDist {
 public:
  enum class Kind { kConstant, kUniform, kGaussian };

  static RewardDist constant(double value) { return RewardDist(Kind::kConstant, value, 0.0); }
  // Uniform on [mean - half_width, mean + half_width].
  static RewardDist uniform(double mean, double half_width) {
    return RewardDist(Kind::kUniform, mean, half_width);
  }
  static RewardDist gaussian(double mean, double sd) {
    return RewardDist(Kind::kGaussian, mean, sd);
  }
  // Zero-mean law with the given variance, uniform when `gaussian` is false.
  static RewardDist zero_mean_with_variance(double variance, bool gaussian = true) {
    return gaussian ? RewardDist::gaussian(0.0, std::sqrt(variance))
                    : RewardDist::uniform(0.0, std::sqrt(3.0 * variance));
  }

  Kind kind() const noexcept { return kind_; }
  double mean() const noexcept { return mean_; }
  // Half-width for uniform, standard deviation for gaussian, 0 for constant.
  double spread() const noexcept { return spread_; }

  double variance() const noexcept {
    switch (kind_) {
      case Kind::kConstant: return 0.0;
      case Kind::kUniform: return spread_ * spread_ / 3.0;
      case Kind::kGaussian: return spread_ * spread_;
    }
    return 0.0;
  }

  bool valid() const noexcept {
    return std::isfinite(mean_) && std::isfinite(spread_) && spread_ >= 0.0;
  }

  template <class Engine>
  double sample(Engine& rng) const {
    switch (kind_) {
      case Kind::kConstant: return mean_;
      case Kind::kUniform: return mean_ + spread_ * (2.0 * uniform01(rng) - 1.0);
      case Kind::kGaussian: {
        if (spread_ == 0.0) return mean_;
        std::normal_distribution<double> normal(mean_, spread_);
        return normal(rng);
      }
    }
    return mean_;
  }

  bool operator==(const RewardDist&) const = default;

 private:
  RewardDist(Kind kind, double mean, double spread) : kind_(kind), mean_(mean), spread_(spread) {}

  Kind kind_ = Kind::kConstant;
  double mean_ = 0.0;
  double spread_ = 0.0;
};

inline std::string_view to_string(RewardDist::Kind kind) {
  switch (kind) {
    case RewardDist::Kind::kConstant: return "constant";
    case RewardDist::Kind::kUniform: return "uniform";
    case RewardDist::Kind::kGaussian: return "gaussian";
  }
  return "constant";
}

struct Edge {
  StateId to;
  double p = 0.0;
  RewardDist reward = RewardDist::constant(0.0);
};

struct InitialMass {
  StateId state;
  double p = 0.0;
};

// Terminating Markov reward process: named states, per-state outgoing edges
// (successor, probability, reward law) and an initial distribution.
// Immutable once built; structural problems (duplicate names, dangling
// indices) throw, semantic ones are reported by validate().
class MrpSpec {
 public:
  MrpSpec() = default;

  MrpSpec(std::vector<std::string> states, std::vector<std::vector<Edge>> transitions,
          std::vector<InitialMass> initial)
      : states_(std::move(states)),
        transitions_(std::move(transitions)),
        initial_(std::move(initial)) {
    if (transitions_.size() != states_.size()) {
      throw InvalidSpecError("transition table has " + std::to_string(transitions_.size()) +
                             " rows for " + std::to_string(states_.size()) + " states");
    }
    for (std::size_t i = 0; i < states_.size(); ++i) {
      if (states_[i] == kTerminalName) {
        throw InvalidSpecError("state name '" + states_[i] + "' is reserved");
      }
      if (!index_.emplace(states_[i], StateId(i)).second) {
        throw InvalidSpecError("duplicate state name '" + states_[i] + "'");
      }
    }
    for (std::size_t i = 0; i < transitions_.size(); ++i) {
      for (const Edge& e : transitions_[i]) {
        if (!e.to.is_terminal() && e.to.index() >= states_.size()) {
          throw InvalidSpecError("edge from '" + states_[i] + "' targets index " +
                                 std::to_string(e.to.index()));
        }
      }
    }
    for (const InitialMass& m : initial_) {
      if (m.state.is_terminal() || m.state.index() >= states_.size()) {
        throw InvalidSpecError("initial distribution references an undeclared state");
      }
    }
  }

  std::size_t size() const noexcept { return states_.size(); }
  const std::vector<std::string>& states() const noexcept { return states_; }
  const std::vector<Edge>& edges(StateId s) const { return transitions_[s.index()]; }
  const std::vector<std::vector<Edge>>& transitions() const noexcept { return transitions_; }
  const std::vector<InitialMass>& initial() const noexcept { return initial_; }

  std::string name(StateId s) const {
    return s.is_terminal() ? std::string(kTerminalName) : states_[s.index()];
  }

  std::optional<StateId> find(std::string_view name) const {
    if (name == kTerminalName) return StateId::terminal();
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Non-terminal state by name; throws UnknownStateError otherwise.
  StateId id(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) throw UnknownStateError(std::string(name));
    return it->second;
  }

  // Initial probability mass as a dense vector over states.
  std::vector<double> initial_vector() const {
    std::vector<double> d(size(), 0.0);
    for (const InitialMass& m : initial_) d[m.state.index()] += m.p;
    return d;
  }

 private:
  std::vector<std::string> states_;
  std::vector<std::vector<Edge>> transitions_;
  std::vector<InitialMass> initial_;
  std::unordered_map<std::string, StateId> index_;
};

// ---------------------------------------------------------------------------
// Validation

inline constexpr double kProbabilityTolerance = 1e-12;

struct Violation {
  std::string state;  // empty when the rule is global
  std::string rule;
  std::string message;
};

using ValidationReport = std::vector<Violation>;

inline ValidationReport validate(const MrpSpec& spec) {
  ValidationReport out;
  const std::size_t n = spec.size();
  if (n == 0) {
    out.push_back({"", "no-states", "the process declares no states"});
    return out;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const StateId s(i);
    double sum = 0.0;
    for (const Edge& e : spec.edges(s)) {
      if (!(e.p >= 0.0 && e.p <= 1.0)) {
        out.push_back({spec.name(s), "probability-range",
                       "edge to '" + spec.name(e.to) + "' has probability " + std::to_string(e.p)});
      }
      if (!e.reward.valid()) {
        out.push_back({spec.name(s), "reward-params",
                       "edge to '" + spec.name(e.to) + "' has an invalid reward law"});
      }
      sum += e.p;
    }
    if (!(std::abs(sum - 1.0) <= kProbabilityTolerance)) {
      out.push_back({spec.name(s), "row-sum",
                     "outgoing probabilities sum to " + std::to_string(sum)});
    }
  }

  // Backward search from the terminal over positive-probability edges.
  std::vector<std::vector<std::size_t>> preds(n);
  std::vector<char> reaches_terminal(n, 0);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i) {
    for (const Edge& e : spec.edges(StateId(i))) {
      if (!(e.p > 0.0)) continue;
      if (e.to.is_terminal()) {
        if (!reaches_terminal[i]) {
          reaches_terminal[i] = 1;
          queue.push_back(i);
        }
      } else {
        preds[e.to.index()].push_back(i);
      }
    }
  }
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t u : preds[v]) {
      if (!reaches_terminal[u]) {
        reaches_terminal[u] = 1;
        queue.push_back(u);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!reaches_terminal[i]) {
      out.push_back({spec.name(StateId(i)), "terminal-unreachable",
                     "no positive-probability path to the terminal state"});
    }
  }

  double init_sum = 0.0;
  std::vector<char> visited(n, 0);
  for (const InitialMass& m : spec.initial()) {
    if (!(m.p >= 0.0 && m.p <= 1.0)) {
      out.push_back({spec.name(m.state), "initial-range",
                     "initial probability " + std::to_string(m.p)});
    }
    init_sum += m.p;
    if (m.p > 0.0 && !visited[m.state.index()]) {
      visited[m.state.index()] = 1;
      queue.push_back(m.state.index());
    }
  }
  if (!(std::abs(init_sum - 1.0) <= kProbabilityTolerance)) {
    out.push_back({"", "initial-sum", "initial probabilities sum to " + std::to_string(init_sum)});
  }
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (const Edge& e : spec.edges(StateId(v))) {
      if (e.p > 0.0 && !e.to.is_terminal() && !visited[e.to.index()]) {
        visited[e.to.index()] = 1;
        queue.push_back(e.to.index());
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!visited[i]) {
      out.push_back({spec.name(StateId(i)), "unvisited",
                     "zero probability of being visited from the initial distribution"});
    }
  }
  return out;
}

inline std::string describe(const Violation& v) {
  return (v.state.empty() ? std::string("<global>") : v.state) + ": " + v.rule + ": " + v.message;
}

inline void require_valid(const MrpSpec& spec) {
  const auto report = validate(spec);
  if (!report.empty()) {
    std::string msg = "invalid process (" + std::to_string(report.size()) + " violations)";
    for (const auto& v : report) msg += "\n  " + describe(v);
    throw InvalidSpecError(msg);
  }
}

// ---------------------------------------------------------------------------
// Trajectories and datasets

inline constexpr std::size_t kDefaultStepCap = 10'000'000;

// S_0..S_{T-1} and R_1..R_T; rewards[t] is earned leaving states[t]. The
// terminal state is implicit after the last entry.
struct Trajectory {
  std::vector<StateId> states;
  std::vector<double> rewards;

  std::size_t length() const noexcept { return states.size(); }
  bool operator==(const Trajectory&) const = default;
};

// FNV-1a over a canonical rendering of the spec; probabilities and reward
// parameters are hashed by their exact bit patterns.
inline std::uint64_t fingerprint(const MrpSpec& spec) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed_bytes = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  auto feed_u64 = [&](std::uint64_t v) { feed_bytes(&v, sizeof v); };
  auto feed_double = [&](double v) { feed_bytes(&v, sizeof v); };
  feed_u64(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto& name = spec.states()[i];
    feed_u64(name.size());
    feed_bytes(name.data(), name.size());
    const auto& edges = spec.edges(StateId(i));
    feed_u64(edges.size());
    for (const Edge& e : edges) {
      feed_u64(e.to.is_terminal() ? StateId::kTerminalIndex : e.to.index());
      feed_double(e.p);
      feed_u64(static_cast<std::uint64_t>(e.reward.kind()));
      feed_double(e.reward.mean());
      feed_double(e.reward.spread());
    }
  }
  feed_u64(spec.initial().size());
  for (const InitialMass& m : spec.initial()) {
    feed_u64(m.state.index());
    feed_double(m.p);
  }
  return h;
}

struct Dataset {
  std::vector<Trajectory> trajectories;
  std::uint64_t spec_fingerprint = 0;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return trajectories.size(); }
  bool operator==(const Dataset&) const = default;
};

namespace detail {

template <class Engine>
const Edge& pick_edge(const std::vector<Edge>& edges, Engine& rng) {
  double u = uniform01(rng);
  const Edge* last_positive = nullptr;
  for (const Edge& e : edges) {
    if (!(e.p > 0.0)) continue;
    last_positive = &e;
    u -= e.p;
    if (u < 0.0) return e;
  }
  // Rounding left u slightly above the row sum; take the last live edge.
  return *last_positive;
}

}  // namespace detail

// Runs the chain from `start` until it enters the terminal state.
template <class Engine>
Trajectory sample_trajectory_from(const MrpSpec& spec, StateId start, Engine& rng,
                                  std::size_t step_cap = kDefaultStepCap) {
  Trajectory traj;
  StateId s = start;
  while (!s.is_terminal()) {
    if (traj.states.size() >= step_cap) {
      throw StepCapExceeded("trajectory exceeded " + std::to_string(step_cap) +
                            " steps; the process is close to non-terminating");
    }
    const Edge& e = detail::pick_edge(spec.edges(s), rng);
    traj.states.push_back(s);
    traj.rewards.push_back(e.reward.sample(rng));
    s = e.to;
  }
  return traj;
}

template <class Engine>
StateId sample_initial(const MrpSpec& spec, Engine& rng) {
  double u = uniform01(rng);
  StateId last;
  for (const InitialMass& m : spec.initial()) {
    if (!(m.p > 0.0)) continue;
    last = m.state;
    u -= m.p;
    if (u < 0.0) return m.state;
  }
  return last;
}

// S_0 ~ d, then transitions and rewards per the spec.
template <class Engine>
Trajectory sample_trajectory(const MrpSpec& spec, Engine& rng,
                             std::size_t step_cap = kDefaultStepCap) {
  const StateId start = sample_initial(spec, rng);
  return sample_trajectory_from(spec, start, rng, step_cap);
}

// Trajectory i is drawn from its own stream seeded by derive_seed(seed, {i}).
inline Dataset sample_dataset(const MrpSpec& spec, std::size_t n, std::uint64_t seed,
                              std::size_t step_cap = kDefaultStepCap) {
  if (n == 0) throw PreconditionError("a dataset needs at least one trajectory");
  Dataset ds;
  ds.spec_fingerprint = fingerprint(spec);
  ds.seed = seed;
  ds.trajectories.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream rng(derive_seed(seed, {i}));
    ds.trajectories.push_back(sample_trajectory(spec, rng, step_cap));
  }
  return ds;
}

// Checks a dataset against the spec it claims to come from.
inline ValidationReport validate_dataset(const MrpSpec& spec, const Dataset& ds) {
  ValidationReport out;
  if (ds.trajectories.empty()) out.push_back({"", "empty-dataset", "no trajectories"});
  if (ds.spec_fingerprint != fingerprint(spec)) {
    out.push_back({"", "fingerprint", "dataset was not generated from this process"});
  }
  auto edge_ok = [&spec](StateId from, StateId to) {
    for (const Edge& e : spec.edges(from)) {
      if (e.to == to && e.p > 0.0) return true;
    }
    return false;
  };
  for (std::size_t i = 0; i < ds.trajectories.size(); ++i) {
    const Trajectory& t = ds.trajectories[i];
    const std::string where = "trajectory " + std::to_string(i);
    if (t.states.empty() || t.rewards.size() != t.states.size()) {
      out.push_back({"", "trajectory-shape", where + " has mismatched states/rewards"});
      continue;
    }
    for (double r : t.rewards) {
      if (!std::isfinite(r)) {
        out.push_back({"", "non-finite-reward", where + " contains a non-finite reward"});
        break;
      }
    }
    for (std::size_t k = 0; k < t.states.size(); ++k) {
      if (t.states[k].is_terminal() || t.states[k].index() >= spec.size()) {
        out.push_back({"", "trajectory-state", where + " references an unknown state"});
        break;
      }
      const StateId next = k + 1 < t.states.size() ? t.states[k + 1] : StateId::terminal();
      if (!next.is_terminal() && next.index() >= spec.size()) continue;
      if (!edge_ok(t.states[k], next)) {
        out.push_back({spec.name(t.states[k]), "trajectory-edge",
                       where + " uses a zero-probability edge to '" + spec.name(next) + "'"});
        break;
      }
    }
  }
  return out;
}

}  // namespace mrplab
