#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mrplab/errors.hpp"
#include "mrplab/linalg.hpp"
#include "mrplab/mrp.hpp"
#include "mrplab/reachability.hpp"

namespace mrplab {

// Closed-form quantities of a terminating MRP. Entry [s][x] of `occupancy` is
// E[N(x) | S_0 = s], the expected number of visits to x starting from s.
struct AnalysisReport {
  std::shared_ptr<const MrpSpec> spec;
  std::vector<double> values;
  Matrix occupancy;
  std::vector<double> occupancy_from_d;
  std::vector<double> visit_prob;
  std::vector<double> one_step_var;
  std::vector<double> expected_horizon;
  double sigma2_min = 0.0;
  double sigma2_max = 0.0;

  std::size_t size() const noexcept { return values.size(); }
  StateId id(std::string_view name) const { return spec->id(name); }
};

namespace detail {

inline void check_state(const AnalysisReport& report, StateId s) {
  if (s.is_terminal() || s.index() >= report.size()) {
    throw UnknownStateError(s.is_terminal() ? std::string(kTerminalName)
                                            : "#" + std::to_string(s.index()));
  }
}

// I - Q over the non-terminal states.
inline Matrix transient_system(const MrpSpec& spec) {
  const std::size_t n = spec.size();
  Matrix a = Matrix::identity(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const Edge& e : spec.edges(StateId(i))) {
      if (!e.to.is_terminal()) a(i, e.to.index()) -= e.p;
    }
  }
  return a;
}

}  // namespace detail

inline AnalysisReport analyze(std::shared_ptr<const MrpSpec> spec) {
  require_valid(*spec);
  const MrpSpec& m = *spec;
  const std::size_t n = m.size();

  const LuDecomposition lu(detail::transient_system(m));

  std::vector<double> mean_reward(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const Edge& e : m.edges(StateId(i))) mean_reward[i] += e.p * e.reward.mean();
  }

  AnalysisReport r;
  r.values = lu.solve(mean_reward);
  r.occupancy = lu.inverse();
  r.occupancy_from_d = lu.solve_transposed(m.initial_vector());

  r.expected_horizon.assign(n, 0.0);
  r.visit_prob.assign(n, 0.0);
  r.one_step_var.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (double v : r.occupancy.row(i)) r.expected_horizon[i] += v;
    // Strong Markov: E[N(s)] = P(s in tau) * E[N(s) | S_0 = s].
    r.visit_prob[i] = r.occupancy_from_d[i] / r.occupancy(i, i);

    // Var(R + V(S') | S = s), centred on the one-step mean for stability.
    const auto& edges = m.edges(StateId(i));
    double mean = 0.0;
    for (const Edge& e : edges) {
      const double next = e.to.is_terminal() ? 0.0 : r.values[e.to.index()];
      mean += e.p * (e.reward.mean() + next);
    }
    double var = 0.0;
    for (const Edge& e : edges) {
      const double next = e.to.is_terminal() ? 0.0 : r.values[e.to.index()];
      const double dev = e.reward.mean() + next - mean;
      var += e.p * (e.reward.variance() + dev * dev);
    }
    r.one_step_var[i] = var;
  }
  r.sigma2_min = *std::min_element(r.one_step_var.begin(), r.one_step_var.end());
  r.sigma2_max = *std::max_element(r.one_step_var.begin(), r.one_step_var.end());
  r.spec = std::move(spec);
  return r;
}

inline AnalysisReport analyze(const MrpSpec& spec) {
  return analyze(std::make_shared<const MrpSpec>(spec));
}

// ---------------------------------------------------------------------------
// Weightings over states: J(pi) = sum pi(s) V(s). Negative weights allowed.

class Weighting {
 public:
  Weighting() = default;

  static Weighting point(StateId s) {
    Weighting w;
    w.add(s, 1.0);
    return w;
  }
  // {s: +1, s': -1}; J is then the advantage V(s) - V(s').
  static Weighting advantage(StateId s, StateId s_prime) {
    Weighting w;
    w.add(s, 1.0);
    w.add(s_prime, -1.0);
    return w;
  }
  static Weighting initial(const MrpSpec& spec) {
    Weighting w;
    for (const InitialMass& m : spec.initial()) w.add(m.state, m.p);
    return w;
  }
  static Weighting from_names(const MrpSpec& spec,
                              const std::vector<std::pair<std::string, double>>& entries) {
    Weighting w;
    for (const auto& [name, weight] : entries) w.add(spec.id(name), weight);
    if (!w.has_nonzero()) throw PreconditionError("weighting has no nonzero entry");
    return w;
  }

  void add(StateId s, double weight) {
    if (s.is_terminal()) throw UsageError("cannot weight the terminal state");
    weights_[s] += weight;
  }

  bool has_nonzero() const {
    return std::any_of(weights_.begin(), weights_.end(),
                       [](const auto& kv) { return kv.second != 0.0; });
  }

  const std::map<StateId, double>& entries() const noexcept { return weights_; }

 private:
  std::map<StateId, double> weights_;
};

inline double weighted_value(const AnalysisReport& report, const Weighting& pi) {
  double j = 0.0;
  for (const auto& [s, w] : pi.entries()) {
    detail::check_state(report, s);
    j += w * report.values[s.index()];
  }
  return j;
}

// eta_pi(x) = sum_s pi(s) E[N(x) | S_0 = s].
inline std::vector<double> weighted_occupancy(const AnalysisReport& report, const Weighting& pi) {
  std::vector<double> eta(report.size(), 0.0);
  for (const auto& [s, w] : pi.entries()) {
    detail::check_state(report, s);
    const auto row = report.occupancy.row(s.index());
    for (std::size_t x = 0; x < eta.size(); ++x) eta[x] += w * row[x];
  }
  return eta;
}

// lim n * MSE of first-visit MC at s:
//   (1 / P(s in tau)) * sum_x E[N(x) | S_0 = s] * sigma^2(x)
inline double mc_asymptotic_variance(const AnalysisReport& report, StateId s) {
  detail::check_state(report, s);
  const auto row = report.occupancy.row(s.index());
  double acc = 0.0;
  for (std::size_t x = 0; x < row.size(); ++x) acc += row[x] * report.one_step_var[x];
  return acc / report.visit_prob[s.index()];
}

// lim n * MSE of the TD estimate of J(pi):
//   sum_x eta_pi(x)^2 * sigma^2(x) / E[N(x)]
inline double td_asymptotic_variance(const AnalysisReport& report, const Weighting& pi) {
  const auto eta = weighted_occupancy(report, pi);
  double acc = 0.0;
  for (std::size_t x = 0; x < eta.size(); ++x) {
    if (eta[x] == 0.0) continue;
    acc += eta[x] * eta[x] * report.one_step_var[x] / report.occupancy_from_d[x];
  }
  return acc;
}

inline double td_asymptotic_variance(const AnalysisReport& report, StateId s) {
  return td_asymptotic_variance(report, Weighting::point(s));
}

struct PoolingCoefficient {
  double value = 1.0;
  std::vector<double> pairwise;  // C(s, x) for every state x
  std::vector<double> weights;   // mu_s(x), sums to 1 unless degenerate
  bool degenerate = false;       // every mu_s weight was zero; value set to 1
};

// Inverse trajectory pooling coefficient C(s) = E_{x ~ mu_s}[C(s, x)] with
//   C(s, x) = E[N(s -> x)] / E[N(x)],  E[N(s -> x)] = E[N(x) | S_0 = s] P(s in tau)
//   mu_s(x) proportional to E[N(x) | S_0 = s] * sigma^2(x).
inline PoolingCoefficient pooling_coefficient(const AnalysisReport& report, StateId s) {
  detail::check_state(report, s);
  const std::size_t n = report.size();
  const auto row = report.occupancy.row(s.index());
  const double p_s = report.visit_prob[s.index()];

  PoolingCoefficient out;
  out.pairwise.assign(n, 0.0);
  out.weights.assign(n, 0.0);
  double norm = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    const double visits = report.occupancy_from_d[x];
    out.pairwise[x] = visits > 0.0 ? row[x] * p_s / visits : 0.0;
    out.weights[x] = row[x] * report.one_step_var[x];
    norm += out.weights[x];
  }
  if (!(norm > 0.0)) {
    out.degenerate = true;
    out.value = 1.0;
    return out;
  }
  double c = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    out.weights[x] /= norm;
    c += out.weights[x] * out.pairwise[x];
  }
  out.value = c;
  return out;
}

struct VarianceRatio {
  double value = 0.0;
  bool degenerate = false;  // MC variance is zero; value is meaningless
};

// TD / MC asymptotic variance at s.
inline VarianceRatio td_mc_ratio(const AnalysisReport& report, StateId s) {
  const double mc = mc_asymptotic_variance(report, s);
  const double td = td_asymptotic_variance(report, s);
  if (!(mc > 0.0)) return {1.0, true};
  return {td / mc, false};
}

namespace detail {

// P(first hit a strictly before first hit b) and the symmetric probability,
// for a trajectory started from the initial distribution.
inline std::pair<double, double> first_hit_order(const MrpSpec& spec, StateId a, StateId b) {
  const std::size_t n = spec.size();
  std::vector<std::size_t> local(n, static_cast<std::size_t>(-1));
  std::vector<std::size_t> states;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == a.index() || i == b.index()) continue;
    local[i] = states.size();
    states.push_back(i);
  }
  const std::size_t m = states.size();
  std::vector<double> to_a(m, 0.0);
  std::vector<double> to_b(m, 0.0);
  std::vector<double> h_a(m, 0.0);
  std::vector<double> h_b(m, 0.0);
  if (m > 0) {
    Matrix sys = Matrix::identity(m);
    for (std::size_t k = 0; k < m; ++k) {
      for (const Edge& e : spec.edges(StateId(states[k]))) {
        if (e.to.is_terminal()) continue;
        if (e.to == a) {
          to_a[k] += e.p;
        } else if (e.to == b) {
          to_b[k] += e.p;
        } else {
          sys(k, local[e.to.index()]) -= e.p;
        }
      }
    }
    const LuDecomposition lu(std::move(sys));
    h_a = lu.solve(to_a);
    h_b = lu.solve(to_b);
  }
  double pa = 0.0;
  double pb = 0.0;
  for (const InitialMass& im : spec.initial()) {
    if (im.state == a) {
      pa += im.p;
    } else if (im.state == b) {
      pb += im.p;
    } else {
      pa += im.p * h_a[local[im.state.index()]];
      pb += im.p * h_b[local[im.state.index()]];
    }
  }
  return {pa, pb};
}

}  // namespace detail

// lim n * MSE of the MC advantage estimate V_MC(s) - V_MC(s'). The two
// estimates share trajectories that visit both states; their covariance is
//   (1 / (p_s p_s')) * [P(s first, then s') W(s') + P(s' first, then s) W(s)]
// with W(x) = sum_y E[N(y) | S_0 = x] sigma^2(y). It vanishes for disjoint pairs.
inline double mc_advantage_variance(const AnalysisReport& report, StateId s, StateId s_prime) {
  detail::check_state(report, s);
  detail::check_state(report, s_prime);
  if (s == s_prime) return 0.0;
  const double var_s = mc_asymptotic_variance(report, s);
  const double var_sp = mc_asymptotic_variance(report, s_prime);
  if (check_disjoint(*report.spec, s, s_prime)) return var_s + var_sp;

  const double p_s = report.visit_prob[s.index()];
  const double p_sp = report.visit_prob[s_prime.index()];
  const auto [s_first, sp_first] = detail::first_hit_order(*report.spec, s, s_prime);
  const double reach_sp_from_s =
      report.occupancy(s.index(), s_prime.index()) / report.occupancy(s_prime.index(), s_prime.index());
  const double reach_s_from_sp =
      report.occupancy(s_prime.index(), s.index()) / report.occupancy(s.index(), s.index());
  // W(x) = p_x * mc_asymptotic_variance(x).
  const double w_s = var_s * p_s;
  const double w_sp = var_sp * p_sp;
  const double cross = s_first * reach_sp_from_s * w_sp + sp_first * reach_s_from_sp * w_s;
  return var_s + var_sp - 2.0 * cross / (p_s * p_sp);
}

inline double td_advantage_variance(const AnalysisReport& report, StateId s, StateId s_prime) {
  return td_asymptotic_variance(report, Weighting::advantage(s, s_prime));
}

// sigma^2_min * (E[T | s] / P(s in tau) + E[T | s'] / P(s' in tau)); requires
// that no trajectory can visit both states.
inline double mc_advantage_lower_bound(const AnalysisReport& report, StateId s, StateId s_prime) {
  detail::check_state(report, s);
  detail::check_state(report, s_prime);
  if (!check_disjoint(*report.spec, s, s_prime)) {
    throw PreconditionError("MC advantage lower bound requires that no trajectory visits both '" +
                            report.spec->name(s) + "' and '" + report.spec->name(s_prime) + "'");
  }
  return report.sigma2_min *
         (report.expected_horizon[s.index()] / report.visit_prob[s.index()] +
          report.expected_horizon[s_prime.index()] / report.visit_prob[s_prime.index()]);
}

// 2 * sigma^2_max / min(P(s in tau), P(s' in tau)) * H, where H is the
// crossing time of the pair or any upper bound on it.
inline double td_advantage_upper_bound(const AnalysisReport& report, StateId s, StateId s_prime,
                                       double crossing_time) {
  detail::check_state(report, s);
  detail::check_state(report, s_prime);
  if (!(crossing_time >= 0.0)) throw PreconditionError("crossing time must be non-negative");
  const double p_min = std::min(report.visit_prob[s.index()], report.visit_prob[s_prime.index()]);
  return 2.0 * report.sigma2_max / p_min * crossing_time;
}

// sum_x |E[N(x) | S_0 = s] - E[N(x) | S_0 = s']|
inline double occupancy_l1_distance(const AnalysisReport& report, StateId s, StateId s_prime) {
  detail::check_state(report, s);
  detail::check_state(report, s_prime);
  const auto a = report.occupancy.row(s.index());
  const auto b = report.occupancy.row(s_prime.index());
  double acc = 0.0;
  for (std::size_t x = 0; x < a.size(); ++x) acc += std::abs(a[x] - b[x]);
  return acc;
}

}  // namespace mrplab
