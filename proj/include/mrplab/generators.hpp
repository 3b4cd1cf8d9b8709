#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mrplab/errors.hpp"
#include "mrplab/mrp.hpp"
#include "mrplab/rng.hpp"

namespace mrplab {

// Forward transition weights are uniform on (kLayeredMinWeight, 1] before
// normalization, so every forward edge has strictly positive probability.
inline constexpr double kLayeredMinWeight = 0.05;
// Probability mass given to a backward edge; the forward row is scaled by 1 - this.
inline constexpr double kBackwardMass = 0.3;

inline std::string layered_state_name(std::size_t layer, std::size_t index) {
  return "s" + std::to_string(layer) + "_" + std::to_string(index);
}

// Layered process with `width` states in each of `horizon - 1` layers. Layer t
// moves to layer t+1 with random positive probabilities, the last layer moves
// to the terminal state. With probability `back_prob` a state also receives a
// single edge to a uniformly chosen state of an earlier or the same layer.
// Edge rewards are uniform with half-width 1 around a mean drawn on [-1, 1].
// Each layer draws from its own substream derive_seed(seed, {layer}), so two
// instances with the same seed share their leading layers across horizons.
inline MrpSpec gen_layered(std::size_t width, std::size_t horizon, double back_prob,
                           std::uint64_t seed) {
  if (width < 1) throw PreconditionError("layered: width must be >= 1");
  if (horizon < 2) throw PreconditionError("layered: horizon must be >= 2");
  if (!(back_prob >= 0.0 && back_prob < 1.0)) {
    throw PreconditionError("layered: back probability must lie in [0, 1)");
  }
  const std::size_t layers = horizon - 1;
  std::vector<std::string> names;
  names.reserve(width * layers);
  for (std::size_t t = 1; t <= layers; ++t) {
    for (std::size_t w = 1; w <= width; ++w) names.push_back(layered_state_name(t, w));
  }
  auto id_of = [width](std::size_t layer, std::size_t w0) {
    return StateId((layer - 1) * width + w0);
  };
  auto reward_mean = [](RandomStream& rng) { return -1.0 + 2.0 * uniform01(rng); };

  std::vector<std::vector<Edge>> transitions(names.size());
  for (std::size_t t = 1; t <= layers; ++t) {
    RandomStream rng(derive_seed(seed, {t}));
    for (std::size_t w = 0; w < width; ++w) {
      std::vector<Edge>& row = transitions[id_of(t, w).index()];
      if (t < layers) {
        std::vector<double> weights(width);
        double total = 0.0;
        for (double& x : weights) {
          x = kLayeredMinWeight + (1.0 - kLayeredMinWeight) * (1.0 - uniform01(rng));
          total += x;
        }
        for (std::size_t j = 0; j < width; ++j) {
          row.push_back({id_of(t + 1, j), weights[j] / total,
                         RewardDist::uniform(reward_mean(rng), 1.0)});
        }
      } else {
        row.push_back({StateId::terminal(), 1.0, RewardDist::uniform(reward_mean(rng), 1.0)});
      }
      const bool add_back = uniform01(rng) < back_prob;
      const auto target = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(width * t));
      const double back_mean = reward_mean(rng);
      if (add_back) {
        for (Edge& e : row) e.p *= 1.0 - kBackwardMass;
        row.push_back({StateId(std::min(target, width * t - 1)), kBackwardMass,
                       RewardDist::uniform(back_mean, 1.0)});
      }
    }
  }

  std::vector<InitialMass> initial;
  for (std::size_t w = 0; w < width; ++w) {
    initial.push_back({id_of(1, w), 1.0 / static_cast<double>(width)});
  }
  return MrpSpec(std::move(names), std::move(transitions), std::move(initial));
}

// Meeting-horizon process: `branches` disjoint deterministic chains of
// meeting_horizon - 1 states merge into one chain for steps meeting_horizon..horizon-1,
// then terminate. Heads are h1..hk, later branch states h{b}_{step}, the
// shared chain c{step}. Every edge carries `reward`.
inline MrpSpec gen_meeting(std::size_t branches, std::size_t meeting_horizon, std::size_t horizon,
                           const RewardDist& reward) {
  if (branches < 2) throw PreconditionError("meeting: need at least 2 branches");
  if (meeting_horizon < 2 || meeting_horizon > horizon) {
    throw PreconditionError("meeting: need 2 <= meeting horizon <= horizon");
  }
  std::vector<std::string> names;
  const std::size_t branch_len = meeting_horizon - 1;
  for (std::size_t b = 1; b <= branches; ++b) {
    names.push_back("h" + std::to_string(b));
    for (std::size_t step = 2; step <= branch_len; ++step) {
      names.push_back("h" + std::to_string(b) + "_" + std::to_string(step));
    }
  }
  const std::size_t shared_begin = names.size();
  for (std::size_t step = meeting_horizon; step <= horizon - 1; ++step) {
    names.push_back("c" + std::to_string(step));
  }
  const StateId merge =
      shared_begin < names.size() ? StateId(shared_begin) : StateId::terminal();

  std::vector<std::vector<Edge>> transitions(names.size());
  for (std::size_t b = 0; b < branches; ++b) {
    const std::size_t base = b * branch_len;
    for (std::size_t j = 0; j < branch_len; ++j) {
      const StateId next = j + 1 < branch_len ? StateId(base + j + 1) : merge;
      transitions[base + j].push_back({next, 1.0, reward});
    }
  }
  for (std::size_t i = shared_begin; i < names.size(); ++i) {
    const StateId next = i + 1 < names.size() ? StateId(i + 1) : StateId::terminal();
    transitions[i].push_back({next, 1.0, reward});
  }
  std::vector<InitialMass> initial;
  for (std::size_t b = 0; b < branches; ++b) {
    initial.push_back({StateId(b * branch_len), 1.0 / static_cast<double>(branches)});
  }
  return MrpSpec(std::move(names), std::move(transitions), std::move(initial));
}

// Checkout funnel: pages page1..pagek (uniform start) click through to
// `checkout` with their click probability, checkout converts to `sale` with
// sale_prob, and the transition into `sale` pays 1. Everything else pays 0.
inline MrpSpec gen_checkout(std::span<const double> click_probs, double sale_prob) {
  const std::size_t k = click_probs.size();
  if (k == 0) throw PreconditionError("checkout: need at least one page");
  bool any_click = false;
  for (double c : click_probs) {
    if (!(c >= 0.0 && c <= 1.0)) throw PreconditionError("checkout: click probability outside [0, 1]");
    any_click = any_click || c > 0.0;
  }
  if (!(sale_prob > 0.0 && sale_prob <= 1.0)) {
    throw PreconditionError("checkout: sale probability must lie in (0, 1]");
  }
  if (!any_click) throw PreconditionError("checkout: no page ever reaches the checkout");

  std::vector<std::string> names;
  for (std::size_t i = 1; i <= k; ++i) names.push_back("page" + std::to_string(i));
  names.push_back("checkout");
  names.push_back("sale");
  const StateId checkout(k);
  const StateId sale(k + 1);
  const auto zero = RewardDist::constant(0.0);

  std::vector<std::vector<Edge>> transitions(names.size());
  for (std::size_t i = 0; i < k; ++i) {
    if (click_probs[i] > 0.0) transitions[i].push_back({checkout, click_probs[i], zero});
    if (click_probs[i] < 1.0) transitions[i].push_back({StateId::terminal(), 1.0 - click_probs[i], zero});
  }
  transitions[k].push_back({sale, sale_prob, RewardDist::constant(1.0)});
  if (sale_prob < 1.0) transitions[k].push_back({StateId::terminal(), 1.0 - sale_prob, zero});
  transitions[k + 1].push_back({StateId::terminal(), 1.0, zero});

  std::vector<InitialMass> initial;
  for (std::size_t i = 0; i < k; ++i) initial.push_back({StateId(i), 1.0 / static_cast<double>(k)});
  return MrpSpec(std::move(names), std::move(transitions), std::move(initial));
}

}  // namespace mrplab
