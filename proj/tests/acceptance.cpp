// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Seeds are fixed constants; nothing here is tuned to the outcome.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "mrplab/analysis.hpp"
#include "mrplab/coupling.hpp"
#include "mrplab/generators.hpp"
#include "mrplab/harness.hpp"
#include "mrplab/reachability.hpp"
#include "oracles.hpp"

using namespace mrplab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const RewardDist kUnitNoise = RewardDist::gaussian(0.0, 1.0);

// ---------------------------------------------------------------------------

Outcome ratio_identity() {
  Outcome o;
  double worst = 0.0;
  std::size_t states = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const std::size_t width = 1 + i % 5;
    const std::size_t horizon = 2 + (i * 7) % 9;
    const double p = i % 2 == 0 ? 0.0 : 0.1;
    const MrpSpec spec = gen_layered(width, horizon, p, 900 + i);
    const auto report = analyze(spec);
    const auto ref = oracle::dense_moments(spec);
    for (std::size_t s = 0; s < spec.size(); ++s) {
      const auto r = td_mc_ratio(report, StateId(s));
      const double c = oracle::pooling_coefficient(ref, s);
      worst = std::max(worst, std::abs(r.value - c));
      ++states;
    }
  }
  o.pass = worst < 1e-10;
  o.detail = fmt("%zu states, max |ratio - C| = %.3g", states, worst);
  return o;
}

Outcome clt_agreement() {
  const MrpSpec spec = gen_layered(5, 20, 0.0, 1);
  const auto report = analyze(spec);
  const TargetPair t{spec.id("s1_1"), spec.id("s1_2")};
  const std::size_t n = 2000;
  const std::size_t k = 2000;
  const auto recs = run_replications(spec, report, t, n, k, 2, 0, resolve_threads(0));
  const auto theory = theoretical_variances(report, t);
  Outcome o;
  const char* names[] = {"s", "s'", "adv"};
  for (Method m : {Method::kTD, Method::kMC}) {
    for (std::size_t q = 0; q < 3; ++q) {
      const auto iv = mse_with_ci(column(recs, m, q));
      const double nd = static_cast<double>(n);
      const double theo = m == Method::kTD ? theory.td[q] : theory.mc[q];
      const double z = (nd * iv.estimate - theo) / (nd * iv.standard_error);
      if (std::abs(z) > 3.0) o.pass = false;
      o.detail += fmt("%s/%s n*MSE=%.4g exact=%.4g z=%+.2f; ", m == Method::kTD ? "td" : "mc", names[q],
                      nd * iv.estimate, theo, z);
    }
  }
  o.detail += fmt("redraws=%zu", total_redraws(recs));
  return o;
}

Outcome meeting_endpoints() {
  Outcome o;
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kMeetingSweep;
  cfg.horizon = 20;
  cfg.branches = 5;
  cfg.meeting_horizons = {2, 20};
  cfg.n = 200;
  cfg.replications = 500;
  cfg.seed = 3;
  const auto rows = run_meeting_sweep(cfg);
  const RatioRow& full = rows[1];
  bool ones = full.max_estimate_gap <= 1e-12;
  for (std::size_t q = 0; q < 3; ++q) {
    ones = ones && std::abs(full.ratio[q].estimate - 1.0) <= 1e-10 && std::abs(full.theo_ratio[q] - 1.0) <= 1e-12;
  }
  o.detail += fmt("H=T: max |TD-MC| = %.3g, ratios %.12g %.12g %.12g; ", full.max_estimate_gap,
                  full.ratio[0].estimate, full.ratio[1].estimate, full.ratio[2].estimate);

  const MrpSpec spec = gen_meeting(5, 2, 20, kUnitNoise);
  const auto report = analyze(spec);
  const auto ref = oracle::moments(spec);
  double worst = 0.0;
  for (std::size_t b = 1; b <= 5; ++b) {
    const StateId h = spec.id("h" + std::to_string(b));
    worst = std::max(worst, std::abs(td_mc_ratio(report, h).value - oracle::pooling_coefficient(ref, h.index())));
  }
  const double adv = td_advantage_variance(report, spec.id("h1"), spec.id("h2")) /
                     mc_advantage_variance(report, spec.id("h1"), spec.id("h2"));
  o.detail += fmt("H=2: max |ratio - C(head)| = %.3g, advantage ratio = %.6g", worst, adv);
  o.pass = ones && worst < 1e-10 && adv <= 0.1;
  return o;
}

MrpSpec two_heads_into_chain(std::size_t m) {
  std::vector<std::string> names{"a", "b"};
  for (std::size_t i = 2; i <= m; ++i) names.push_back("s" + std::to_string(i));
  std::vector<std::vector<Edge>> tr(names.size());
  tr[0] = {{StateId(2), 1.0, RewardDist::constant(0.0)}};
  tr[1] = {{StateId(3), 1.0, RewardDist::constant(0.0)}};
  for (std::size_t i = 2; i <= m; ++i) tr[i] = {{i == m ? StateId::terminal() : StateId(i + 1), 1.0, kUnitNoise}};
  return MrpSpec(names, tr, {{StateId(0), 0.5}, {StateId(1), 0.5}});
}

Outcome crossing_exact() {
  Outcome o;
  bool chain_ok = true;
  for (std::size_t m = 3; m <= 10; ++m) {
    chain_ok = chain_ok && crossing_time_exact(two_heads_into_chain(m), StateId(0), StateId(1)).value == 2.0;
  }
  std::size_t specs = 0;
  std::size_t pairs = 0;
  std::size_t mismatches = 0;
  for (std::uint64_t seed = 0; specs < 20; ++seed) {
    const MrpSpec spec = oracle::random_acyclic(5, 4000 + seed, 4, 2);
    std::vector<std::vector<TrajectoryAtom>> atoms;
    bool small = true;
    for (std::size_t s = 0; s < spec.size() && small; ++s) {
      atoms.push_back(enumerate_trajectories(spec, StateId(s)));
      small = atoms.back().size() <= 6;
    }
    if (!small) continue;
    ++specs;
    for (std::size_t s = 0; s < spec.size(); ++s) {
      for (std::size_t sp = 0; sp < spec.size(); ++sp) {
        if (s == sp) continue;
        const auto& a = atoms[s];
        const auto& b = atoms[sp];
        int scale = 1;
        auto integral = [&](const std::vector<TrajectoryAtom>& xs) {
          for (const auto& x : xs)
            if (x.prob * scale != std::floor(x.prob * scale)) return false;
          return true;
        };
        while (!(integral(a) && integral(b))) scale *= 2;
        std::vector<int> su, de;
        for (const auto& x : a) su.push_back(static_cast<int>(std::lround(x.prob * scale)));
        for (const auto& y : b) de.push_back(static_cast<int>(std::lround(y.prob * scale)));
        std::vector<std::vector<std::int64_t>> cost(a.size(), std::vector<std::int64_t>(b.size()));
        for (std::size_t i = 0; i < a.size(); ++i)
          for (std::size_t j = 0; j < b.size(); ++j) cost[i][j] = static_cast<std::int64_t>(crossing_cost(a[i].path, b[j].path));
        const double brute = static_cast<double>(oracle::min_cost_integer_flow(su, de, cost)) / scale;
        if (crossing_time_exact(spec, StateId(s), StateId(sp)).value != brute) ++mismatches;
        ++pairs;
      }
    }
  }
  o.pass = chain_ok && mismatches == 0;
  o.detail = fmt("shared chain m=3..10: %s; %zu specs, %zu pairs, %zu mismatches vs flow enumeration",
                 chain_ok ? "H=2" : "WRONG", specs, pairs, mismatches);
  return o;
}

Outcome crossing_bounds() {
  Outcome o;
  std::size_t pairs = 0;
  std::size_t bound_fail = 0;
  std::size_t occupancy_fail = 0;
  double worst_excess = 0.0;
  double tightest = 0.0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const MrpSpec spec = oracle::random_acyclic(6, 5000 + i);
    const auto report = analyze(spec);
    for (std::size_t s = 0; s < spec.size(); ++s) {
      for (std::size_t sp = 0; sp < spec.size(); ++sp) {
        if (s == sp) continue;
        const double h = crossing_time_exact(spec, StateId(s), StateId(sp)).value;
        const double td = td_advantage_variance(report, StateId(s), StateId(sp));
        const double bound = td_advantage_upper_bound(report, StateId(s), StateId(sp), h);
        if (td > bound * (1 + 1e-12)) ++bound_fail;
        if (bound > 0) tightest = std::max(tightest, td / bound);
        const double l1 = occupancy_l1_distance(report, StateId(s), StateId(sp));
        if (l1 > 2.0 * h * (1 + 1e-12)) {
          ++occupancy_fail;
          worst_excess = std::max(worst_excess, l1 - 2.0 * h);
        }
        ++pairs;
      }
    }
  }
  o.pass = bound_fail == 0 && occupancy_fail == 0;
  o.detail = fmt("%zu ordered pairs: variance bound violated %zu (max td/bound %.3f); "
                 "occupancy L1 <= 2H violated %zu (max excess %.4g)",
                 pairs, bound_fail, tightest, occupancy_fail, worst_excess);
  return o;
}

// 50 instances with a pair of states that never share a trajectory.
struct DisjointInstance {
  MrpSpec spec;
  StateId s;
  StateId sp;
};

std::vector<DisjointInstance> disjoint_instances() {
  std::vector<DisjointInstance> out;
  for (std::uint64_t i = 0; out.size() < 50; ++i) {
    if (i % 2 == 0) {
      const std::size_t width = 2 + i % 4;
      MrpSpec spec = gen_layered(width, 3 + i % 8, 0.0, 6000 + i);
      out.push_back({spec, StateId(0), StateId(1 + i % (width - 1))});
      continue;
    }
    MrpSpec spec = oracle::random_acyclic(7, 6000 + i);
    for (std::size_t s = 0; s < spec.size(); ++s) {
      for (std::size_t sp = s + 1; sp < spec.size(); ++sp) {
        if (check_disjoint(spec, StateId(s), StateId(sp))) {
          out.push_back({spec, StateId(s), StateId(sp)});
          s = sp = spec.size();
        }
      }
    }
  }
  return out;
}

Outcome mc_lower_bound(const std::vector<DisjointInstance>& inst) {
  Outcome o;
  double worst_eq = 0.0;
  std::size_t cases = 0;
  for (std::size_t h = 2; h <= 12; h += 2) {
    for (std::size_t k : {2u, 3u, 5u}) {
      const MrpSpec spec = gen_meeting(k, h, 12, kUnitNoise);
      const auto report = analyze(spec);
      for (std::size_t b = 2; b <= k; ++b) {
        const StateId s = spec.id("h1");
        const StateId sp = spec.id("h" + std::to_string(b));
        const double mc = mc_advantage_variance(report, s, sp);
        const double lb = mc_advantage_lower_bound(report, s, sp);
        worst_eq = std::max(worst_eq, std::abs(mc - lb) / std::max(1.0, lb));
        ++cases;
      }
    }
  }
  std::size_t violations = 0;
  std::size_t nontrivial = 0;
  for (const auto& d : inst) {
    const auto report = analyze(d.spec);
    const double lb = mc_advantage_lower_bound(report, d.s, d.sp);
    if (mc_advantage_variance(report, d.s, d.sp) < lb * (1 - 1e-12)) ++violations;
    if (lb > 0) ++nontrivial;
  }
  o.pass = worst_eq <= 1e-10 && violations == 0;
  o.detail = fmt("meeting family %zu pairs: max rel gap %.3g; %zu disjoint instances (%zu with positive bound): "
                 "%zu violations",
                 cases, worst_eq, inst.size(), nontrivial, violations);
  return o;
}

Outcome td_beats_mc(const std::vector<DisjointInstance>& inst) {
  Outcome o;
  std::size_t violations = 0;
  double best = 1.0;
  for (const auto& d : inst) {
    const auto report = analyze(d.spec);
    const double td = td_advantage_variance(report, d.s, d.sp);
    const double mc = mc_advantage_variance(report, d.s, d.sp);
    if (td > mc * (1 + 1e-12)) ++violations;
    if (mc > 0) best = std::min(best, td / mc);
  }
  o.pass = violations == 0;
  o.detail = fmt("%zu instances, %zu violations, smallest TD/MC %.4g", inst.size(), violations, best);
  return o;
}

Outcome horizon_truncation() {
  Outcome o;
  std::vector<double> td, mc;
  ExperimentConfig cfg;
  cfg.seed = 8;
  for (std::size_t horizon : {10u, 30u, 60u, 120u}) {
    const MrpSpec spec = gen_layered(5, horizon, 0.0, detail::spec_seed(cfg));
    const auto report = analyze(spec);
    const StateId s = spec.id("s1_1");
    const StateId sp = spec.id("s1_2");
    td.push_back(td_advantage_variance(report, s, sp));
    mc.push_back(mc_advantage_variance(report, s, sp));
    o.detail += fmt("T=%zu td=%.4g mc=%.4g; ", horizon, td.back(), mc.back());
  }
  const double mc_growth = mc.back() / mc.front();
  const double td_spread = *std::max_element(td.begin(), td.end()) / *std::min_element(td.begin(), td.end());
  o.pass = mc_growth >= 4.0 && td_spread < 2.0;
  o.detail += fmt("mc growth %.3gx, td spread %.3gx, mc/td at T=120 %.3g", mc_growth, td_spread,
                  mc.back() / td.back());
  return o;
}

Outcome regret_curves() {
  Outcome o;
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kRegret;
  cfg.width = 5;
  cfg.horizon = 30;
  cfg.back_prob = 0.1;
  cfg.sample_sizes = {100, 500, 2000};
  cfg.replications = 2000;
  cfg.seed = 9;
  const auto rows = run_regret(cfg);
  for (const auto& r : rows) {
    const auto in_td = binomial_acceptance_interval(r.replications, r.approx_td);
    const auto in_mc = binomial_acceptance_interval(r.replications, r.approx_mc);
    const bool ok_td = r.wrong_td >= in_td.lo && r.wrong_td <= in_td.hi;
    const bool ok_mc = r.wrong_mc >= in_mc.lo && r.wrong_mc <= in_mc.hi;
    o.pass = o.pass && ok_td && ok_mc;
    o.detail += fmt("n=%g td %llu in [%llu,%llu]%s mc %llu in [%llu,%llu]%s; ", r.sweep_var,
                    static_cast<unsigned long long>(r.wrong_td), static_cast<unsigned long long>(in_td.lo),
                    static_cast<unsigned long long>(in_td.hi), ok_td ? "" : " (out)",
                    static_cast<unsigned long long>(r.wrong_mc), static_cast<unsigned long long>(in_mc.lo),
                    static_cast<unsigned long long>(in_mc.hi), ok_mc ? "" : " (out)");
  }
  return o;
}

Outcome enumeration_oracle() {
  Outcome o;
  std::vector<MrpSpec> specs;
  for (std::uint64_t seed = 0; specs.size() < 40; ++seed) {
    MrpSpec m = oracle::random_acyclic(3 + seed % 6, 7000 + seed);
    std::size_t paths = 0;
    for (const auto& im : m.initial()) paths += oracle::count_paths(m, im.state.index());
    if (paths <= 200) specs.push_back(std::move(m));
  }
  specs.push_back(gen_layered(2, 5, 0.0, 70));
  specs.push_back(gen_layered(3, 4, 0.0, 71));
  specs.push_back(gen_meeting(3, 3, 7, RewardDist::uniform(0.2, 1.0)));
  specs.push_back(gen_checkout(std::vector<double>{0.4, 0.3, 0.2}, 0.5));
  double worst = 0.0;
  for (const auto& m : specs) {
    const auto report = analyze(m);
    const auto ref = oracle::moments(m);
    for (std::size_t s = 0; s < m.size(); ++s) {
      const auto gap = [&](double a, double b) { worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b))); };
      gap(report.values[s], ref.value[s]);
      gap(report.visit_prob[s], ref.visit_prob[s]);
      gap(mc_asymptotic_variance(report, StateId(s)) * report.visit_prob[s], ref.return_var[s]);
      for (std::size_t x = 0; x < m.size(); ++x) gap(report.occupancy(s, x), ref.occupancy[s][x]);
    }
  }
  o.pass = worst <= 1e-12;
  o.detail = fmt("%zu specs, max rel gap %.3g", specs.size(), worst);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  std::vector<DisjointInstance> disjoint;
  const std::vector<Criterion> criteria{
      {"ratio-identity", 10, ratio_identity},
      {"clt-agreement", 300, clt_agreement},
      {"meeting-endpoints", 60, meeting_endpoints},
      {"crossing-exact", 30, crossing_exact},
      {"crossing-bounds", 60, crossing_bounds},
      {"mc-lower-bound", 30,
       [&] {
         disjoint = disjoint_instances();
         return mc_lower_bound(disjoint);
       }},
      {"td-beats-mc", 10, [&] { return td_beats_mc(disjoint); }},
      {"horizon-truncation", 60, horizon_truncation},
      {"regret-curves", 600, regret_curves},
      {"enumeration-oracle", 30, enumeration_oracle},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > criteria[i].budget_s) {
      o.pass = false;
      o.detail += fmt(" [over time budget %.0f s]", criteria[i].budget_s);
    }
    if (!o.pass) ++failures;
    std::printf("%s %2zu %-20s %8.2fs  %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
