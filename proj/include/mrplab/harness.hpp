#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mrplab/analysis.hpp"
#include "mrplab/errors.hpp"
#include "mrplab/estimators.hpp"
#include "mrplab/generators.hpp"
#include "mrplab/io.hpp"
#include "mrplab/mrp.hpp"
#include "mrplab/rng.hpp"
#include "mrplab/stats.hpp"

namespace mrplab {

enum class ExperimentKind { kHorizonSweep, kMeetingSweep, kSampleSweep, kRegret };

inline std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kHorizonSweep: return "horizon-sweep";
    case ExperimentKind::kMeetingSweep: return "meeting-sweep";
    case ExperimentKind::kSampleSweep: return "sample-sweep";
    case ExperimentKind::kRegret: return "regret";
  }
  return "horizon-sweep";
}

inline ExperimentKind parse_experiment_kind(std::string_view s) {
  if (s == "horizon-sweep") return ExperimentKind::kHorizonSweep;
  if (s == "meeting-sweep") return ExperimentKind::kMeetingSweep;
  if (s == "sample-sweep") return ExperimentKind::kSampleSweep;
  if (s == "regret") return ExperimentKind::kRegret;
  throw UsageError("unknown experiment kind '" + std::string(s) + "'");
}

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kHorizonSweep;
  // Layered family (horizon sweep, sample sweep, regret).
  std::size_t width = 5;
  std::vector<std::size_t> horizons;  // horizon sweep
  double back_prob = 0.0;
  // Meeting family; `horizon` is also the fixed T of the sample sweep and regret runs.
  std::size_t horizon = 20;
  std::vector<std::size_t> meeting_horizons;
  std::size_t branches = 2;
  RewardDist meeting_reward = RewardDist::gaussian(0.0, 1.0);
  // Sample sweep and regret.
  std::vector<std::size_t> sample_sizes;
  std::size_t n = 2000;
  std::size_t replications = 1000;
  std::uint64_t seed = 0;
  std::optional<std::string> target_s;
  std::optional<std::string> target_sp;
  std::string output;
  std::size_t threads = 0;  // 0: MRPLAB_THREADS, else hardware concurrency
};

// Redraws above this fraction of K flag the row.
inline constexpr double kRedrawFlagFraction = 0.05;
// Attempts per replication before giving up on drawing a usable dataset.
inline constexpr std::size_t kMaxRedrawsPerReplication = 1000;

inline void check_config(const ExperimentConfig& cfg) {
  if (cfg.replications < 2) throw UsageError("experiment: need at least 2 replications");
  if (cfg.n < 1) throw UsageError("experiment: need n >= 1");
  auto check_list = [](const std::vector<std::size_t>& xs, const char* what) {
    if (xs.empty()) throw UsageError(std::string("experiment: ") + what + " list is empty");
    if (!std::is_sorted(xs.begin(), xs.end())) {
      throw UsageError(std::string("experiment: ") + what + " list must be sorted");
    }
  };
  switch (cfg.kind) {
    case ExperimentKind::kHorizonSweep: check_list(cfg.horizons, "horizon"); break;
    case ExperimentKind::kMeetingSweep:
      check_list(cfg.meeting_horizons, "meeting-horizon");
      if (cfg.meeting_horizons.front() < 2 || cfg.meeting_horizons.back() > cfg.horizon) {
        throw UsageError("experiment: meeting horizons must lie in [2, horizon]");
      }
      break;
    case ExperimentKind::kSampleSweep:
    case ExperimentKind::kRegret:
      check_list(cfg.sample_sizes, "sample-size");
      if (cfg.sample_sizes.front() < 1) throw UsageError("experiment: sample sizes must be >= 1");
      break;
  }
}

inline std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MRPLAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs task(i) for i in [0, count) on up to `threads` workers. The first
// exception stops the remaining work and is rethrown.
inline void parallel_for(std::size_t count, std::size_t threads,
                         const std::function<void(std::size_t)>& task) {
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      while (!failed.load()) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true);
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

// Estimation errors of one replication: estimate - truth.
struct ReplicationErrors {
  std::array<double, 3> td{};  // s, s', advantage
  std::array<double, 3> mc{};
  std::size_t redraws = 0;
};

struct TargetPair {
  StateId s;
  StateId sp;
};

// K replications of n trajectories each. Replication k, attempt a samples
// from derive_seed(seed, {1, sweep_index, k, a}); an attempt is redrawn when
// a target state is unvisited.
inline std::vector<ReplicationErrors> run_replications(const MrpSpec& spec, const AnalysisReport& exact,
                                                       TargetPair targets, std::size_t n,
                                                       std::size_t replications, std::uint64_t seed,
                                                       std::uint64_t sweep_index, std::size_t threads) {
  const double v_s = exact.values[targets.s.index()];
  const double v_sp = exact.values[targets.sp.index()];
  std::vector<ReplicationErrors> out(replications);
  parallel_for(replications, threads, [&](std::size_t k) {
    ReplicationErrors& rec = out[k];
    for (std::size_t attempt = 0;; ++attempt) {
      if (attempt == kMaxRedrawsPerReplication) {
        throw NumericalError("replication " + std::to_string(k) + ": target states unvisited after " +
                             std::to_string(attempt) + " draws");
      }
      const Dataset data = sample_dataset(spec, n, derive_seed(seed, {1, sweep_index, k, attempt}));
      const TabularEstimate mc = mc_estimate(data, spec);
      if (!mc.defined(targets.s) || !mc.defined(targets.sp)) {
        ++rec.redraws;
        continue;
      }
      const TabularEstimate td = td_estimate(data, spec);
      const auto errors = [&](const TabularEstimate& e) {
        const double a = e.value(targets.s);
        const double b = e.value(targets.sp);
        return std::array<double, 3>{a - v_s, b - v_sp, (a - b) - (v_s - v_sp)};
      };
      rec.td = errors(td);
      rec.mc = errors(mc);
      return;
    }
  });
  return out;
}

inline std::vector<double> column(const std::vector<ReplicationErrors>& recs, Method m, std::size_t q) {
  std::vector<double> out(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) out[i] = m == Method::kTD ? recs[i].td[q] : recs[i].mc[q];
  return out;
}

inline std::size_t total_redraws(const std::vector<ReplicationErrors>& recs) {
  std::size_t r = 0;
  for (const auto& x : recs) r += x.redraws;
  return r;
}

// Exact asymptotic variances (lim n * MSE) for s, s' and the advantage.
struct TheoreticalVariances {
  std::array<double, 3> td{};
  std::array<double, 3> mc{};
};

inline TheoreticalVariances theoretical_variances(const AnalysisReport& exact, TargetPair t) {
  TheoreticalVariances v;
  v.td = {td_asymptotic_variance(exact, t.s), td_asymptotic_variance(exact, t.sp),
          td_advantage_variance(exact, t.s, t.sp)};
  v.mc = {mc_asymptotic_variance(exact, t.s), mc_asymptotic_variance(exact, t.sp),
          mc_advantage_variance(exact, t.s, t.sp)};
  return v;
}

struct SweepRow {
  double sweep_var = 0.0;
  std::size_t n = 0;
  std::array<Interval, 3> td{};  // empirical MSE for s, s', advantage
  std::array<Interval, 3> mc{};
  std::array<double, 3> theo_td{};  // asymptotic variance / n
  std::array<double, 3> theo_mc{};
  std::size_t redraws = 0;
  bool flagged = false;
};

struct RatioRow {
  double sweep_var = 0.0;
  std::array<Interval, 3> ratio{};  // TD MSE / MC MSE for s, s', advantage
  std::array<double, 3> theo_ratio{};
  std::size_t redraws = 0;
  bool flagged = false;
  // Largest |TD - MC| over replications and both target values.
  double max_estimate_gap = 0.0;
};

struct RegretRow {
  double sweep_var = 0.0;
  double regret_td = 0.0;
  double regret_mc = 0.0;
  double approx_td = 0.0;
  double approx_mc = 0.0;
  std::uint64_t wrong_td = 0;
  std::uint64_t wrong_mc = 0;
  std::size_t replications = 0;
  std::size_t redraws = 0;
  bool flagged = false;
};

namespace detail {

inline TargetPair resolve_targets(const MrpSpec& spec, const ExperimentConfig& cfg,
                                  const char* default_s, const char* default_sp) {
  return {spec.id(cfg.target_s.value_or(default_s)), spec.id(cfg.target_sp.value_or(default_sp))};
}

inline std::uint64_t spec_seed(const ExperimentConfig& cfg) { return derive_seed(cfg.seed, {0}); }

inline SweepRow make_sweep_row(double sweep_var, std::size_t n, const std::vector<ReplicationErrors>& recs,
                               const TheoreticalVariances& theory) {
  SweepRow row;
  row.sweep_var = sweep_var;
  row.n = n;
  for (std::size_t q = 0; q < 3; ++q) {
    row.td[q] = mse_with_ci(column(recs, Method::kTD, q));
    row.mc[q] = mse_with_ci(column(recs, Method::kMC, q));
    row.theo_td[q] = theory.td[q] / static_cast<double>(n);
    row.theo_mc[q] = theory.mc[q] / static_cast<double>(n);
  }
  row.redraws = total_redraws(recs);
  row.flagged = static_cast<double>(row.redraws) >= kRedrawFlagFraction * static_cast<double>(recs.size());
  return row;
}

}  // namespace detail

// MSE of both estimators on layered instances of increasing horizon. All
// horizons use the same instance seed, so shorter instances are prefixes of
// longer ones.
inline std::vector<SweepRow> run_horizon_sweep(const ExperimentConfig& cfg) {
  check_config(cfg);
  const std::size_t threads = resolve_threads(cfg.threads);
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < cfg.horizons.size(); ++i) {
    const std::size_t horizon = cfg.horizons[i];
    const MrpSpec spec = gen_layered(cfg.width, horizon, cfg.back_prob, detail::spec_seed(cfg));
    const AnalysisReport exact = analyze(spec);
    const TargetPair t = detail::resolve_targets(spec, cfg, "s1_1", "s1_2");
    const auto recs = run_replications(spec, exact, t, cfg.n, cfg.replications, cfg.seed, i, threads);
    rows.push_back(detail::make_sweep_row(static_cast<double>(horizon), cfg.n, recs,
                                          theoretical_variances(exact, t)));
  }
  return rows;
}

// TD / MC MSE ratios on the meeting-horizon family as H varies at fixed T.
inline std::vector<RatioRow> run_meeting_sweep(const ExperimentConfig& cfg) {
  check_config(cfg);
  const std::size_t threads = resolve_threads(cfg.threads);
  std::vector<RatioRow> rows;
  for (std::size_t i = 0; i < cfg.meeting_horizons.size(); ++i) {
    const std::size_t h = cfg.meeting_horizons[i];
    const MrpSpec spec = gen_meeting(cfg.branches, h, cfg.horizon, cfg.meeting_reward);
    const AnalysisReport exact = analyze(spec);
    const TargetPair t = detail::resolve_targets(spec, cfg, "h1", "h2");

    std::vector<double> gaps(cfg.replications, 0.0);
    const double v_s = exact.values[t.s.index()];
    const double v_sp = exact.values[t.sp.index()];
    const auto recs = run_replications(spec, exact, t, cfg.n, cfg.replications, cfg.seed, i, threads);
    for (std::size_t k = 0; k < recs.size(); ++k) {
      // Errors share the same truth, so their difference is the estimate gap.
      gaps[k] = std::max(std::abs((recs[k].td[0] + v_s) - (recs[k].mc[0] + v_s)),
                         std::abs((recs[k].td[1] + v_sp) - (recs[k].mc[1] + v_sp)));
    }

    RatioRow row;
    row.sweep_var = static_cast<double>(h);
    for (std::size_t q = 0; q < 3; ++q) {
      row.ratio[q] = ratio_with_ci(column(recs, Method::kTD, q), column(recs, Method::kMC, q));
    }
    const auto theory = theoretical_variances(exact, t);
    row.theo_ratio = {pooling_coefficient(exact, t.s).value, pooling_coefficient(exact, t.sp).value,
                      theory.mc[2] > 0.0 ? theory.td[2] / theory.mc[2] : 1.0};
    row.redraws = total_redraws(recs);
    row.flagged =
        static_cast<double>(row.redraws) >= kRedrawFlagFraction * static_cast<double>(recs.size());
    row.max_estimate_gap = *std::max_element(gaps.begin(), gaps.end());
    rows.push_back(row);
  }
  return rows;
}

// MSE against the number of trajectories on one fixed layered instance.
inline std::vector<SweepRow> run_sample_sweep(const ExperimentConfig& cfg) {
  check_config(cfg);
  const std::size_t threads = resolve_threads(cfg.threads);
  const MrpSpec spec = gen_layered(cfg.width, cfg.horizon, cfg.back_prob, detail::spec_seed(cfg));
  const AnalysisReport exact = analyze(spec);
  const TargetPair t = detail::resolve_targets(spec, cfg, "s1_1", "s1_2");
  const auto theory = theoretical_variances(exact, t);
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < cfg.sample_sizes.size(); ++i) {
    const std::size_t n = cfg.sample_sizes[i];
    const auto recs = run_replications(spec, exact, t, n, cfg.replications, cfg.seed, i, threads);
    rows.push_back(detail::make_sweep_row(static_cast<double>(n), n, recs, theory));
  }
  return rows;
}

// How often each estimator ranks the pair wrongly, against the normal
// approximation Phi(-|A| sqrt(n) / sigma) from the exact advantage variances.
// Targets are ordered so that V(s') > V(s).
inline std::vector<RegretRow> run_regret(const ExperimentConfig& cfg) {
  check_config(cfg);
  const std::size_t threads = resolve_threads(cfg.threads);
  const MrpSpec spec = gen_layered(cfg.width, cfg.horizon, cfg.back_prob, detail::spec_seed(cfg));
  const AnalysisReport exact = analyze(spec);
  TargetPair t = detail::resolve_targets(spec, cfg, "s1_1", "s1_2");
  const double gap = exact.values[t.sp.index()] - exact.values[t.s.index()];
  if (std::abs(gap) < 1e-12) throw DegenerateAdvantageError("regret: the two targets have equal value");
  if (gap < 0.0) std::swap(t.s, t.sp);
  const double a = std::abs(gap);
  const double sigma_td = std::sqrt(td_advantage_variance(exact, t.s, t.sp));
  const double sigma_mc = std::sqrt(mc_advantage_variance(exact, t.s, t.sp));

  std::vector<RegretRow> rows;
  for (std::size_t i = 0; i < cfg.sample_sizes.size(); ++i) {
    const std::size_t n = cfg.sample_sizes[i];
    const auto recs = run_replications(spec, exact, t, n, cfg.replications, cfg.seed, i, threads);
    RegretRow row;
    row.sweep_var = static_cast<double>(n);
    row.replications = recs.size();
    // Estimated advantage V(s) - V(s') is -a + error; a wrong ranking is > 0.
    for (const auto& r : recs) {
      if (-a + r.td[2] > 0.0) ++row.wrong_td;
      if (-a + r.mc[2] > 0.0) ++row.wrong_mc;
    }
    const double k = static_cast<double>(recs.size());
    row.regret_td = static_cast<double>(row.wrong_td) / k;
    row.regret_mc = static_cast<double>(row.wrong_mc) / k;
    const double root_n = std::sqrt(static_cast<double>(n));
    row.approx_td = normal_cdf(-a * root_n / sigma_td);
    row.approx_mc = normal_cdf(-a * root_n / sigma_mc);
    row.redraws = total_redraws(recs);
    row.flagged = static_cast<double>(row.redraws) >= kRedrawFlagFraction * k;
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CSV output

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "sweep_var";
  for (const char* m : {"td", "mc"}) {
    for (const char* q : {"s", "sp", "adv"}) {
      const std::string base = std::string("mse_") + m + "_" + q;
      out += "," + base + "," + base + "_lo," + base + "_hi";
    }
  }
  for (const char* m : {"td", "mc"}) {
    for (const char* q : {"s", "sp", "adv"}) out += std::string(",theo_") + m + "_" + q;
  }
  out += ",redraws\n";
  for (const SweepRow& r : rows) {
    out += format_double(r.sweep_var);
    for (const auto* side : {&r.td, &r.mc}) {
      for (const Interval& iv : *side) {
        out += "," + format_double(iv.estimate) + "," + format_double(iv.lo) + "," + format_double(iv.hi);
      }
    }
    for (const auto* side : {&r.theo_td, &r.theo_mc}) {
      for (double v : *side) out += "," + format_double(v);
    }
    out += "," + std::to_string(r.redraws) + "\n";
  }
  return out;
}

inline std::string ratio_csv(const std::vector<RatioRow>& rows) {
  std::string out = "sweep_var";
  for (const char* q : {"s", "sp", "adv"}) {
    const std::string base = std::string("ratio_") + q;
    out += "," + base + "," + base + "_lo," + base + "_hi";
  }
  for (const char* q : {"s", "sp", "adv"}) out += std::string(",theo_ratio_") + q;
  out += ",redraws\n";
  for (const RatioRow& r : rows) {
    out += format_double(r.sweep_var);
    for (const Interval& iv : r.ratio) {
      out += "," + format_double(iv.estimate) + "," + format_double(iv.lo) + "," + format_double(iv.hi);
    }
    for (double v : r.theo_ratio) out += "," + format_double(v);
    out += "," + std::to_string(r.redraws) + "\n";
  }
  return out;
}

inline std::string regret_csv(const std::vector<RegretRow>& rows) {
  std::string out = "sweep_var,regret_td,regret_mc,approx_td,approx_mc,redraws\n";
  for (const RegretRow& r : rows) {
    out += format_double(r.sweep_var) + "," + format_double(r.regret_td) + "," +
           format_double(r.regret_mc) + "," + format_double(r.approx_td) + "," +
           format_double(r.approx_mc) + "," + std::to_string(r.redraws) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config <-> JSON

inline nlohmann::json reward_to_json(const RewardDist& r) {
  nlohmann::json j{{"kind", std::string(to_string(r.kind()))}, {"mean", r.mean()}};
  if (r.kind() == RewardDist::Kind::kUniform) j["halfwidth"] = r.spread();
  if (r.kind() == RewardDist::Kind::kGaussian) j["sd"] = r.spread();
  return j;
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(cfg.kind));
  j["width"] = cfg.width;
  j["horizons"] = cfg.horizons;
  j["back_prob"] = cfg.back_prob;
  j["horizon"] = cfg.horizon;
  j["meeting_horizons"] = cfg.meeting_horizons;
  j["branches"] = cfg.branches;
  j["meeting_reward"] = reward_to_json(cfg.meeting_reward);
  j["sample_sizes"] = cfg.sample_sizes;
  j["n"] = cfg.n;
  j["replications"] = cfg.replications;
  j["seed"] = cfg.seed;
  j["target_s"] = cfg.target_s ? nlohmann::json(*cfg.target_s) : nlohmann::json(nullptr);
  j["target_sp"] = cfg.target_sp ? nlohmann::json(*cfg.target_sp) : nlohmann::json(nullptr);
  j["output"] = cfg.output;
  return j;
}

// Defaults that differ by experiment: the sample-size and regret runs use the
// cyclic W=5, T=120, p=0.1 instance, the meeting sweep the small n=200 setup.
inline void apply_kind_defaults(ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case ExperimentKind::kHorizonSweep: break;
    case ExperimentKind::kMeetingSweep:
      cfg.n = 200;
      cfg.branches = 5;
      break;
    case ExperimentKind::kSampleSweep:
    case ExperimentKind::kRegret:
      cfg.horizon = 120;
      cfg.back_prob = 0.1;
      break;
  }
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw UsageError("experiment config must be a JSON object");
  ExperimentConfig cfg;
  try {
    if (j.contains("kind")) cfg.kind = parse_experiment_kind(j.at("kind").get<std::string>());
    apply_kind_defaults(cfg);
    if (j.contains("width")) cfg.width = j.at("width").get<std::size_t>();
    if (j.contains("horizons")) cfg.horizons = j.at("horizons").get<std::vector<std::size_t>>();
    if (j.contains("back_prob")) cfg.back_prob = j.at("back_prob").get<double>();
    if (j.contains("horizon")) cfg.horizon = j.at("horizon").get<std::size_t>();
    if (j.contains("meeting_horizons")) {
      cfg.meeting_horizons = j.at("meeting_horizons").get<std::vector<std::size_t>>();
    }
    if (j.contains("branches")) cfg.branches = j.at("branches").get<std::size_t>();
    if (j.contains("meeting_reward")) {
      const auto& r = j.at("meeting_reward");
      const std::string kind = r.at("kind").get<std::string>();
      const double mean = r.value("mean", 0.0);
      if (kind == "constant") {
        cfg.meeting_reward = RewardDist::constant(mean);
      } else if (kind == "uniform") {
        cfg.meeting_reward = RewardDist::uniform(mean, r.at("halfwidth").get<double>());
      } else if (kind == "gaussian") {
        cfg.meeting_reward = RewardDist::gaussian(mean, r.at("sd").get<double>());
      } else {
        throw UsageError("unknown reward kind '" + kind + "'");
      }
    }
    if (j.contains("sample_sizes")) cfg.sample_sizes = j.at("sample_sizes").get<std::vector<std::size_t>>();
    if (j.contains("n")) cfg.n = j.at("n").get<std::size_t>();
    if (j.contains("replications")) cfg.replications = j.at("replications").get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("target_s") && !j.at("target_s").is_null()) cfg.target_s = j.at("target_s").get<std::string>();
    if (j.contains("target_sp") && !j.at("target_sp").is_null()) {
      cfg.target_sp = j.at("target_sp").get<std::string>();
    }
    if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("experiment config: ") + e.what());
  }
  return cfg;
}

struct ExperimentOutput {
  std::string csv;
  nlohmann::json metadata;
};

// Runs the configured experiment and renders its CSV table and sidecar metadata.
inline ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  std::vector<double> flagged;
  switch (cfg.kind) {
    case ExperimentKind::kHorizonSweep:
    case ExperimentKind::kSampleSweep: {
      const auto rows = cfg.kind == ExperimentKind::kHorizonSweep ? run_horizon_sweep(cfg)
                                                                    : run_sample_sweep(cfg);
      out.csv = sweep_csv(rows);
      for (const auto& r : rows) {
        if (r.flagged) flagged.push_back(r.sweep_var);
      }
      break;
    }
    case ExperimentKind::kMeetingSweep: {
      const auto rows = run_meeting_sweep(cfg);
      out.csv = ratio_csv(rows);
      for (const auto& r : rows) {
        if (r.flagged) flagged.push_back(r.sweep_var);
      }
      break;
    }
    case ExperimentKind::kRegret: {
      const auto rows = run_regret(cfg);
      out.csv = regret_csv(rows);
      for (const auto& r : rows) {
        if (r.flagged) flagged.push_back(r.sweep_var);
      }
      break;
    }
  }
  out.metadata["config"] = config_to_json(cfg);
  out.metadata["interval"] =
      "normal interval on squared errors: mean +- 1.959964 * sd / sqrt(K); ratios use the delta method";
  out.metadata["redraw_policy"] =
      "a replication whose dataset leaves a target state unvisited is redrawn from a fresh derived seed";
  out.metadata["flagged_rows"] = flagged;
  return out;
}

}  // namespace mrplab
