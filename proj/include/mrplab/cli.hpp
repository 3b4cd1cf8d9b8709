#pragma once

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mrplab/analysis.hpp"
#include "mrplab/coupling.hpp"
#include "mrplab/errors.hpp"
#include "mrplab/estimators.hpp"
#include "mrplab/generators.hpp"
#include "mrplab/harness.hpp"
#include "mrplab/io.hpp"
#include "mrplab/mrp.hpp"
#include "mrplab/reachability.hpp"

namespace mrplab::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInvalidSpec = 2, kNumerical = 3 };

namespace detail {

// Writes to `path` atomically, or to `out` when no path was given.
inline void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text_file_atomic(path, text);
  }
}

inline RewardDist make_reward(const std::string& kind, double mean, double spread) {
  if (kind == "constant") return RewardDist::constant(mean);
  if (kind == "uniform") return RewardDist::uniform(mean, spread);
  if (kind == "gaussian") return RewardDist::gaussian(mean, spread);
  throw UsageError("unknown reward kind '" + kind + "'");
}

struct GenerateArgs {
  std::string family;
  std::size_t width = 5;
  std::size_t horizon = 20;
  double p_back = 0.0;
  std::uint64_t seed = 0;
  std::size_t branches = 5;
  std::size_t meeting_horizon = 2;
  std::string reward_kind = "gaussian";
  double reward_mean = 0.0;
  double reward_spread = 1.0;
  std::vector<double> click_probs;
  double sale_prob = 0.5;
  std::string output;
};

inline MrpSpec generate(const GenerateArgs& a) {
  if (a.family == "layered") return gen_layered(a.width, a.horizon, a.p_back, a.seed);
  if (a.family == "meeting") {
    return gen_meeting(a.branches, a.meeting_horizon, a.horizon,
                       make_reward(a.reward_kind, a.reward_mean, a.reward_spread));
  }
  if (a.family == "checkout") {
    if (a.click_probs.empty()) throw UsageError("checkout: --click-probs is required");
    return gen_checkout(a.click_probs, a.sale_prob);
  }
  throw UsageError("unknown family '" + a.family + "'");
}

struct AnalyzeArgs {
  std::string file;
  std::vector<std::string> states;
  std::vector<std::string> advantage;
  std::string format = "text";
  std::string output;
};

inline nlohmann::json state_json(const AnalysisReport& r, StateId s) {
  const auto c = pooling_coefficient(r, s);
  const auto i = s.index();
  return {{"state", r.spec->name(s)},
          {"value", r.values[i]},
          {"visit_probability", r.visit_prob[i]},
          {"expected_visits", r.occupancy_from_d[i]},
          {"expected_horizon", r.expected_horizon[i]},
          {"one_step_variance", r.one_step_var[i]},
          {"pooling_coefficient", c.value},
          {"pooling_degenerate", c.degenerate},
          {"mc_asymptotic_variance", mc_asymptotic_variance(r, s)},
          {"td_asymptotic_variance", td_asymptotic_variance(r, s)}};
}

inline constexpr const char* kStateColumns[] = {
    "value",           "visit_probability",   "expected_visits",        "expected_horizon",
    "one_step_variance", "pooling_coefficient", "mc_asymptotic_variance", "td_asymptotic_variance"};

inline std::string analyze_text(const AnalyzeArgs& a, const AnalysisReport& r) {
  std::vector<StateId> states;
  if (a.states.empty()) {
    for (std::size_t i = 0; i < r.size(); ++i) states.emplace_back(i);
  } else {
    for (const auto& name : a.states) states.push_back(r.id(name));
  }
  nlohmann::json adv;
  if (!a.advantage.empty()) {
    if (a.advantage.size() != 2) throw UsageError("--advantage takes exactly two state names");
    const StateId s = r.id(a.advantage[0]);
    const StateId sp = r.id(a.advantage[1]);
    adv = {{"s", a.advantage[0]},
           {"s_prime", a.advantage[1]},
           {"advantage", r.values[s.index()] - r.values[sp.index()]},
           {"disjoint", check_disjoint(*r.spec, s, sp)},
           {"mc_asymptotic_variance", mc_advantage_variance(r, s, sp)},
           {"td_asymptotic_variance", td_advantage_variance(r, s, sp)},
           {"occupancy_l1_distance", occupancy_l1_distance(r, s, sp)}};
  }

  if (a.format == "json") {
    nlohmann::json j;
    j["sigma2_min"] = r.sigma2_min;
    j["sigma2_max"] = r.sigma2_max;
    j["states"] = nlohmann::json::array();
    for (StateId s : states) j["states"].push_back(state_json(r, s));
    if (!adv.is_null()) j["advantage"] = adv;
    return j.dump(2) + "\n";
  }
  if (a.format == "csv") {
    std::string out = "state";
    for (const char* c : kStateColumns) out += std::string(",") + c;
    out += "\n";
    for (StateId s : states) {
      const auto j = state_json(r, s);
      out += j["state"].get<std::string>();
      for (const char* c : kStateColumns) out += "," + format_double(j[c].get<double>());
      out += "\n";
    }
    return out;
  }
  if (a.format != "text") throw UsageError("unknown format '" + a.format + "'");
  std::ostringstream os;
  os << "states " << r.size() << ", sigma2 in [" << format_double(r.sigma2_min) << ", "
     << format_double(r.sigma2_max) << "]\n";
  for (StateId s : states) {
    const auto j = state_json(r, s);
    os << "\n" << j["state"].get<std::string>() << "\n";
    for (const char* c : kStateColumns) {
      os << "  " << c << std::string(24 - std::string(c).size(), ' ') << format_double(j[c].get<double>())
         << "\n";
    }
  }
  if (!adv.is_null()) {
    os << "\nadvantage " << a.advantage[0] << " - " << a.advantage[1] << "\n";
    for (const char* c : {"advantage", "mc_asymptotic_variance", "td_asymptotic_variance",
                          "occupancy_l1_distance"}) {
      os << "  " << c << std::string(24 - std::string(c).size(), ' ') << format_double(adv[c].get<double>())
         << "\n";
    }
    os << "  disjoint" << std::string(16, ' ') << (adv["disjoint"].get<bool>() ? "yes" : "no") << "\n";
  }
  return os.str();
}

inline std::string estimate_csv(const MrpSpec& spec, const std::vector<TabularEstimate>& ests) {
  std::string out = "state,method,estimate,count\n";
  for (std::size_t i = 0; i < spec.size(); ++i) {
    for (const auto& e : ests) {
      out += spec.name(StateId(i)) + "," + std::string(to_string(e.method)) + ",";
      // Unvisited states have no estimate; the field stays empty.
      if (e.defined(StateId(i))) out += format_double(e.values[i]);
      out += "," + std::to_string(e.counts[i]) + "\n";
    }
  }
  return out;
}

}  // namespace detail

// Parses and runs one command line, returning the process exit code.
inline int dispatch(const std::vector<std::string>& args, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"Tabular MC and TD value estimation on terminating Markov reward processes", "mrplab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mrplab 1.0");

  // generate
  detail::GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write a generated process to a JSON file");
  g->add_option("--family", gen.family, "layered | meeting | checkout")
      ->required()
      ->check(CLI::IsMember({"layered", "meeting", "checkout"}));
  g->add_option("--width", gen.width, "layered: states per layer")->capture_default_str();
  g->add_option("--horizon", gen.horizon, "horizon T (layered: T-1 layers of states)")
      ->capture_default_str();
  g->add_option("--p-back", gen.p_back, "layered: probability that a state gets a backward edge")
      ->capture_default_str();
  g->add_option("--seed", gen.seed, "layered: instance seed")->capture_default_str();
  g->add_option("--branches", gen.branches, "meeting: number of disjoint branches k")->capture_default_str();
  g->add_option("--meeting-horizon", gen.meeting_horizon, "meeting: step H at which branches merge")
      ->capture_default_str();
  g->add_option("--reward-kind", gen.reward_kind, "meeting: constant | uniform | gaussian")
      ->capture_default_str();
  g->add_option("--reward-mean", gen.reward_mean, "meeting: reward mean")->capture_default_str();
  g->add_option("--reward-spread", gen.reward_spread, "meeting: uniform half-width or gaussian sd")
      ->capture_default_str();
  g->add_option("--click-probs", gen.click_probs, "checkout: click probability of each page")
      ->delimiter(',');
  g->add_option("--sale-prob", gen.sale_prob, "checkout: probability that checkout ends in a sale")
      ->capture_default_str();
  g->add_option("-o,--output", gen.output, "Output JSON path")->required();

  // analyze
  detail::AnalyzeArgs an;
  auto* a = app.add_subcommand("analyze", "Exact values, occupancies and asymptotic variances");
  a->add_option("file", an.file, "Process JSON file")->required();
  a->add_option("--state", an.states, "Restrict output to these states (repeatable)");
  a->add_option("--advantage", an.advantage, "Also report the advantage pair S S'")->expected(2);
  a->add_option("--format", an.format, "text | json | csv")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();
  auto* as_json = a->add_flag("--json", "Same as --format json");
  auto* as_csv = a->add_flag("--csv", "Same as --format csv");
  a->add_option("-o,--output", an.output, "Write to this file instead of stdout");

  // estimate
  std::string est_file;
  std::size_t est_n = 1000;
  std::uint64_t est_seed = 0;
  std::string est_method = "both";
  std::string est_output;
  auto* e = app.add_subcommand("estimate", "Sample trajectories and write MC and TD estimates as CSV");
  e->add_option("file", est_file, "Process JSON file")->required();
  e->add_option("--n", est_n, "Number of trajectories")->capture_default_str();
  e->add_option("--seed", est_seed, "Sampling seed")->capture_default_str();
  e->add_option("--method", est_method, "mc | td | both")
      ->check(CLI::IsMember({"mc", "td", "both"}))
      ->capture_default_str();
  e->add_option("-o,--output", est_output, "Output CSV path (stdout if omitted)");

  // crossing
  std::string cr_file;
  std::string cr_from;
  std::string cr_to;
  std::size_t cr_n = 10000;
  std::uint64_t cr_seed = 0;
  std::size_t cr_cap = kDefaultEnumerationCap;
  auto* c = app.add_subcommand("crossing", "Trajectory crossing time of a state pair");
  c->add_option("file", cr_file, "Process JSON file")->required();
  c->add_option("--from", cr_from, "First state")->required();
  c->add_option("--to", cr_to, "Second state")->required();
  auto* exact = c->add_flag("--exact", "Exact value by trajectory enumeration (acyclic processes)");
  auto* mc = c->add_flag("--mc", "Monte-Carlo upper bound under the independent coupling");
  exact->excludes(mc);
  c->add_option("--n", cr_n, "--mc: number of sampled pairs")->capture_default_str();
  c->add_option("--seed", cr_seed, "--mc: sampling seed")->capture_default_str();
  c->add_option("--cap", cr_cap, "--exact: maximum trajectories per state")->capture_default_str();

  // experiment
  std::string ex_config;
  std::optional<std::string> ex_kind;
  std::optional<std::size_t> ex_width, ex_horizon, ex_branches, ex_n, ex_k, ex_threads;
  std::optional<double> ex_p_back;
  std::optional<std::uint64_t> ex_seed;
  std::optional<std::vector<std::size_t>> ex_horizons, ex_meeting, ex_sizes;
  std::optional<std::string> ex_target_s, ex_target_sp, ex_output;
  auto* x = app.add_subcommand("experiment", "Run a replication sweep and write a CSV table");
  x->add_option("--config", ex_config, "Experiment JSON config; flags override its fields");
  x->add_option("--kind", ex_kind, "horizon-sweep | meeting-sweep | sample-sweep | regret")
      ->check(CLI::IsMember({"horizon-sweep", "meeting-sweep", "sample-sweep", "regret"}));
  x->add_option("--width", ex_width, "Layered width W");
  x->add_option("--horizon", ex_horizon, "Fixed horizon T");
  x->add_option("--horizons", ex_horizons, "Horizon list for horizon-sweep")->delimiter(',');
  x->add_option("--meeting-horizons", ex_meeting, "Meeting horizon list for meeting-sweep")->delimiter(',');
  x->add_option("--sample-sizes", ex_sizes, "Trajectory counts for sample-sweep and regret")->delimiter(',');
  x->add_option("--p-back", ex_p_back, "Backward-edge probability");
  x->add_option("--branches", ex_branches, "Meeting branches k");
  x->add_option("--n", ex_n, "Trajectories per replication");
  x->add_option("--replications", ex_k, "Replications K");
  x->add_option("--seed", ex_seed, "Base seed");
  x->add_option("--target-s", ex_target_s, "First target state");
  x->add_option("--target-sp", ex_target_sp, "Second target state");
  x->add_option("-o,--output", ex_output, "Output CSV path; metadata goes to <path>.json");
  x->add_option("--threads", ex_threads, "Worker threads (default: MRPLAB_THREADS or all cores)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion& v) {
    out << v.what() << "\n";
    return kOk;
  } catch (const CLI::ParseError& pe) {
    err << "error: " << pe.what() << "\nrun with --help for usage\n";
    return kUsage;
  }

  try {
    if (g->parsed()) {
      const MrpSpec spec = detail::generate(gen);
      require_valid(spec);
      save_mrp(gen.output, spec);
      out << "wrote " << spec.size() << " states to " << gen.output << "\n";
    } else if (a->parsed()) {
      if (*as_json) an.format = "json";
      if (*as_csv) an.format = "csv";
      const auto report = analyze(load_mrp(an.file));
      detail::emit(an.output, detail::analyze_text(an, report), out);
    } else if (e->parsed()) {
      const MrpSpec spec = load_mrp(est_file);
      require_valid(spec);
      const Dataset data = sample_dataset(spec, est_n, est_seed);
      std::vector<TabularEstimate> ests;
      if (est_method != "td") ests.push_back(mc_estimate(data, spec));
      if (est_method != "mc") ests.push_back(td_estimate(data, spec));
      detail::emit(est_output, detail::estimate_csv(spec, ests), out);
    } else if (c->parsed()) {
      const MrpSpec spec = load_mrp(cr_file);
      require_valid(spec);
      const StateId s = spec.id(cr_from);
      const StateId sp = spec.id(cr_to);
      if (*mc) {
        const auto est = crossing_time_upper(spec, s, sp, cr_n, cr_seed);
        out << "H_upper " << format_double(est.mean) << "\nstandard_error " << format_double(est.standard_error)
            << "\nsamples " << est.samples << "\n";
      } else {
        try {
          const auto h = crossing_time_exact(spec, s, sp, cr_cap);
          out << "H " << format_double(h.value) << "\nplan_support " << h.coupling.plan.size()
              << "\natoms " << h.atoms_from << " " << h.atoms_to << "\n";
        } catch (const CyclicSpecError&) {
          throw CyclicSpecError("process has cycles, so the exact crossing time is unavailable; rerun with "
                                "--mc for a Monte-Carlo upper bound");
        } catch (const EnumerationCapExceeded& ce) {
          throw EnumerationCapExceeded(std::string(ce.what()) + " (rerun with --mc)");
        }
      }
    } else if (x->parsed()) {
      ExperimentConfig cfg;
      if (!ex_config.empty()) {
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(read_text_file(ex_config));
        } catch (const nlohmann::json::parse_error& pe) {
          throw UsageError(std::string("experiment config: ") + pe.what());
        }
        cfg = config_from_json(j);
        if (ex_kind) {
          cfg.kind = parse_experiment_kind(*ex_kind);
        }
      } else {
        if (!ex_kind) throw UsageError("experiment: give --config or --kind");
        cfg.kind = parse_experiment_kind(*ex_kind);
        apply_kind_defaults(cfg);
      }
      if (ex_width) cfg.width = *ex_width;
      if (ex_horizon) cfg.horizon = *ex_horizon;
      if (ex_horizons) cfg.horizons = *ex_horizons;
      if (ex_meeting) cfg.meeting_horizons = *ex_meeting;
      if (ex_sizes) cfg.sample_sizes = *ex_sizes;
      if (ex_p_back) cfg.back_prob = *ex_p_back;
      if (ex_branches) cfg.branches = *ex_branches;
      if (ex_n) cfg.n = *ex_n;
      if (ex_k) cfg.replications = *ex_k;
      if (ex_seed) cfg.seed = *ex_seed;
      if (ex_target_s) cfg.target_s = *ex_target_s;
      if (ex_target_sp) cfg.target_sp = *ex_target_sp;
      if (ex_output) cfg.output = *ex_output;
      if (ex_threads) cfg.threads = *ex_threads;
      if (cfg.output.empty()) throw UsageError("experiment: no output path (set \"output\" or -o)");
      const auto result = run_experiment(cfg);
      write_text_file_atomic(cfg.output, result.csv);
      write_text_file_atomic(cfg.output + ".json", result.metadata.dump(2) + "\n");
      out << "wrote " << cfg.output << "\n";
    }
  } catch (const UsageError& ue) {
    err << "error: " << ue.what() << "\n";
    return kUsage;
  } catch (const InvalidSpecError& ie) {
    err << "error: " << ie.what() << "\n";
    return kInvalidSpec;
  } catch (const NumericalError& ne) {
    err << "error: " << ne.what() << "\n";
    return kNumerical;
  } catch (const UndefinedEstimateError& ue) {
    err << "error: " << ue.what() << "\n";
    return kNumerical;
  }
  return kOk;
}

inline int dispatch(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return dispatch(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace mrplab::cli
