#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mrplab/errors.hpp"
#include "mrplab/mrp.hpp"

namespace mrplab {

// Round-trippable decimal rendering with 17 significant digits.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

inline std::string reward_json(const RewardDist& r) {
  std::string out = "{\"kind\": \"" + std::string(to_string(r.kind())) +
                    "\", \"mean\": " + format_double(r.mean());
  switch (r.kind()) {
    case RewardDist::Kind::kUniform: out += ", \"halfwidth\": " + format_double(r.spread()); break;
    case RewardDist::Kind::kGaussian: out += ", \"sd\": " + format_double(r.spread()); break;
    case RewardDist::Kind::kConstant: break;
  }
  return out + "}";
}

inline double number_field(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_number()) {
    throw InvalidSpecError(where + ": missing numeric field '" + key + "'");
  }
  return obj.at(key).get<double>();
}

inline std::string string_field(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_string()) {
    throw InvalidSpecError(where + ": missing string field '" + key + "'");
  }
  return obj.at(key).get<std::string>();
}

inline RewardDist parse_reward(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw InvalidSpecError(where + ": reward must be an object");
  const std::string kind = string_field(j, "kind", where);
  const double mean = number_field(j, "mean", where);
  if (kind == "constant") return RewardDist::constant(mean);
  if (kind == "uniform") return RewardDist::uniform(mean, number_field(j, "halfwidth", where));
  if (kind == "gaussian") return RewardDist::gaussian(mean, number_field(j, "sd", where));
  throw InvalidSpecError(where + ": unknown reward kind '" + kind + "'");
}

}  // namespace detail

// Serializes the process in the JSON-shaped text format:
//   {"states": [...],
//    "transitions": [{"from", "to", "p", "reward": {"kind", "mean", "halfwidth"|"sd"}}],
//    "initial": [{"state", "p"}]}
inline std::string to_json_text(const MrpSpec& spec) {
  std::ostringstream os;
  os << "{\n  \"states\": [";
  for (std::size_t i = 0; i < spec.size(); ++i) {
    os << (i ? ", " : "") << detail::json_string(spec.states()[i]);
  }
  os << "],\n  \"transitions\": [";
  bool first = true;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    for (const Edge& e : spec.edges(StateId(i))) {
      os << (first ? "\n    " : ",\n    ");
      first = false;
      os << "{\"from\": " << detail::json_string(spec.states()[i])
         << ", \"to\": " << detail::json_string(spec.name(e.to))
         << ", \"p\": " << format_double(e.p) << ", \"reward\": " << detail::reward_json(e.reward)
         << "}";
    }
  }
  os << "\n  ],\n  \"initial\": [";
  first = true;
  for (const InitialMass& m : spec.initial()) {
    os << (first ? "\n    " : ",\n    ");
    first = false;
    os << "{\"state\": " << detail::json_string(spec.name(m.state))
       << ", \"p\": " << format_double(m.p) << "}";
  }
  os << "\n  ]\n}\n";
  return os.str();
}

inline MrpSpec from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidSpecError("process file: top level must be an object");
  for (const char* key : {"states", "transitions", "initial"}) {
    if (!j.contains(key) || !j.at(key).is_array()) {
      throw InvalidSpecError(std::string("process file: missing array '") + key + "'");
    }
  }
  std::vector<std::string> names;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& s : j.at("states")) {
    if (!s.is_string()) throw InvalidSpecError("process file: state names must be strings");
    index.emplace(s.get<std::string>(), names.size());
    names.push_back(s.get<std::string>());
  }
  auto lookup = [&index](const std::string& name, const std::string& where) {
    auto it = index.find(name);
    if (it == index.end()) throw InvalidSpecError(where + ": unknown state '" + name + "'");
    return StateId(it->second);
  };

  std::vector<std::vector<Edge>> transitions(names.size());
  std::size_t k = 0;
  for (const auto& t : j.at("transitions")) {
    const std::string where = "transition " + std::to_string(k++);
    if (!t.is_object()) throw InvalidSpecError(where + ": must be an object");
    const StateId from = lookup(detail::string_field(t, "from", where), where);
    const std::string to_name = detail::string_field(t, "to", where);
    const StateId to = to_name == kTerminalName ? StateId::terminal() : lookup(to_name, where);
    const double p = detail::number_field(t, "p", where);
    const RewardDist reward = t.contains("reward") ? detail::parse_reward(t.at("reward"), where)
                                                   : RewardDist::constant(0.0);
    transitions[from.index()].push_back({to, p, reward});
  }

  std::vector<InitialMass> initial;
  k = 0;
  for (const auto& m : j.at("initial")) {
    const std::string where = "initial entry " + std::to_string(k++);
    if (!m.is_object()) throw InvalidSpecError(where + ": must be an object");
    initial.push_back({lookup(detail::string_field(m, "state", where), where),
                       detail::number_field(m, "p", where)});
  }
  return MrpSpec(std::move(names), std::move(transitions), std::move(initial));
}

inline MrpSpec parse_mrp(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidSpecError(std::string("process file: ") + e.what());
  }
  return from_json(j);
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path.string() + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline MrpSpec load_mrp(const std::filesystem::path& path) { return parse_mrp(read_text_file(path)); }

// Writes next to the destination and renames, so readers never see a partial file.
inline void write_text_file_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot open '" + tmp.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw UsageError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw UsageError("cannot move output into place at '" + path.string() + "': " + ec.message());
  }
}

inline void save_mrp(const std::filesystem::path& path, const MrpSpec& spec) {
  write_text_file_atomic(path, to_json_text(spec));
}

}  // namespace mrplab
