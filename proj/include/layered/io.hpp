#pragma once

#include <sstream>

#include <json.hpp>

#include "layered/automaton.hpp"

namespace layered {

// Documents are JSON with a "format" discriminator. serialize_* is canonical:
// keys, states and transitions are emitted in sorted order, so equal automata
// produce identical bytes.

namespace detail {

using Json = nlohmann::ordered_json;

inline nlohmann::json parse_json(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("not valid JSON: ") + e.what());
  }
}

inline const nlohmann::json& field(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
  return *it;
}

inline std::string string_field(const nlohmann::json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_string()) throw ParseError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

inline std::vector<std::string> string_list(const nlohmann::json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_array()) throw ParseError(std::string("field '") + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw ParseError(std::string("field '") + key + "' must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

inline void check_format(const nlohmann::json& j, const char* expected) {
  if (string_field(j, "format") != expected)
    throw ParseError(std::string("expected format '") + expected + "', got '" +
                     string_field(j, "format") + "'");
  if (field(j, "version").get<int>() != 1)
    throw ParseError("unsupported document version");
}

inline void check_unique_states(const std::vector<std::string>& states, const char* where) {
  auto sorted = states;
  std::sort(sorted.begin(), sorted.end());
  auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end())
    throw ParseError(std::string("duplicate state id '") + *dup + "' in " + where);
}

}  // namespace detail

inline std::string detect_format(const std::string& text) {
  auto j = detail::parse_json(text);
  return detail::string_field(j, "format");
}

// -- layered ----------------------------------------------------------------

inline LayeredAutomaton parse_layered(const std::string& text) {
  auto j = detail::parse_json(text);
  detail::check_format(j, "layered");
  Alphabet sigma(detail::string_list(j, "alphabet"));
  const auto& jlayers = detail::field(j, "layers");
  if (!jlayers.is_array() || jlayers.empty())
    throw ParseError("field 'layers' must be a non-empty array");

  std::vector<TransitionSystem> layers;
  std::vector<std::map<std::string, std::string>> parents;
  int x = 0;
  for (const auto& jl : jlayers) {
    ++x;
    TransitionSystem ts;
    ts.states = detail::string_list(jl, "states");
    detail::check_unique_states(ts.states, ("layer " + std::to_string(x)).c_str());
    if (auto it = jl.find("transitions"); it != jl.end()) {
      for (const auto& jt : *it)
        ts.transitions.push_back({detail::string_field(jt, "from"), detail::string_field(jt, "on"),
                                  detail::string_field(jt, "to")});
    }
    layers.push_back(std::move(ts));
    if (x >= 2) {
      std::map<std::string, std::string> pm;
      const auto& jp = detail::field(jl, "parents");
      if (!jp.is_object()) throw ParseError("field 'parents' must be an object");
      for (auto it = jp.begin(); it != jp.end(); ++it) pm[it.key()] = it.value().get<std::string>();
      parents.push_back(std::move(pm));
    }
  }
  return LayeredAutomaton(std::move(sigma), std::move(layers), std::move(parents),
                          detail::string_field(j, "initial"));
}

inline std::string serialize_layered(const LayeredAutomaton& a) {
  detail::Json j;
  j["format"] = "layered";
  j["version"] = 1;
  j["alphabet"] = a.alphabet().symbols();
  j["initial"] = a.name(a.initial());
  j["layers"] = detail::Json::array();
  for (int x = 1; x <= a.depth(); ++x) {
    detail::Json jl;
    auto states = detail::Json::array();
    for (int q = a.layer_first(x); q < a.layer_end(x); ++q) states.push_back(a.name(q));
    jl["states"] = std::move(states);
    if (x >= 2) {
      detail::Json jp = detail::Json::object();
      for (int q = a.layer_first(x); q < a.layer_end(x); ++q) jp[a.name(q)] = a.name(a.parent(q));
      jl["parents"] = std::move(jp);
    }
    std::vector<Transition> ts;
    for (int q = a.layer_first(x); q < a.layer_end(x); ++q)
      for (auto [sym, to] : a.transitions_of(q))
        ts.push_back({a.name(q), a.alphabet().symbol(sym), a.name(to)});
    std::sort(ts.begin(), ts.end());
    auto jts = detail::Json::array();
    for (const auto& t : ts) jts.push_back({{"from", t.from}, {"on", t.on}, {"to", t.to}});
    jl["transitions"] = std::move(jts);
    j["layers"].push_back(std::move(jl));
  }
  return j.dump(2) + "\n";
}

// -- dpa ---------------------------------------------------------------------

inline DeterministicParityAutomaton parse_dpa(const std::string& text) {
  auto j = detail::parse_json(text);
  detail::check_format(j, "dpa");
  Alphabet sigma(detail::string_list(j, "alphabet"));
  auto states = detail::string_list(j, "states");
  detail::check_unique_states(states, "states");
  std::vector<DpaTransition> ts;
  for (const auto& jt : detail::field(j, "transitions"))
    ts.push_back({detail::string_field(jt, "from"), detail::string_field(jt, "on"),
                  detail::string_field(jt, "to"), detail::field(jt, "priority").get<int>()});
  int d = 0;
  if (auto it = j.find("max-priority"); it != j.end()) d = it->get<int>();
  for (const auto& t : ts) d = std::max(d, t.priority);
  if (d == 0) d = 1;
  return DeterministicParityAutomaton(std::move(sigma), std::move(states), std::move(ts),
                                      detail::string_field(j, "initial"), d);
}

inline std::string serialize_dpa(const DeterministicParityAutomaton& d) {
  detail::Json j;
  j["format"] = "dpa";
  j["version"] = 1;
  j["alphabet"] = d.alphabet().symbols();
  j["max-priority"] = d.max_priority();
  j["initial"] = d.name(d.initial());
  auto states = detail::Json::array();
  for (int q = 0; q < d.state_count(); ++q) states.push_back(d.name(q));
  j["states"] = std::move(states);
  auto ts = d.raw_transitions();
  std::sort(ts.begin(), ts.end());
  auto jts = detail::Json::array();
  for (const auto& t : ts)
    jts.push_back({{"from", t.from}, {"on", t.on}, {"to", t.to}, {"priority", t.priority}});
  j["transitions"] = std::move(jts);
  return j.dump(2) + "\n";
}

// -- alternating (output only; nothing in the toolchain reads these back) ----

inline std::string serialize_alternating(const AlternatingAutomaton& b) {
  detail::Json j;
  j["format"] = "alternating";
  j["version"] = 1;
  j["alphabet"] = b.alphabet().symbols();
  j["initial"] = b.name(b.initial());
  auto states = detail::Json::array();
  for (int q = 0; q < b.state_count(); ++q) states.push_back(b.name(q));
  j["states"] = std::move(states);
  auto ts = b.raw_transitions();
  std::sort(ts.begin(), ts.end());
  auto jts = detail::Json::array();
  for (const auto& t : ts)
    jts.push_back({{"from", t.from}, {"on", t.on}, {"priority", t.priority}, {"to", t.to}});
  j["transitions"] = std::move(jts);
  return j.dump(2) + "\n";
}

// -- DOT ----------------------------------------------------------------------

namespace detail {

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

/// Layers become ranked clusters; parent maps render as dotted edges, matching
/// the forest drawings this library uses in its documentation.
inline std::string export_dot(const LayeredAutomaton& a) {
  std::ostringstream os;
  os << "digraph layered {\n  rankdir=TB;\n  node [shape=circle];\n";
  for (int x = 1; x <= a.depth(); ++x) {
    os << "  subgraph cluster_layer" << x << " {\n    label=\"layer " << x << "\";\n";
    for (int q = a.layer_first(x); q < a.layer_end(x); ++q) {
      os << "    " << detail::dot_quote(a.name(q));
      if (q == a.initial()) os << " [penwidth=2]";
      os << ";\n";
    }
    os << "  }\n";
  }
  for (int q = 0; q < a.state_count(); ++q) {
    // group parallel edges into one label per target
    std::map<int, std::vector<std::string>> by_target;
    for (auto [sym, to] : a.transitions_of(q)) by_target[to].push_back(a.alphabet().symbol(sym));
    for (const auto& [to, syms] : by_target)
      os << "  " << detail::dot_quote(a.name(q)) << " -> " << detail::dot_quote(a.name(to))
         << " [label=" << detail::dot_quote(word_text(syms, ",")) << "];\n";
  }
  for (int q = 0; q < a.state_count(); ++q)
    if (a.parent(q) >= 0)
      os << "  " << detail::dot_quote(a.name(q)) << " -> " << detail::dot_quote(a.name(a.parent(q)))
         << " [style=dotted, constraint=false];\n";
  os << "}\n";
  return os.str();
}

inline std::string export_dot(const AlternatingAutomaton& b) {
  std::ostringstream os;
  os << "digraph alternating {\n  rankdir=LR;\n  node [shape=circle];\n";
  for (int q = 0; q < b.state_count(); ++q) {
    os << "  " << detail::dot_quote(b.name(q));
    if (q == b.initial()) os << " [penwidth=2]";
    os << ";\n";
  }
  std::map<std::pair<int, int>, std::vector<std::string>> by_edge;
  for (int q = 0; q < b.state_count(); ++q)
    for (int s = 0; s < b.alphabet().size(); ++s) {
      const auto& act = b.action(q, s);
      for (int to : act.successors)
        by_edge[{q, to}].push_back(b.alphabet().symbol(s) + ":" + std::to_string(act.priority));
    }
  for (const auto& [edge, labels] : by_edge)
    os << "  " << detail::dot_quote(b.name(edge.first)) << " -> "
       << detail::dot_quote(b.name(edge.second)) << " [label=" << detail::dot_quote(word_text(labels, " "))
       << "];\n";
  os << "}\n";
  return os.str();
}

}  // namespace layered
