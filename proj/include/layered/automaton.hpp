#pragma once

#include <map>
#include <set>
#include <span>
#include <utility>

#include "layered/core.hpp"

namespace layered {

struct Transition {
  std::string from, on, to;
  auto operator<=>(const Transition&) const = default;
};

/// A deterministic partial transition system given by name. Determinism is a
/// validated invariant, not a structural one, so duplicate (from, on) entries
/// survive parsing and are reported by the validators.
struct TransitionSystem {
  std::vector<std::string> states;
  std::vector<Transition> transitions;
};

// ---------------------------------------------------------------------------
// Layered automaton: a stack of deterministic partial transition systems
// T_1..T_d with parent maps from each layer into the previous one. States are
// indexed globally, sorted by (layer, name); that order is the tie-breaker
// everywhere.
// ---------------------------------------------------------------------------
class LayeredAutomaton {
public:
  LayeredAutomaton(Alphabet alphabet, std::vector<TransitionSystem> layers,
                   std::vector<std::map<std::string, std::string>> parents,
                   const std::string& initial)
      : alphabet_(std::move(alphabet)), raw_layers_(std::move(layers)), raw_parents_(std::move(parents)) {
    if (raw_layers_.empty()) throw ParseError("layered automaton needs at least one layer");
    if (raw_parents_.size() + 1 != raw_layers_.size())
      throw ParseError("expected one parent map per layer beyond the first");

    const int d = static_cast<int>(raw_layers_.size());
    layer_begin_.assign(static_cast<size_t>(d) + 2, 0);
    for (int x = 1; x <= d; ++x) {
      auto names = raw_layers_[static_cast<size_t>(x - 1)].states;
      std::sort(names.begin(), names.end());
      if (std::adjacent_find(names.begin(), names.end()) != names.end())
        throw ParseError("duplicate state id on layer " + std::to_string(x));
      layer_begin_[static_cast<size_t>(x)] = static_cast<int>(names_.size());
      for (auto& n : names) {
        names_.push_back(std::move(n));
        layer_.push_back(x);
      }
    }
    layer_begin_[static_cast<size_t>(d) + 1] = static_cast<int>(names_.size());
    layer_begin_[0] = 0;

    parent_.assign(names_.size(), -1);
    for (int x = 2; x <= d; ++x) {
      const auto& pm = raw_parents_[static_cast<size_t>(x - 2)];
      for (int q = layer_begin_[static_cast<size_t>(x)]; q < layer_begin_[static_cast<size_t>(x) + 1]; ++q) {
        auto it = pm.find(names_[static_cast<size_t>(q)]);
        if (it == pm.end())
          throw ParseError("state '" + names_[static_cast<size_t>(q)] + "' on layer " +
                           std::to_string(x) + " has no parent");
        auto p = find_on_layer(x - 1, it->second);
        if (!p)
          throw ParseError("parent '" + it->second + "' of '" + names_[static_cast<size_t>(q)] +
                           "' is not a state of layer " + std::to_string(x - 1));
        parent_[static_cast<size_t>(q)] = *p;
      }
      for (const auto& [child, par] : pm) {
        (void)par;
        if (!find_on_layer(x, child))
          throw ParseError("parent map entry for unknown state '" + child + "' on layer " +
                           std::to_string(x));
      }
    }

    trans_.assign(names_.size(), {});
    for (int x = 1; x <= d; ++x) {
      for (const auto& t : raw_layers_[static_cast<size_t>(x - 1)].transitions) {
        auto from = find_on_layer(x, t.from);
        auto to = find_on_layer(x, t.to);
        if (!from || !to)
          throw ParseError("transition " + t.from + " -" + t.on + "-> " + t.to +
                           " uses a state not on layer " + std::to_string(x));
        int sym = alphabet_.index(t.on) ? *alphabet_.index(t.on) : -1;
        if (sym < 0) throw ParseError("transition uses unknown symbol '" + t.on + "'");
        trans_[static_cast<size_t>(*from)].push_back({sym, *to});
      }
    }
    for (auto& row : trans_) std::sort(row.begin(), row.end());

    auto init = find_on_layer(1, initial);
    if (!init) throw ParseError("initial state '" + initial + "' is not a state of layer 1");
    initial_ = *init;
  }

  const Alphabet& alphabet() const { return alphabet_; }
  int depth() const { return static_cast<int>(raw_layers_.size()); }
  int state_count() const { return static_cast<int>(names_.size()); }
  int initial() const { return initial_; }
  const std::string& name(int q) const { return names_[static_cast<size_t>(q)]; }
  int layer_of(int q) const { return layer_[static_cast<size_t>(q)]; }
  int parent(int q) const { return parent_[static_cast<size_t>(q)]; }

  int layer_size(int x) const {
    return layer_begin_[static_cast<size_t>(x) + 1] - layer_begin_[static_cast<size_t>(x)];
  }
  int layer_first(int x) const { return layer_begin_[static_cast<size_t>(x)]; }
  int layer_end(int x) const { return layer_begin_[static_cast<size_t>(x) + 1]; }

  /// delta within q's own layer; -1 when undefined. With duplicate entries
  /// (invalid automata) the least target wins.
  int step(int q, int sym) const {
    const auto& row = trans_[static_cast<size_t>(q)];
    auto it = std::lower_bound(row.begin(), row.end(), std::pair<int, int>{sym, -1});
    if (it == row.end() || it->first != sym) return -1;
    return it->second;
  }

  const std::vector<std::pair<int, int>>& transitions_of(int q) const {
    return trans_[static_cast<size_t>(q)];
  }

  /// Iterated parent down to `layer`; requires layer <= layer_of(q).
  int ancestor(int q, int layer) const {
    int cur = q;
    while (layer_[static_cast<size_t>(cur)] > layer) cur = parent_[static_cast<size_t>(cur)];
    return cur;
  }

  std::optional<int> find_on_layer(int x, std::string_view name) const {
    int lo = layer_begin_[static_cast<size_t>(x)], hi = layer_begin_[static_cast<size_t>(x) + 1];
    auto begin = names_.begin() + lo, end = names_.begin() + hi;
    auto it = std::lower_bound(begin, end, name);
    if (it == end || *it != name) return std::nullopt;
    return static_cast<int>(it - names_.begin());
  }

  /// Finds a state by name on any layer (lowest layer wins on collisions).
  std::optional<int> find_state(std::string_view name) const {
    for (int x = 1; x <= depth(); ++x)
      if (auto q = find_on_layer(x, name)) return q;
    return std::nullopt;
  }

  int state_or_throw(std::string_view name) const {
    if (auto q = find_state(name)) return *q;
    throw std::invalid_argument("unknown state '" + std::string(name) + "'");
  }

  const std::vector<TransitionSystem>& raw_layers() const { return raw_layers_; }
  const std::vector<std::map<std::string, std::string>>& raw_parents() const { return raw_parents_; }

  /// Children of a state, in state order (empty span for the deepest layer).
  std::vector<int> children(int q) const {
    std::vector<int> out;
    int x = layer_of(q);
    if (x >= depth()) return out;
    for (int c = layer_first(x + 1); c < layer_end(x + 1); ++c)
      if (parent_[static_cast<size_t>(c)] == q) out.push_back(c);
    return out;
  }

private:
  Alphabet alphabet_;
  std::vector<TransitionSystem> raw_layers_;
  std::vector<std::map<std::string, std::string>> raw_parents_;
  std::vector<std::string> names_;
  std::vector<int> layer_;
  std::vector<int> parent_;
  std::vector<int> layer_begin_;
  std::vector<std::vector<std::pair<int, int>>> trans_;
  int initial_ = 0;
};

// ---------------------------------------------------------------------------
// Complete deterministic parity automaton with priorities on transitions,
// min-parity semantics: a run is accepting iff the least priority seen
// infinitely often is even.
// ---------------------------------------------------------------------------
struct DpaTransition {
  std::string from, on, to;
  int priority = 1;
  auto operator<=>(const DpaTransition&) const = default;
};

class DeterministicParityAutomaton {
public:
  DeterministicParityAutomaton(Alphabet alphabet, std::vector<std::string> states,
                               std::vector<DpaTransition> transitions, const std::string& initial,
                               int max_priority)
      : alphabet_(std::move(alphabet)), raw_(std::move(transitions)), max_priority_(max_priority) {
    names_ = std::move(states);
    std::sort(names_.begin(), names_.end());
    if (std::adjacent_find(names_.begin(), names_.end()) != names_.end())
      throw ParseError("duplicate state id");
    if (names_.empty()) throw ParseError("automaton needs at least one state");
    if (max_priority_ < 1) throw ParseError("max priority must be at least 1");
    step_.assign(names_.size(), std::vector<std::pair<int, int>>(
                                    static_cast<size_t>(alphabet_.size()), {-1, 0}));
    std::sort(raw_.begin(), raw_.end());
    for (const auto& t : raw_) {
      auto from = find_state(t.from);
      auto to = find_state(t.to);
      if (!from || !to) throw ParseError("transition uses unknown state");
      int sym = alphabet_.index(t.on) ? *alphabet_.index(t.on) : -1;
      if (sym < 0) throw ParseError("transition uses unknown symbol '" + t.on + "'");
      auto& cell = step_[static_cast<size_t>(*from)][static_cast<size_t>(sym)];
      if (cell.first == -1) cell = {*to, t.priority};
    }
    auto init = find_state(initial);
    if (!init) throw ParseError("unknown initial state '" + initial + "'");
    initial_ = *init;
  }

  const Alphabet& alphabet() const { return alphabet_; }
  int state_count() const { return static_cast<int>(names_.size()); }
  int initial() const { return initial_; }
  int max_priority() const { return max_priority_; }
  const std::string& name(int q) const { return names_[static_cast<size_t>(q)]; }

  /// (successor, priority); successor is -1 when the letter is missing
  /// (possible only on invalid automata).
  std::pair<int, int> step(int q, int sym) const {
    return step_[static_cast<size_t>(q)][static_cast<size_t>(sym)];
  }

  std::optional<int> find_state(std::string_view name) const {
    auto it = std::lower_bound(names_.begin(), names_.end(), name);
    if (it == names_.end() || *it != name) return std::nullopt;
    return static_cast<int>(it - names_.begin());
  }

  int state_or_throw(std::string_view name) const {
    if (auto q = find_state(name)) return *q;
    throw std::invalid_argument("unknown state '" + std::string(name) + "'");
  }

  const std::vector<DpaTransition>& raw_transitions() const { return raw_; }

private:
  Alphabet alphabet_;
  std::vector<std::string> names_;
  std::vector<DpaTransition> raw_;
  std::vector<std::vector<std::pair<int, int>>> step_;
  int initial_ = 0;
  int max_priority_ = 1;
};

// ---------------------------------------------------------------------------
// Simple-by-priorities alternating parity automaton: for a fixed (state,
// letter) all transitions carry one priority; odd priorities are resolved by
// Eve, even ones by Adam.
// ---------------------------------------------------------------------------
struct AltTransition {
  std::string from, on;
  int priority = 1;
  std::string to;
  auto operator<=>(const AltTransition&) const = default;
};

class AlternatingAutomaton {
public:
  AlternatingAutomaton(Alphabet alphabet, std::vector<std::string> states,
                       std::vector<AltTransition> transitions, const std::string& initial)
      : alphabet_(std::move(alphabet)), raw_(std::move(transitions)) {
    names_ = std::move(states);
    std::sort(names_.begin(), names_.end());
    if (std::adjacent_find(names_.begin(), names_.end()) != names_.end())
      throw ParseError("duplicate state id");
    if (names_.empty()) throw ParseError("automaton needs at least one state");
    std::sort(raw_.begin(), raw_.end());
    raw_.erase(std::unique(raw_.begin(), raw_.end()), raw_.end());
    actions_.assign(names_.size(),
                    std::vector<Action>(static_cast<size_t>(alphabet_.size())));
    for (const auto& t : raw_) {
      auto from = find_state(t.from);
      auto to = find_state(t.to);
      if (!from || !to) throw ParseError("transition uses unknown state");
      int sym = alphabet_.index(t.on) ? *alphabet_.index(t.on) : -1;
      if (sym < 0) throw ParseError("transition uses unknown symbol '" + t.on + "'");
      auto& act = actions_[static_cast<size_t>(*from)][static_cast<size_t>(sym)];
      if (act.successors.empty()) act.priority = t.priority;
      act.mixed |= act.priority != t.priority;
      act.successors.push_back(*to);
    }
    auto init = find_state(initial);
    if (!init) throw ParseError("unknown initial state '" + initial + "'");
    initial_ = *init;
  }

  struct Action {
    int priority = 0;  // 0 when the action has no transition
    bool mixed = false;
    std::vector<int> successors;
  };

  const Alphabet& alphabet() const { return alphabet_; }
  int state_count() const { return static_cast<int>(names_.size()); }
  int initial() const { return initial_; }
  const std::string& name(int q) const { return names_[static_cast<size_t>(q)]; }
  const Action& action(int q, int sym) const {
    return actions_[static_cast<size_t>(q)][static_cast<size_t>(sym)];
  }

  std::optional<int> find_state(std::string_view name) const {
    auto it = std::lower_bound(names_.begin(), names_.end(), name);
    if (it == names_.end() || *it != name) return std::nullopt;
    return static_cast<int>(it - names_.begin());
  }

  int state_or_throw(std::string_view name) const {
    if (auto q = find_state(name)) return *q;
    throw std::invalid_argument("unknown state '" + std::string(name) + "'");
  }

  int max_priority() const {
    int d = 1;
    for (const auto& t : raw_) d = std::max(d, t.priority);
    return d;
  }

  const std::vector<AltTransition>& raw_transitions() const { return raw_; }

private:
  Alphabet alphabet_;
  std::vector<std::string> names_;
  std::vector<AltTransition> raw_;
  std::vector<std::vector<Action>> actions_;
  int initial_ = 0;
};

/// Nested equivalence relations over the states of an alternating automaton,
/// one per layer. Level x is a partition of a subset of the states; nesting
/// (each level refines the previous one) is verified by the consumer.
struct NestedRelations {
  std::vector<std::vector<std::vector<std::string>>> levels;
};

/// A candidate structure map between two layered automata. `map` must assign
/// a target state to every source state; `strong` additionally asks for
/// preservation of non-transitions.
struct LayeredMorphism {
  LayeredAutomaton source, target;
  std::map<std::string, std::string> map;
  bool strong = false;
};

// ---------------------------------------------------------------------------
// Structural queries
// ---------------------------------------------------------------------------

/// llayer(q, a): the deepest layer x such that delta_x(ancestor_x(q), a) is
/// defined. Always defined on valid automata because T_1 is complete.
inline int action_layer(const LayeredAutomaton& a, int q, int sym) {
  int cur = q;
  int x = a.layer_of(q);
  while (x >= 1) {
    if (a.step(cur, sym) != -1) return x;
    cur = a.parent(cur);
    --x;
  }
  throw std::invalid_argument("layer 1 is not complete at state '" + a.name(a.ancestor(q, 1)) +
                              "' and symbol '" + a.alphabet().symbol(sym) + "'");
}

inline int action_layer(const LayeredAutomaton& a, const std::string& state, const std::string& sym) {
  return action_layer(a, a.state_or_throw(state), a.alphabet().index_or_throw(sym));
}

/// Ancestor of q at the given layer; rejects layers below q's own.
inline int ancestor_at(const LayeredAutomaton& a, int q, int layer) {
  if (layer < 1 || layer > a.layer_of(q))
    throw std::domain_error("state '" + a.name(q) + "' lives on layer " +
                            std::to_string(a.layer_of(q)) + ", ancestor at layer " +
                            std::to_string(layer) + " is undefined");
  return a.ancestor(q, layer);
}

inline std::string ancestor_at(const LayeredAutomaton& a, const std::string& state, int layer) {
  return a.name(ancestor_at(a, a.state_or_throw(state), layer));
}

/// States that are not the image of any parent map. Leaves may live on
/// different layers.
inline std::vector<int> leaf_states(const LayeredAutomaton& a) {
  std::vector<bool> is_parent(static_cast<size_t>(a.state_count()), false);
  for (int q = 0; q < a.state_count(); ++q)
    if (a.parent(q) >= 0) is_parent[static_cast<size_t>(a.parent(q))] = true;
  std::vector<int> out;
  for (int q = 0; q < a.state_count(); ++q)
    if (!is_parent[static_cast<size_t>(q)]) out.push_back(q);
  return out;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

inline std::vector<Diagnostic> validate_layered(const LayeredAutomaton& a) {
  std::vector<Diagnostic> out;

  for (int q = a.layer_first(1); q < a.layer_end(1); ++q)
    for (int s = 0; s < a.alphabet().size(); ++s)
      if (a.step(q, s) == -1)
        out.push_back({"t1-incomplete", "layer 1 state '" + a.name(q) + "' has no transition on '" +
                                            a.alphabet().symbol(s) + "'"});

  {
    std::vector<bool> seen(static_cast<size_t>(a.state_count()), false);
    std::vector<int> stack{a.initial()};
    seen[static_cast<size_t>(a.initial())] = true;
    while (!stack.empty()) {
      int q = stack.back();
      stack.pop_back();
      for (auto [sym, to] : a.transitions_of(q)) {
        (void)sym;
        if (!seen[static_cast<size_t>(to)]) {
          seen[static_cast<size_t>(to)] = true;
          stack.push_back(to);
        }
      }
    }
    for (int q = a.layer_first(1); q < a.layer_end(1); ++q)
      if (!seen[static_cast<size_t>(q)])
        out.push_back({"unreachable", "layer 1 state '" + a.name(q) + "' is unreachable from '" +
                                          a.name(a.initial()) + "'"});
  }

  for (int q = 0; q < a.state_count(); ++q) {
    const auto& row = a.transitions_of(q);
    for (size_t i = 1; i < row.size(); ++i)
      if (row[i].first == row[i - 1].first)
        out.push_back({"nondeterministic", "state '" + a.name(q) + "' has two transitions on '" +
                                               a.alphabet().symbol(row[i].first) + "'"});
  }

  for (int q = 0; q < a.state_count(); ++q) {
    int p = a.parent(q);
    if (p < 0) continue;
    for (auto [sym, to] : a.transitions_of(q)) {
      int pto = a.step(p, sym);
      if (pto != a.parent(to))
        out.push_back({"morphism", "parent map is not a morphism at ('" + a.name(q) + "', '" +
                                       a.alphabet().symbol(sym) + "'): parent moves to " +
                                       (pto == -1 ? std::string("nothing") : "'" + a.name(pto) + "'") +
                                       " but the child's target has parent '" +
                                       (a.parent(to) == -1 ? a.name(to) : a.name(a.parent(to))) + "'"});
    }
  }

  {
    std::map<std::string, int> first_layer;
    for (int q = 0; q < a.state_count(); ++q) {
      auto [it, fresh] = first_layer.try_emplace(a.name(q), a.layer_of(q));
      if (!fresh)
        out.push_back({"namespace", "state id '" + a.name(q) + "' appears on layers " +
                                        std::to_string(it->second) + " and " +
                                        std::to_string(a.layer_of(q))});
    }
  }

  return out;
}

inline std::vector<Diagnostic> validate_dpa(const DeterministicParityAutomaton& d) {
  std::vector<Diagnostic> out;
  for (int q = 0; q < d.state_count(); ++q)
    for (int s = 0; s < d.alphabet().size(); ++s)
      if (d.step(q, s).first == -1)
        out.push_back({"incomplete", "state '" + d.name(q) + "' has no transition on '" +
                                         d.alphabet().symbol(s) + "'"});
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& t : d.raw_transitions()) {
    if (!seen.insert({t.from, t.on}).second)
      out.push_back({"nondeterministic",
                     "state '" + t.from + "' has two transitions on '" + t.on + "'"});
    if (t.priority < 1 || t.priority > d.max_priority())
      out.push_back({"priority-range", "priority " + std::to_string(t.priority) +
                                           " outside [1, " + std::to_string(d.max_priority()) + "]"});
  }
  return out;
}

inline std::vector<Diagnostic> validate_alternating(const AlternatingAutomaton& b) {
  std::vector<Diagnostic> out;
  for (int q = 0; q < b.state_count(); ++q)
    for (int s = 0; s < b.alphabet().size(); ++s) {
      const auto& act = b.action(q, s);
      if (act.successors.empty())
        out.push_back({"incomplete", "state '" + b.name(q) + "' has no transition on '" +
                                         b.alphabet().symbol(s) + "'"});
      else if (act.mixed)
        out.push_back({"mixed-priorities", "action ('" + b.name(q) + "', '" +
                                               b.alphabet().symbol(s) +
                                               "') carries more than one priority"});
    }
  return out;
}

inline void require_valid(const LayeredAutomaton& a, const char* who) {
  auto diags = validate_layered(a);
  if (!diags.empty())
    throw PreconditionError(std::string(who) + ": invalid layered automaton: " + diags.front().code +
                            ": " + diags.front().message);
}

inline void require_valid(const DeterministicParityAutomaton& d, const char* who) {
  auto diags = validate_dpa(d);
  if (!diags.empty())
    throw PreconditionError(std::string(who) + ": invalid parity automaton: " + diags.front().code +
                            ": " + diags.front().message);
}

}  // namespace layered
