#pragma once

#include <tuple>

#include "layered/convert.hpp"
#include "layered/game.hpp"
#include "layered/semantics.hpp"

namespace layered {

namespace detail {

// A tracked run in one layer together with a child tracker one layer below.
// Configurations are either a tracker state t (the main run is parent(t)) or
// a bare main for mains without children. Refuter resets dead trackers; a
// reset is the component's Buchi event, and child-free mains mark every step.
struct Component {
  const LayeredAutomaton* a = nullptr;
  bool even_mains = true;
  std::vector<std::vector<int>> children;
  std::vector<int> configs;

  Component(const LayeredAutomaton& aut, bool even) : a(&aut), even_mains(even) {
    children.assign(static_cast<size_t>(aut.state_count()), {});
    for (int q = 0; q < aut.state_count(); ++q)
      if (aut.parent(q) >= 0) children[static_cast<size_t>(aut.parent(q))].push_back(q);
    for (int q = 0; q < aut.state_count(); ++q) {
      if (aut.parent(q) >= 0 && main_parity_ok(aut.layer_of(aut.parent(q))))
        configs.push_back(q);  // tracker
      if (main_parity_ok(aut.layer_of(q)) && children[static_cast<size_t>(q)].empty())
        configs.push_back(aut.state_count() + q);  // bare main
    }
  }

  bool main_parity_ok(int layer) const { return (layer % 2 == 0) == even_mains; }
  bool is_tracker(int c) const { return c < a->state_count(); }
  int main_of(int c) const { return is_tracker(c) ? a->parent(c) : c - a->state_count(); }

  std::vector<int> start_configs(int main) const {
    const auto& kids = children[static_cast<size_t>(main)];
    if (kids.empty()) return {a->state_count() + main};
    return kids;
  }

  struct Adv {
    bool dead = false;
    bool reset = false;
    int next = -1;       // valid when !reset
    int reset_main = -1; // valid when reset
  };

  Adv advance(int c, int sym) const {
    int m2 = a->step(main_of(c), sym);
    if (m2 == -1) return {true, false, -1, -1};
    if (is_tracker(c)) {
      int t2 = a->step(c, sym);
      if (t2 != -1) return {false, false, t2, -1};
    }
    return {false, true, -1, m2};
  }
};

// Shared registry-based arena builder for the three decision games.
struct ArenaBuilder {
  GameArena g;
  std::map<std::tuple<int, int, int>, int> play;    // (kind, left, right) -> vertex
  std::map<std::tuple<int, int, int>, int> choice;  // (pending mask, left, right) -> vertex
  int sink = -1;

  int play_vertex(int kind, int l, int r) {
    auto [it, fresh] = play.try_emplace({kind, l, r}, -1);
    if (fresh) it->second = g.add_vertex(Player::Prover);
    return it->second;
  }
  int choice_vertex(int mask, int l, int r) {
    auto [it, fresh] = choice.try_emplace({mask, l, r}, -1);
    if (fresh) it->second = g.add_vertex(Player::Refuter);
    return it->second;
  }
  int refuter_sink() {
    if (sink == -1) sink = g.add_sink(Player::Refuter);
    return sink;
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Consistency
// ---------------------------------------------------------------------------

struct ConsistencyResult {
  bool consistent = true;
  std::optional<std::pair<std::string, std::string>> witness;  // (even state, odd state)
};

/// Decides consistency: no word may be strongly accepted by a state and
/// strongly rejected by another state with the same layer-1 ancestor. One
/// generalized Buchi game covers all candidate pairs; Prover plays letters
/// against two tracked components and wins iff both reset infinitely often.
inline ConsistencyResult check_consistent(const LayeredAutomaton& a) {
  require_valid(a, "check_consistent");
  detail::Component even_side(a, true), odd_side(a, false);
  if (even_side.configs.empty() || odd_side.configs.empty()) return {true, std::nullopt};

  detail::ArenaBuilder ab;
  ab.g.condition = WinCondition::GeneralizedBuchi;
  ab.g.buchi_sets = 2;
  for (int ca : even_side.configs)
    for (int cb : odd_side.configs) ab.play_vertex(0, ca, cb);

  for (int ca : even_side.configs)
    for (int cb : odd_side.configs) {
      int from = ab.play_vertex(0, ca, cb);
      bool any_letter = false;
      for (int s = 0; s < a.alphabet().size(); ++s) {
        auto adv_a = even_side.advance(ca, s);
        auto adv_b = odd_side.advance(cb, s);
        if (adv_a.dead || adv_b.dead) continue;
        any_letter = true;
        uint32_t colors = (adv_a.reset ? 1u : 0) | (adv_b.reset ? 2u : 0);
        if (!adv_a.reset && !adv_b.reset) {
          ab.g.add_edge(from, ab.play_vertex(0, adv_a.next, adv_b.next), 1, colors);
        } else {
          int mask = (adv_a.reset ? 1 : 0) | (adv_b.reset ? 2 : 0);
          int l = adv_a.reset ? adv_a.reset_main : adv_a.next;
          int r = adv_b.reset ? adv_b.reset_main : adv_b.next;
          int mid = ab.choice_vertex(mask, l, r);
          ab.g.add_edge(from, mid, 1, colors);
        }
      }
      if (!any_letter) ab.g.add_edge(from, ab.refuter_sink());
    }
  for (const auto& [key, v] : ab.choice) {
    auto [mask, l, r] = key;
    auto ls = (mask & 1) ? even_side.start_configs(l) : std::vector<int>{l};
    auto rs = (mask & 2) ? odd_side.start_configs(r) : std::vector<int>{r};
    for (int ca : ls)
      for (int cb : rs) ab.g.add_edge(v, ab.play_vertex(0, ca, cb));
  }

  auto regions = solve_generalized_buchi(ab.g);
  auto pair_winning = [&](int p, int p2) {
    for (int ca : even_side.start_configs(p))
      for (int cb : odd_side.start_configs(p2))
        if (regions[static_cast<size_t>(ab.play_vertex(0, ca, cb))] != Player::Prover) return false;
    return true;
  };

  for (int p = 0; p < a.state_count(); ++p) {
    if (a.layer_of(p) % 2 != 0) continue;
    for (int p2 = 0; p2 < a.state_count(); ++p2) {
      if (a.layer_of(p2) % 2 != 1) continue;
      if (a.ancestor(p, 1) != a.ancestor(p2, 1)) continue;
      if (pair_winning(p, p2)) return {false, std::make_pair(a.name(p), a.name(p2))};
    }
  }
  return {true, std::nullopt};
}

inline void require_consistent(const LayeredAutomaton& a, const char* who, bool assume) {
  if (assume) return;
  auto r = check_consistent(a);
  if (!r.consistent)
    throw PreconditionError(std::string(who) + ": automaton is inconsistent, witness ('" +
                            r.witness->first + "', '" + r.witness->second + "')");
}

// ---------------------------------------------------------------------------
// Emptiness
// ---------------------------------------------------------------------------

/// The language is non-empty iff some even-layer state wins the Buchi game
/// where Prover plays safe letters and Refuter restarts the child tracker
/// whenever it dies, with restarts as the Buchi events.
inline bool is_empty(const LayeredAutomaton& a, bool assume_consistent = false) {
  require_valid(a, "is_empty");
  require_consistent(a, "is_empty", assume_consistent);
  detail::Component comp(a, true);
  if (comp.configs.empty()) return true;

  detail::ArenaBuilder ab;
  ab.g.condition = WinCondition::Buchi;
  ab.g.buchi_sets = 1;
  for (int c : comp.configs) ab.play_vertex(0, c, 0);
  for (int c : comp.configs) {
    int from = ab.play_vertex(0, c, 0);
    bool any_letter = false;
    for (int s = 0; s < a.alphabet().size(); ++s) {
      auto adv = comp.advance(c, s);
      if (adv.dead) continue;
      any_letter = true;
      if (!adv.reset)
        ab.g.add_edge(from, ab.play_vertex(0, adv.next, 0));
      else
        ab.g.add_edge(from, ab.choice_vertex(1, adv.reset_main, 0), 1, 1u);
    }
    if (!any_letter) ab.g.add_edge(from, ab.refuter_sink());
  }
  for (const auto& [key, v] : ab.choice) {
    auto [mask, l, r] = key;
    (void)mask;
    (void)r;
    for (int c : comp.start_configs(l)) ab.g.add_edge(v, ab.play_vertex(0, c, 0));
  }

  auto regions = solve_buchi(ab.g);
  for (int p = 0; p < a.state_count(); ++p) {
    if (a.layer_of(p) % 2 != 0) continue;
    bool wins = true;
    for (int c : comp.start_configs(p))
      if (regions[static_cast<size_t>(ab.play_vertex(0, c, 0))] != Player::Prover) wins = false;
    if (wins) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Inclusion
// ---------------------------------------------------------------------------

namespace detail {

// Phase kinds for the two-phase inclusion game.
enum : int { kPhase11 = 0, kPhase21 = 1, kPhase12 = 2, kPhase22 = 3 };

// Builds the inclusion game for "L(a) not included in L(b)" and returns the
// winner of every phase-1 start (qa, qb). Prover advances two layer-1 runs,
// may at any point commit to an even-layer state of `a` over the current
// left state and an odd-layer state of `b` over the current right state, and
// then must reset both trackers infinitely often.
inline std::vector<std::vector<bool>> inclusion_prover_wins(const LayeredAutomaton& a,
                                                            const LayeredAutomaton& b) {
  Component comp_a(a, true), comp_b(b, false);

  // entry configurations per layer-1 state
  std::vector<std::vector<int>> entries_a(static_cast<size_t>(a.state_count()));
  for (int p = 0; p < a.state_count(); ++p)
    if (a.layer_of(p) % 2 == 0)
      for (int c : comp_a.start_configs(p))
        entries_a[static_cast<size_t>(a.ancestor(p, 1))].push_back(c);
  std::vector<std::vector<int>> entries_b(static_cast<size_t>(b.state_count()));
  for (int p = 0; p < b.state_count(); ++p)
    if (b.layer_of(p) % 2 == 1)
      for (int c : comp_b.start_configs(p))
        entries_b[static_cast<size_t>(b.ancestor(p, 1))].push_back(c);

  ArenaBuilder ab;
  ab.g.condition = WinCondition::GeneralizedBuchi;
  ab.g.buchi_sets = 2;

  std::vector<int> layer1_a, layer1_b;
  for (int q = a.layer_first(1); q < a.layer_end(1); ++q) layer1_a.push_back(q);
  for (int q = b.layer_first(1); q < b.layer_end(1); ++q) layer1_b.push_back(q);

  auto left_parts = [&](int kind) -> const std::vector<int>& {
    return (kind == kPhase11 || kind == kPhase12) ? layer1_a : comp_a.configs;
  };
  auto right_parts = [&](int kind) -> const std::vector<int>& {
    return (kind == kPhase11 || kind == kPhase21) ? layer1_b : comp_b.configs;
  };

  for (int kind : {kPhase11, kPhase21, kPhase12, kPhase22})
    for (int l : left_parts(kind))
      for (int r : right_parts(kind)) ab.play_vertex(kind, l, r);

  for (int kind : {kPhase11, kPhase21, kPhase12, kPhase22}) {
    bool left_committed = kind == kPhase21 || kind == kPhase22;
    bool right_committed = kind == kPhase12 || kind == kPhase22;
    for (int l : left_parts(kind))
      for (int r : right_parts(kind)) {
        int from = ab.play_vertex(kind, l, r);

        if (!left_committed)
          for (int c : entries_a[static_cast<size_t>(l)])
            ab.g.add_edge(from, ab.play_vertex(right_committed ? kPhase22 : kPhase21, c, r));
        if (!right_committed)
          for (int c : entries_b[static_cast<size_t>(r)])
            ab.g.add_edge(from, ab.play_vertex(left_committed ? kPhase22 : kPhase12, l, c));

        bool any_letter = false;
        for (int s = 0; s < a.alphabet().size(); ++s) {
          auto adv_a = left_committed ? comp_a.advance(l, s)
                                      : Component::Adv{false, false, a.step(l, s), -1};
          auto adv_b = right_committed ? comp_b.advance(r, s)
                                       : Component::Adv{false, false, b.step(r, s), -1};
          if (adv_a.dead || adv_b.dead) continue;
          any_letter = true;
          uint32_t colors = (adv_a.reset ? 1u : 0) | (adv_b.reset ? 2u : 0);
          if (!adv_a.reset && !adv_b.reset) {
            ab.g.add_edge(from, ab.play_vertex(kind, adv_a.next, adv_b.next), 1, colors);
          } else {
            int mask = (adv_a.reset ? 1 : 0) | (adv_b.reset ? 2 : 0) | (kind << 2);
            int lv = adv_a.reset ? adv_a.reset_main : adv_a.next;
            int rv = adv_b.reset ? adv_b.reset_main : adv_b.next;
            ab.g.add_edge(from, ab.choice_vertex(mask, lv, rv), 1, colors);
          }
        }
        if (!any_letter) ab.g.add_edge(from, ab.refuter_sink());
      }
  }

  for (const auto& [key, v] : ab.choice) {
    auto [mask, lv, rv] = key;
    int kind2 = mask >> 2;
    auto ls = (mask & 1) ? comp_a.start_configs(lv) : std::vector<int>{lv};
    auto rs = (mask & 2) ? comp_b.start_configs(rv) : std::vector<int>{rv};
    for (int ca : ls)
      for (int cb : rs) ab.g.add_edge(v, ab.play_vertex(kind2, ca, cb));
  }

  auto regions = solve_generalized_buchi(ab.g);
  std::vector<std::vector<bool>> wins(static_cast<size_t>(a.state_count()),
                                      std::vector<bool>(static_cast<size_t>(b.state_count()), false));
  for (int qa = a.layer_first(1); qa < a.layer_end(1); ++qa)
    for (int qb = b.layer_first(1); qb < b.layer_end(1); ++qb)
      wins[static_cast<size_t>(qa)][static_cast<size_t>(qb)] =
          regions[static_cast<size_t>(ab.play_vertex(kPhase11, qa, qb))] == Player::Prover;
  return wins;
}

}  // namespace detail

/// Language inclusion of consistent layered automata via the two-phase game.
inline bool is_included(const LayeredAutomaton& a, const LayeredAutomaton& b,
                        bool assume_consistent = false) {
  require_valid(a, "is_included");
  require_valid(b, "is_included");
  if (!(a.alphabet() == b.alphabet()))
    throw PreconditionError("is_included: the automata use different alphabets");
  require_consistent(a, "is_included", assume_consistent);
  require_consistent(b, "is_included", assume_consistent);
  auto wins = detail::inclusion_prover_wins(a, b);
  return !wins[static_cast<size_t>(a.initial())][static_cast<size_t>(b.initial())];
}

inline bool is_equivalent(const LayeredAutomaton& a, const LayeredAutomaton& b,
                          bool assume_consistent = false) {
  return is_included(a, b, assume_consistent) && is_included(b, a, assume_consistent);
}

/// Pairwise language equality of all layer-1 states, read off one inclusion
/// game of the automaton against itself.
inline std::vector<std::vector<bool>> layer1_language_equal_table(const LayeredAutomaton& a,
                                                                  bool assume_consistent = false) {
  require_valid(a, "layer1_language_equal_table");
  require_consistent(a, "layer1_language_equal_table", assume_consistent);
  auto wins = detail::inclusion_prover_wins(a, a);
  std::vector<std::vector<bool>> eq(static_cast<size_t>(a.state_count()),
                                    std::vector<bool>(static_cast<size_t>(a.state_count()), false));
  for (int p = a.layer_first(1); p < a.layer_end(1); ++p)
    for (int q = a.layer_first(1); q < a.layer_end(1); ++q)
      eq[static_cast<size_t>(p)][static_cast<size_t>(q)] =
          !wins[static_cast<size_t>(p)][static_cast<size_t>(q)] &&
          !wins[static_cast<size_t>(q)][static_cast<size_t>(p)];
  return eq;
}

/// Language equality of two layer-1 states (the languages of the automaton
/// re-rooted at them).
inline bool state_lang_equal(const LayeredAutomaton& a, const std::string& q1,
                             const std::string& q2, bool assume_consistent = false) {
  int p1 = a.state_or_throw(q1);
  int p2 = a.state_or_throw(q2);
  if (a.layer_of(p1) != 1 || a.layer_of(p2) != 1)
    throw std::invalid_argument("state_lang_equal: both states must live on layer 1");
  auto eq = layer1_language_equal_table(a, assume_consistent);
  return eq[static_cast<size_t>(p1)][static_cast<size_t>(p2)];
}

}  // namespace layered
