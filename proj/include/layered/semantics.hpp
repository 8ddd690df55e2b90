#pragma once

#include "layered/automaton.hpp"
#include "layered/game.hpp"

namespace layered {

enum class StrongStatus { StronglyAccepted, StronglyRejected, Neither };
enum class CompareMode { Equal, Included };

namespace detail {

// True iff the layer-`x` run of `a` from `s` on the suffix of w starting at
// absolute position `pos` never dies. Runs on up-words are eventually
// periodic, so simulation stops once a (state, phase) pair repeats.
inline bool safe_suffix(const LayeredAutomaton& a, int x, int s, const IndexedUpWord& w,
                        size_t pos) {
  (void)x;
  const size_t ulen = w.prefix.size();
  const size_t plen = w.period.size();
  std::vector<bool> seen(static_cast<size_t>(a.state_count()) * plen, false);
  int cur = s;
  size_t i = pos;
  while (true) {
    if (i >= ulen) {
      size_t key = static_cast<size_t>(cur) * plen + static_cast<size_t>((i - ulen) % plen);
      if (seen[key]) return true;
      seen[key] = true;
    }
    cur = a.step(cur, up_letter(w, i));
    if (cur == -1) return false;
    ++i;
  }
}

// Product exploration of two partial deterministic safety structures.
// Included: every word alive on the left stays alive on the right.
inline bool safety_compare(const LayeredAutomaton& a, int sa, const LayeredAutomaton& b, int sb,
                           CompareMode mode) {
  if (!(a.alphabet() == b.alphabet())) return false;
  std::set<std::pair<int, int>> seen;
  std::vector<std::pair<int, int>> stack{{sa, sb}};
  seen.insert({sa, sb});
  while (!stack.empty()) {
    auto [p, q] = stack.back();
    stack.pop_back();
    for (int s = 0; s < a.alphabet().size(); ++s) {
      int pn = a.step(p, s);
      int qn = b.step(q, s);
      if (pn == -1 && qn == -1) continue;
      if (pn == -1) {
        if (mode == CompareMode::Equal) return false;
        continue;
      }
      if (qn == -1) return false;
      if (seen.insert({pn, qn}).second) stack.push_back({pn, qn});
    }
  }
  return true;
}

}  // namespace detail

/// End state of the layer-`x` run on `word` from the layer-x ancestor of `q`,
/// or nothing when the run dies.
inline std::optional<int> run_safe(const LayeredAutomaton& a, int x, int q,
                                   const std::vector<int>& word) {
  int cur = ancestor_at(a, q, x);
  for (int sym : word) {
    cur = a.step(cur, sym);
    if (cur == -1) return std::nullopt;
  }
  return cur;
}

inline std::optional<std::string> run_safe(const LayeredAutomaton& a, int x,
                                           const std::string& state, const std::string& word) {
  auto r = run_safe(a, x, a.state_or_throw(state), a.alphabet().parse_word(word));
  if (!r) return std::nullopt;
  return a.name(*r);
}

/// Membership of an ultimately periodic word in the layer-x safe language of q.
inline bool safe_member_up(const LayeredAutomaton& a, int x, int q, const UpWord& w) {
  auto iw = detail::index_up_word(a.alphabet(), w);
  return detail::safe_suffix(a, x, ancestor_at(a, q, x), iw, 0);
}

inline bool safe_member_up(const LayeredAutomaton& a, int x, const std::string& state,
                           const UpWord& w) {
  return safe_member_up(a, x, a.state_or_throw(state), w);
}

/// Compares the layer-x safe languages of two states of the same automaton.
inline bool safe_compare(const LayeredAutomaton& a, int x, int p, int q, CompareMode mode) {
  return detail::safety_compare(a, ancestor_at(a, p, x), a, ancestor_at(a, q, x), mode);
}

inline bool safe_compare(const LayeredAutomaton& a, int x, const std::string& p,
                         const std::string& q, CompareMode mode) {
  return safe_compare(a, x, a.state_or_throw(p), a.state_or_throw(q), mode);
}

// ---------------------------------------------------------------------------
// Strong acceptance and the layered acceptance condition
// ---------------------------------------------------------------------------

/// A word is strongly accepted by p (on an even layer x) if it is x-safe from
/// p and no decomposition reaches a layer-(x+1) state whose suffix is safe.
/// Symmetrically rejected for odd layers. Decompositions are enumerated over
/// distinct (run state, period phase) positions, which is exhaustive because
/// runs on up-words are eventually periodic.
inline StrongStatus strong_status_up(const LayeredAutomaton& a, int p, const UpWord& w) {
  auto iw = detail::index_up_word(a.alphabet(), w);
  const int x = a.layer_of(p);
  if (!detail::safe_suffix(a, x, p, iw, 0)) return StrongStatus::Neither;

  const size_t ulen = iw.prefix.size();
  const size_t plen = iw.period.size();
  std::vector<bool> seen(static_cast<size_t>(a.state_count()) * plen, false);
  int cur = p;
  size_t i = 0;
  while (true) {
    if (i >= ulen) {
      size_t key = static_cast<size_t>(cur) * plen + static_cast<size_t>((i - ulen) % plen);
      if (seen[key]) break;
      seen[key] = true;
    }
    for (int c : a.children(cur))
      if (detail::safe_suffix(a, x + 1, c, iw, i)) return StrongStatus::Neither;
    cur = a.step(cur, detail::up_letter(iw, i));
    ++i;
  }
  return x % 2 == 0 ? StrongStatus::StronglyAccepted : StrongStatus::StronglyRejected;
}

inline StrongStatus strong_status_up(const LayeredAutomaton& a, const std::string& p,
                                     const UpWord& w) {
  return strong_status_up(a, a.state_or_throw(p), w);
}

struct LayeredVerdict {
  bool accepted = false;
  int max_safe_layer = 1;
};

/// Maximal layer in which the word is ultimately safe; the verdict is the
/// parity of that layer. Layer 1 always qualifies because T_1 is complete.
inline LayeredVerdict layered_accept_up(const LayeredAutomaton& a, const UpWord& w) {
  auto iw = detail::index_up_word(a.alphabet(), w);
  const size_t ulen = iw.prefix.size();
  const size_t plen = iw.period.size();

  int max_layer = 1;
  std::vector<bool> seen(static_cast<size_t>(a.state_count()) * plen, false);
  int root = a.initial();
  size_t i = 0;
  while (true) {
    if (i >= ulen) {
      size_t key = static_cast<size_t>(root) * plen + static_cast<size_t>((i - ulen) % plen);
      if (seen[key]) break;
      seen[key] = true;
    }
    for (int x = a.depth(); x > max_layer; --x)
      for (int p = a.layer_first(x); p < a.layer_end(x); ++p) {
        if (a.ancestor(p, 1) != root) continue;
        if (detail::safe_suffix(a, x, p, iw, i)) {
          max_layer = x;
          break;
        }
      }
    root = a.step(root, detail::up_letter(iw, i));
    ++i;
  }
  return {max_layer % 2 == 0, max_layer};
}

// ---------------------------------------------------------------------------
// The semantics automaton
// ---------------------------------------------------------------------------

/// sem(A): states are the leaf states, and reading `a` from a leaf q moves,
/// with priority x = llayer(q, a), to any leaf below the layer-x successor of
/// q's layer-x ancestor. Eve resolves odd priorities, Adam even ones. The
/// initial leaf defaults to the least leaf above the layer-1 initial state;
/// for consistent automata the choice does not matter.
inline AlternatingAutomaton build_sem(const LayeredAutomaton& a,
                                      std::optional<std::string> initial_leaf = std::nullopt) {
  auto leaves = leaf_states(a);
  std::vector<bool> is_leaf(static_cast<size_t>(a.state_count()), false);
  for (int q : leaves) is_leaf[static_cast<size_t>(q)] = true;

  int init = -1;
  if (initial_leaf) {
    int q = a.state_or_throw(*initial_leaf);
    if (!is_leaf[static_cast<size_t>(q)] || a.ancestor(q, 1) != a.initial())
      throw std::invalid_argument("state '" + *initial_leaf +
                                  "' is not a leaf above the initial layer-1 state");
    init = q;
  } else {
    for (int q : leaves)
      if (a.ancestor(q, 1) == a.initial()) {
        init = q;
        break;
      }
    if (init == -1) throw std::invalid_argument("no leaf above the initial state");
  }

  std::vector<std::string> names;
  for (int q : leaves) names.push_back(a.name(q));
  std::vector<AltTransition> ts;
  for (int q : leaves)
    for (int s = 0; s < a.alphabet().size(); ++s) {
      int x = action_layer(a, q, s);
      int target = a.step(a.ancestor(q, x), s);
      for (int q2 : leaves)
        if (a.layer_of(q2) >= x && a.ancestor(q2, x) == target)
          ts.push_back({a.name(q), a.alphabet().symbol(s), x, a.name(q2)});
    }
  return AlternatingAutomaton(a.alphabet(), std::move(names), std::move(ts), a.name(init));
}

/// Exact membership for an alternating automaton: the acceptance game over
/// (state, word position) pairs, solved as a parity game. A state with no
/// transition on the pending letter loses for Eve.
inline bool alt_member_up(const AlternatingAutomaton& b, const UpWord& w,
                          std::optional<std::string> from = std::nullopt) {
  auto iw = detail::index_up_word(b.alphabet(), w);
  const int L = static_cast<int>(iw.prefix.size() + iw.period.size());
  const int n = b.state_count();

  GameArena g;
  g.condition = WinCondition::Parity;
  auto vid = [&](int q, int pos) { return q * L + pos; };
  for (int q = 0; q < n; ++q)
    for (int pos = 0; pos < L; ++pos) {
      int letter = detail::up_letter(iw, static_cast<size_t>(pos));
      const auto& act = b.action(q, letter);
      if (act.successors.empty())
        g.add_sink(Player::Refuter);
      else
        g.add_vertex(act.priority % 2 == 1 ? Player::Prover : Player::Refuter);
    }
  for (int q = 0; q < n; ++q)
    for (int pos = 0; pos < L; ++pos) {
      int letter = detail::up_letter(iw, static_cast<size_t>(pos));
      const auto& act = b.action(q, letter);
      int next = pos + 1 < L ? pos + 1 : static_cast<int>(iw.prefix.size());
      for (int to : act.successors) g.add_edge(vid(q, pos), vid(to, next), act.priority);
    }

  auto regions = solve_parity(g);
  int start = from ? b.state_or_throw(*from) : b.initial();
  return regions[static_cast<size_t>(vid(start, 0))] == Player::Prover;
}

}  // namespace layered
