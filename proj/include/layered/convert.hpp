#pragma once

#include "layered/semantics.hpp"

namespace layered {

namespace detail {

inline std::string layer_tag(const std::string& name, int layer) {
  return name + "@" + std::to_string(layer);
}

}  // namespace detail

/// Layer x of the result is the input restricted to transitions of priority
/// at least x, with states tagged by layer; the parent maps connect the
/// copies of each state. sem of the result is the input automaton again.
/// States unreachable in the input are trimmed so that T_1 is reachable.
inline LayeredAutomaton dpa_to_layered(const DeterministicParityAutomaton& d) {
  require_valid(d, "dpa_to_layered");

  std::vector<bool> reach(static_cast<size_t>(d.state_count()), false);
  std::vector<int> stack{d.initial()};
  reach[static_cast<size_t>(d.initial())] = true;
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (int s = 0; s < d.alphabet().size(); ++s) {
      int to = d.step(q, s).first;
      if (!reach[static_cast<size_t>(to)]) {
        reach[static_cast<size_t>(to)] = true;
        stack.push_back(to);
      }
    }
  }

  std::vector<TransitionSystem> layers;
  std::vector<std::map<std::string, std::string>> parents;
  for (int x = 1; x <= d.max_priority(); ++x) {
    TransitionSystem ts;
    std::map<std::string, std::string> pm;
    for (int q = 0; q < d.state_count(); ++q) {
      if (!reach[static_cast<size_t>(q)]) continue;
      ts.states.push_back(detail::layer_tag(d.name(q), x));
      if (x >= 2) pm[detail::layer_tag(d.name(q), x)] = detail::layer_tag(d.name(q), x - 1);
      for (int s = 0; s < d.alphabet().size(); ++s) {
        auto [to, pri] = d.step(q, s);
        if (pri >= x)
          ts.transitions.push_back({detail::layer_tag(d.name(q), x), d.alphabet().symbol(s),
                                    detail::layer_tag(d.name(to), x)});
      }
    }
    layers.push_back(std::move(ts));
    if (x >= 2) parents.push_back(std::move(pm));
  }
  return LayeredAutomaton(d.alphabet(), std::move(layers), std::move(parents),
                          detail::layer_tag(d.name(d.initial()), 1));
}

/// Structural equality of alternating automata: same alphabet, state set,
/// initial state, and transition set.
inline bool alt_structural_equal(const AlternatingAutomaton& a, const AlternatingAutomaton& b) {
  if (!(a.alphabet() == b.alphabet())) return false;
  if (a.state_count() != b.state_count()) return false;
  for (int q = 0; q < a.state_count(); ++q)
    if (a.name(q) != b.name(q)) return false;
  if (a.name(a.initial()) != b.name(b.initial())) return false;
  return a.raw_transitions() == b.raw_transitions();
}

/// Equivalence relations on the states of sem(A) given by sharing the layer-x
/// ancestor. Feeding these back into layered_from_relations reconstructs A.
inline NestedRelations relations_from_ancestors(const LayeredAutomaton& a) {
  auto leaves = leaf_states(a);
  NestedRelations rels;
  for (int x = 1; x <= a.depth(); ++x) {
    std::vector<std::vector<std::string>> classes;
    for (int t = a.layer_first(x); t < a.layer_end(x); ++t) {
      std::vector<std::string> members;
      for (int q : leaves)
        if (a.layer_of(q) >= x && a.ancestor(q, x) == t) members.push_back(a.name(q));
      if (!members.empty()) classes.push_back(std::move(members));
    }
    rels.levels.push_back(std::move(classes));
  }
  return rels;
}

/// Builds a layered automaton whose layer-x states are the classes of the
/// x-th relation, provided the relations are nested and satisfy
/// x-determinism, x-coherence and x-saturation. The construction is then
/// checked to reproduce the input as its semantics.
inline LayeredAutomaton layered_from_relations(const AlternatingAutomaton& b,
                                               const NestedRelations& rels) {
  {
    auto diags = validate_alternating(b);
    if (!diags.empty())
      throw PreconditionError("layered_from_relations: input must be simple by priorities and "
                              "complete: " +
                              diags.front().message);
  }
  const int d = static_cast<int>(rels.levels.size());
  if (d < 1) throw PreconditionError("layered_from_relations: need at least one relation");

  // class_of[x-1][state] = class index at level x, or -1 outside the domain
  std::vector<std::vector<int>> class_of(static_cast<size_t>(d),
                                         std::vector<int>(static_cast<size_t>(b.state_count()), -1));
  for (int x = 1; x <= d; ++x) {
    const auto& level = rels.levels[static_cast<size_t>(x - 1)];
    for (size_t c = 0; c < level.size(); ++c)
      for (const auto& name : level[c]) {
        int q = b.state_or_throw(name);
        auto& slot = class_of[static_cast<size_t>(x - 1)][static_cast<size_t>(q)];
        if (slot != -1)
          throw PreconditionError("layered_from_relations: state '" + name +
                                  "' occurs twice on level " + std::to_string(x));
        slot = static_cast<int>(c);
      }
  }
  for (int q = 0; q < b.state_count(); ++q)
    if (class_of[0][static_cast<size_t>(q)] == -1)
      throw PreconditionError("layered_from_relations: level 1 must cover state '" + b.name(q) +
                              "'");
  for (int x = 2; x <= d; ++x)
    for (int p = 0; p < b.state_count(); ++p)
      for (int q = 0; q < b.state_count(); ++q) {
        int cp = class_of[static_cast<size_t>(x - 1)][static_cast<size_t>(p)];
        int cq = class_of[static_cast<size_t>(x - 1)][static_cast<size_t>(q)];
        if (cp == -1 || cq == -1 || cp != cq) continue;
        int dp = class_of[static_cast<size_t>(x - 2)][static_cast<size_t>(p)];
        int dq = class_of[static_cast<size_t>(x - 2)][static_cast<size_t>(q)];
        if (dp == -1 || dq == -1 || dp != dq)
          throw PreconditionError("layered_from_relations: nesting violated at level " +
                                  std::to_string(x) + " by ('" + b.name(p) + "', '" + b.name(q) +
                                  "')");
      }

  // property checks, level by level
  for (int x = 1; x <= d; ++x) {
    const auto& cls = class_of[static_cast<size_t>(x - 1)];
    for (int p = 0; p < b.state_count(); ++p)
      for (int s = 0; s < b.alphabet().size(); ++s) {
        const auto& act = b.action(p, s);
        if (act.priority == x) {
          int witness = -1;
          for (int q : act.successors) {
            if (cls[static_cast<size_t>(q)] == -1 ||
                (witness != -1 && cls[static_cast<size_t>(q)] != cls[static_cast<size_t>(witness)]))
              throw PreconditionError("layered_from_relations: " + std::to_string(x) +
                                      "-determinism violated at ('" + b.name(p) + "', '" +
                                      b.alphabet().symbol(s) + "', '" + b.name(q) + "')");
            witness = q;
          }
          // saturation: the successor set must be the whole class
          std::set<int> succ(act.successors.begin(), act.successors.end());
          for (int q2 = 0; q2 < b.state_count(); ++q2)
            if (cls[static_cast<size_t>(q2)] == cls[static_cast<size_t>(witness)] && !succ.count(q2))
              throw PreconditionError("layered_from_relations: " + std::to_string(x) +
                                      "-saturation violated at ('" + b.name(p) + "', '" +
                                      b.alphabet().symbol(s) + "', '" + b.name(q2) + "')");
        }
      }
    // coherence over each class and letter
    std::map<int, std::vector<int>> members;
    for (int q = 0; q < b.state_count(); ++q)
      if (cls[static_cast<size_t>(q)] != -1) members[cls[static_cast<size_t>(q)]].push_back(q);
    for (const auto& [c, qs] : members) {
      (void)c;
      for (int s = 0; s < b.alphabet().size(); ++s) {
        int succ_class = -2;  // -2 unset, -1 "no >= x transition"
        for (int p : qs) {
          const auto& act = b.action(p, s);
          int here;
          if (act.priority >= x) {
            int q0 = act.successors.front();
            here = cls[static_cast<size_t>(q0)];
            if (here == -1)
              throw PreconditionError("layered_from_relations: " + std::to_string(x) +
                                      "-coherence violated at ('" + b.name(p) + "', '" +
                                      b.alphabet().symbol(s) + "'): successor '" + b.name(q0) +
                                      "' is outside the level-" + std::to_string(x) + " domain");
          } else {
            here = -1;
          }
          if (succ_class == -2) succ_class = here;
          if (succ_class != here)
            throw PreconditionError("layered_from_relations: " + std::to_string(x) +
                                    "-coherence violated at ('" + b.name(p) + "', '" +
                                    b.alphabet().symbol(s) + "'): class members disagree");
        }
      }
    }
  }

  // build: one state per class; leaf classes keep the least member's name
  std::vector<std::vector<std::string>> class_name(static_cast<size_t>(d));
  for (int x = 1; x <= d; ++x) {
    const auto& level = rels.levels[static_cast<size_t>(x - 1)];
    for (size_t c = 0; c < level.size(); ++c) {
      auto least = *std::min_element(level[c].begin(), level[c].end());
      bool is_leaf = true;
      if (x < d)
        for (const auto& name : level[c])
          if (class_of[static_cast<size_t>(x)][static_cast<size_t>(b.state_or_throw(name))] != -1)
            is_leaf = false;
      class_name[static_cast<size_t>(x - 1)].push_back(is_leaf ? least
                                                               : detail::layer_tag(least, x));
    }
  }

  std::vector<TransitionSystem> layers(static_cast<size_t>(d));
  std::vector<std::map<std::string, std::string>> parents(static_cast<size_t>(d - 1));
  for (int x = 1; x <= d; ++x) {
    auto& ts = layers[static_cast<size_t>(x - 1)];
    const auto& level = rels.levels[static_cast<size_t>(x - 1)];
    const auto& cls = class_of[static_cast<size_t>(x - 1)];
    for (size_t c = 0; c < level.size(); ++c) {
      ts.states.push_back(class_name[static_cast<size_t>(x - 1)][c]);
      int rep = b.state_or_throw(level[c].front());
      if (x >= 2) {
        int up = class_of[static_cast<size_t>(x - 2)][static_cast<size_t>(rep)];
        parents[static_cast<size_t>(x - 2)][class_name[static_cast<size_t>(x - 1)][c]] =
            class_name[static_cast<size_t>(x - 2)][static_cast<size_t>(up)];
      }
      for (int s = 0; s < b.alphabet().size(); ++s) {
        const auto& act = b.action(rep, s);
        if (act.priority < x) continue;
        int to = cls[static_cast<size_t>(act.successors.front())];
        ts.transitions.push_back({class_name[static_cast<size_t>(x - 1)][c],
                                  b.alphabet().symbol(s),
                                  class_name[static_cast<size_t>(x - 1)][static_cast<size_t>(to)]});
      }
    }
  }
  int init_class = class_of[0][static_cast<size_t>(b.initial())];
  LayeredAutomaton built(b.alphabet(), layers, parents,
                         class_name[0][static_cast<size_t>(init_class)]);

  // the construction must reproduce the input as its semantics
  auto sem = build_sem(built);
  {
    std::vector<std::string> sem_names;
    for (int q = 0; q < sem.state_count(); ++q) sem_names.push_back(sem.name(q));
    std::vector<std::string> b_names;
    for (int q = 0; q < b.state_count(); ++q) b_names.push_back(b.name(q));
    if (sem_names != b_names || sem.raw_transitions() != b.raw_transitions())
      throw PreconditionError(
          "layered_from_relations: the relations do not reconstruct the automaton (its semantics "
          "differs from the input)");
  }
  return built;
}

/// Re-roots a layered automaton at another layer-1 state, trimming the part
/// of T_1 that becomes unreachable together with the subtrees above it.
inline LayeredAutomaton reroot(const LayeredAutomaton& a, int new_initial) {
  if (a.layer_of(new_initial) != 1)
    throw std::invalid_argument("reroot: '" + a.name(new_initial) + "' is not a layer-1 state");
  std::vector<bool> keep(static_cast<size_t>(a.state_count()), false);
  std::vector<int> stack{new_initial};
  keep[static_cast<size_t>(new_initial)] = true;
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (auto [sym, to] : a.transitions_of(q)) {
      (void)sym;
      if (!keep[static_cast<size_t>(to)]) {
        keep[static_cast<size_t>(to)] = true;
        stack.push_back(to);
      }
    }
  }
  for (int q = 0; q < a.state_count(); ++q)
    if (a.layer_of(q) > 1) keep[static_cast<size_t>(q)] = keep[static_cast<size_t>(a.ancestor(q, 1))];

  std::vector<TransitionSystem> layers(static_cast<size_t>(a.depth()));
  std::vector<std::map<std::string, std::string>> parents(static_cast<size_t>(a.depth() - 1));
  for (int q = 0; q < a.state_count(); ++q) {
    if (!keep[static_cast<size_t>(q)]) continue;
    int x = a.layer_of(q);
    layers[static_cast<size_t>(x - 1)].states.push_back(a.name(q));
    if (x >= 2) parents[static_cast<size_t>(x - 2)][a.name(q)] = a.name(a.parent(q));
    for (auto [sym, to] : a.transitions_of(q))
      if (keep[static_cast<size_t>(to)])
        layers[static_cast<size_t>(x - 1)].transitions.push_back(
            {a.name(q), a.alphabet().symbol(sym), a.name(to)});
  }
  // drop empty top layers that may appear when whole subtrees vanish
  while (layers.size() > 1 && layers.back().states.empty()) {
    layers.pop_back();
    parents.pop_back();
  }
  return LayeredAutomaton(a.alphabet(), std::move(layers), std::move(parents),
                          a.name(new_initial));
}

inline LayeredAutomaton reroot(const LayeredAutomaton& a, const std::string& state) {
  return reroot(a, a.state_or_throw(state));
}

// ---------------------------------------------------------------------------
// coBuchi automata as layered automata
// ---------------------------------------------------------------------------

/// Turns a semantically deterministic, safe deterministic, 1-saturated
/// coBuchi automaton into a two-layer automaton: T_1 is the automaton of
/// residual classes, T_2 the priority-2 part. When `residual_classes` is not
/// supplied, the classes are inferred from the priority-1 successor sets
/// (1-saturation makes those sets full language classes).
inline LayeredAutomaton cobuchi_to_layered(
    const AlternatingAutomaton& b,
    std::optional<std::vector<std::vector<std::string>>> residual_classes = std::nullopt) {
  {
    auto diags = validate_alternating(b);
    if (!diags.empty())
      throw PreconditionError("cobuchi_to_layered: " + diags.front().message);
  }
  for (int q = 0; q < b.state_count(); ++q)
    for (int s = 0; s < b.alphabet().size(); ++s) {
      const auto& act = b.action(q, s);
      if (act.priority != 1 && act.priority != 2)
        throw PreconditionError("cobuchi_to_layered: priority " + std::to_string(act.priority) +
                                " at ('" + b.name(q) + "', '" + b.alphabet().symbol(s) +
                                "') is not a coBuchi priority");
      if (act.priority == 2 && act.successors.size() > 1)
        throw PreconditionError("cobuchi_to_layered: safe-determinism violated at ('" + b.name(q) +
                                "', '" + b.alphabet().symbol(s) + "')");
    }

  // residual classes: supplied, or inferred by merging 1-successor sets
  std::vector<int> cls(static_cast<size_t>(b.state_count()));
  if (residual_classes) {
    std::fill(cls.begin(), cls.end(), -1);
    for (size_t c = 0; c < residual_classes->size(); ++c)
      for (const auto& name : (*residual_classes)[c]) {
        int q = b.state_or_throw(name);
        if (cls[static_cast<size_t>(q)] != -1)
          throw PreconditionError("cobuchi_to_layered: state '" + name + "' listed twice");
        cls[static_cast<size_t>(q)] = static_cast<int>(c);
      }
    for (int q = 0; q < b.state_count(); ++q)
      if (cls[static_cast<size_t>(q)] == -1)
        throw PreconditionError("cobuchi_to_layered: residual classes do not cover '" + b.name(q) +
                                "'");
  } else {
    std::vector<int> uf(static_cast<size_t>(b.state_count()));
    for (size_t i = 0; i < uf.size(); ++i) uf[i] = static_cast<int>(i);
    auto find = [&](int v) {
      while (uf[static_cast<size_t>(v)] != v) v = uf[static_cast<size_t>(v)] = uf[static_cast<size_t>(uf[static_cast<size_t>(v)])];
      return v;
    };
    for (int q = 0; q < b.state_count(); ++q)
      for (int s = 0; s < b.alphabet().size(); ++s) {
        const auto& act = b.action(q, s);
        if (act.priority != 1) continue;
        for (size_t i = 1; i < act.successors.size(); ++i)
          uf[static_cast<size_t>(find(act.successors[i]))] = find(act.successors[0]);
      }
    std::map<int, int> renumber;
    for (int q = 0; q < b.state_count(); ++q) {
      auto [it, fresh] = renumber.try_emplace(find(q), static_cast<int>(renumber.size()));
      (void)fresh;
      cls[static_cast<size_t>(q)] = it->second;
    }
  }

  // 1-saturation: every priority-1 successor set must be a full class
  std::vector<std::vector<int>> members(
      static_cast<size_t>(*std::max_element(cls.begin(), cls.end()) + 1));
  for (int q = 0; q < b.state_count(); ++q)
    members[static_cast<size_t>(cls[static_cast<size_t>(q)])].push_back(q);
  for (int q = 0; q < b.state_count(); ++q)
    for (int s = 0; s < b.alphabet().size(); ++s) {
      const auto& act = b.action(q, s);
      if (act.priority != 1) continue;
      std::set<int> succ(act.successors.begin(), act.successors.end());
      const auto& full = members[static_cast<size_t>(cls[static_cast<size_t>(*succ.begin())])];
      if (std::set<int>(full.begin(), full.end()) != succ)
        throw PreconditionError("cobuchi_to_layered: 1-saturation violated at ('" + b.name(q) +
                                "', '" + b.alphabet().symbol(s) + "')");
    }

  // residual transition structure; members must agree letter by letter
  const int k = static_cast<int>(members.size());
  std::vector<std::vector<int>> res_step(static_cast<size_t>(k),
                                         std::vector<int>(static_cast<size_t>(b.alphabet().size()), -1));
  for (int c = 0; c < k; ++c)
    for (int s = 0; s < b.alphabet().size(); ++s) {
      int target = -1;
      for (int q : members[static_cast<size_t>(c)]) {
        const auto& act = b.action(q, s);
        int here = cls[static_cast<size_t>(act.successors.front())];
        if (target == -1) target = here;
        if (target != here)
          throw PreconditionError(
              "cobuchi_to_layered: residual structure is inconsistent at ('" + b.name(q) + "', '" +
              b.alphabet().symbol(s) + "'); the automaton is not semantically deterministic");
      }
      res_step[static_cast<size_t>(c)][static_cast<size_t>(s)] = target;
    }

  // keep only classes reachable from the initial class
  std::vector<bool> keep(static_cast<size_t>(k), false);
  std::vector<int> stack{cls[static_cast<size_t>(b.initial())]};
  keep[static_cast<size_t>(stack[0])] = true;
  while (!stack.empty()) {
    int c = stack.back();
    stack.pop_back();
    for (int s = 0; s < b.alphabet().size(); ++s) {
      int to = res_step[static_cast<size_t>(c)][static_cast<size_t>(s)];
      if (!keep[static_cast<size_t>(to)]) {
        keep[static_cast<size_t>(to)] = true;
        stack.push_back(to);
      }
    }
  }

  auto class_label = [&](int c) {
    auto least = b.name(members[static_cast<size_t>(c)].front());
    for (int q : members[static_cast<size_t>(c)]) least = std::min(least, b.name(q));
    return detail::layer_tag(least, 1);
  };

  TransitionSystem t1, t2;
  std::map<std::string, std::string> pm;
  for (int c = 0; c < k; ++c) {
    if (!keep[static_cast<size_t>(c)]) continue;
    t1.states.push_back(class_label(c));
    for (int s = 0; s < b.alphabet().size(); ++s)
      t1.transitions.push_back({class_label(c), b.alphabet().symbol(s),
                                class_label(res_step[static_cast<size_t>(c)][static_cast<size_t>(s)])});
  }
  for (int q = 0; q < b.state_count(); ++q) {
    if (!keep[static_cast<size_t>(cls[static_cast<size_t>(q)])]) continue;
    t2.states.push_back(b.name(q));
    pm[b.name(q)] = class_label(cls[static_cast<size_t>(q)]);
    for (int s = 0; s < b.alphabet().size(); ++s) {
      const auto& act = b.action(q, s);
      if (act.priority == 2)
        t2.transitions.push_back({b.name(q), b.alphabet().symbol(s), b.name(act.successors.front())});
    }
  }
  return LayeredAutomaton(b.alphabet(), {std::move(t1), std::move(t2)}, {std::move(pm)},
                          class_label(cls[static_cast<size_t>(b.initial())]));
}

// ---------------------------------------------------------------------------
// Morphisms of layered automata
// ---------------------------------------------------------------------------

/// Checks the structure-map clauses: initial to initial, transitions map to
/// transitions at the image's own layer, ancestors map to ancestors, and for
/// strong morphisms also non-transitions to non-transitions.
inline bool check_morphism(const LayeredMorphism& m) {
  const auto& a = m.source;
  const auto& b = m.target;
  if (!(a.alphabet() == b.alphabet())) return false;

  std::vector<int> image(static_cast<size_t>(a.state_count()), -1);
  for (int q = 0; q < a.state_count(); ++q) {
    auto it = m.map.find(a.name(q));
    if (it == m.map.end()) return false;  // map must be total
    auto t = b.find_state(it->second);
    if (!t) return false;
    image[static_cast<size_t>(q)] = *t;
  }

  if (image[static_cast<size_t>(a.initial())] != b.initial()) return false;

  for (int q = 0; q < a.state_count(); ++q) {
    int fq = image[static_cast<size_t>(q)];
    for (auto [sym, to] : a.transitions_of(q))
      if (b.step(fq, sym) != image[static_cast<size_t>(to)]) return false;
    if (m.strong)
      for (int s = 0; s < a.alphabet().size(); ++s)
        if (a.step(q, s) == -1 && b.step(fq, s) != -1) return false;
    // ancestors map to ancestors
    int anc = q;
    while (a.parent(anc) != -1) {
      anc = a.parent(anc);
      int fa = image[static_cast<size_t>(anc)];
      if (b.layer_of(fa) > b.layer_of(fq) || b.ancestor(fq, b.layer_of(fa)) != fa) return false;
    }
  }
  return true;
}

}  // namespace layered
