#pragma once

#include "layered/decisions.hpp"

namespace layered {

namespace detail {

// SCC decomposition of one layer's transition graph. Ids are dense and
// ordered by least member state, so fixpoint passes are deterministic.
struct LayerSccs {
  std::map<int, int> id;  // state -> scc id
  int count = 0;
};

inline LayerSccs layer_sccs(const LayeredAutomaton& a, int x) {
  std::vector<int> states;
  for (int q = a.layer_first(x); q < a.layer_end(x); ++q) states.push_back(q);
  const int n = static_cast<int>(states.size());
  auto local = [&](int q) { return q - a.layer_first(x); };

  // iterative Tarjan
  std::vector<int> index(static_cast<size_t>(n), -1), low(static_cast<size_t>(n), 0);
  std::vector<bool> on_stack(static_cast<size_t>(n), false);
  std::vector<int> stack, comp(static_cast<size_t>(n), -1);
  int next_index = 0, comp_count = 0;

  struct Frame {
    int q;
    size_t edge = 0;
  };
  for (int root : states) {
    if (index[static_cast<size_t>(local(root))] != -1) continue;
    std::vector<Frame> call{{root}};
    while (!call.empty()) {
      auto& f = call.back();
      int ql = local(f.q);
      if (f.edge == 0) {
        index[static_cast<size_t>(ql)] = low[static_cast<size_t>(ql)] = next_index++;
        stack.push_back(f.q);
        on_stack[static_cast<size_t>(ql)] = true;
      }
      const auto& row = a.transitions_of(f.q);
      if (f.edge < row.size()) {
        int to = row[f.edge++].second;
        int tl = local(to);
        if (index[static_cast<size_t>(tl)] == -1) {
          call.push_back({to});
        } else if (on_stack[static_cast<size_t>(tl)]) {
          low[static_cast<size_t>(ql)] = std::min(low[static_cast<size_t>(ql)], index[static_cast<size_t>(tl)]);
        }
        continue;
      }
      if (low[static_cast<size_t>(ql)] == index[static_cast<size_t>(ql)]) {
        while (true) {
          int w = stack.back();
          stack.pop_back();
          on_stack[static_cast<size_t>(local(w))] = false;
          comp[static_cast<size_t>(local(w))] = comp_count;
          if (w == f.q) break;
        }
        ++comp_count;
      }
      call.pop_back();
      if (!call.empty()) {
        int pl = local(call.back().q);
        low[static_cast<size_t>(pl)] = std::min(low[static_cast<size_t>(pl)], low[static_cast<size_t>(ql)]);
      }
    }
  }

  // renumber by least member
  std::vector<int> least(static_cast<size_t>(comp_count), INT32_MAX);
  for (int q : states)
    least[static_cast<size_t>(comp[static_cast<size_t>(local(q))]]) =
        std::min(least[static_cast<size_t>(comp[static_cast<size_t>(local(q))]]), q);
  std::vector<int> order(static_cast<size_t>(comp_count));
  for (int i = 0; i < comp_count; ++i) order[static_cast<size_t>(i)] = i;
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return least[static_cast<size_t>(i)] < least[static_cast<size_t>(j)]; });
  std::vector<int> rank(static_cast<size_t>(comp_count));
  for (int i = 0; i < comp_count; ++i) rank[static_cast<size_t>(order[static_cast<size_t>(i)])] = i;

  LayerSccs out;
  out.count = comp_count;
  for (int q : states) out.id[q] = rank[static_cast<size_t>(comp[static_cast<size_t>(local(q))])];
  return out;
}

/// Lsafe_x(q) is a subset of Lsafe_{x+1}(p), for q on layer x and its child p.
inline bool covered(const LayeredAutomaton& a, int q, int p) {
  return safety_compare(a, q, a, p, CompareMode::Included);
}

// Name-level mutable copy used by the rewriting stages.
struct RawData {
  std::vector<TransitionSystem> layers;
  std::vector<std::map<std::string, std::string>> parents;
  std::string initial;
};

inline RawData to_raw(const LayeredAutomaton& a) {
  RawData raw;
  raw.initial = a.name(a.initial());
  for (int x = 1; x <= a.depth(); ++x) {
    TransitionSystem ts;
    for (int q = a.layer_first(x); q < a.layer_end(x); ++q) {
      ts.states.push_back(a.name(q));
      for (auto [sym, to] : a.transitions_of(q))
        ts.transitions.push_back({a.name(q), a.alphabet().symbol(sym), a.name(to)});
    }
    raw.layers.push_back(std::move(ts));
    if (x >= 2) {
      std::map<std::string, std::string> pm;
      for (int q = a.layer_first(x); q < a.layer_end(x); ++q) pm[a.name(q)] = a.name(a.parent(q));
      raw.parents.push_back(std::move(pm));
    }
  }
  return raw;
}

inline LayeredAutomaton from_raw(const Alphabet& sigma, RawData raw) {
  while (raw.layers.size() > 1 && raw.layers.back().states.empty()) {
    raw.layers.pop_back();
    raw.parents.pop_back();
  }
  return LayeredAutomaton(sigma, std::move(raw.layers), std::move(raw.parents), raw.initial);
}

// Removes the named states (all on layers >= 2) together with their
// transitions; callers guarantee no dangling parents remain.
inline void erase_states(RawData& raw, const std::set<std::string>& doomed) {
  for (size_t i = 0; i < raw.layers.size(); ++i) {
    auto& ts = raw.layers[i];
    std::erase_if(ts.states, [&](const std::string& s) { return doomed.count(s) > 0; });
    std::erase_if(ts.transitions,
                  [&](const Transition& t) { return doomed.count(t.from) || doomed.count(t.to); });
    if (i >= 1)
      std::erase_if(raw.parents[i - 1], [&](const auto& kv) { return doomed.count(kv.first) > 0; });
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Predicates
// ---------------------------------------------------------------------------

struct MinimalityPredicates {
  bool normal = false;
  bool safe_minimal = false;
  bool centralised = false;
};

namespace detail {

inline bool predicate_n1(const LayeredAutomaton& a) {
  for (int x = 2; x <= a.depth(); ++x) {
    auto sccs = layer_sccs(a, x);
    for (int q = a.layer_first(x); q < a.layer_end(x); ++q) {
      bool on_cycle = false;
      for (auto [sym, to] : a.transitions_of(q)) {
        (void)sym;
        if (sccs.id.at(q) != sccs.id.at(to)) return false;
        if (to == q) on_cycle = true;
      }
      // non-trivial SCC: either a self loop or company in the component
      if (!on_cycle) {
        bool alone = true;
        for (int q2 = a.layer_first(x); q2 < a.layer_end(x); ++q2)
          if (q2 != q && sccs.id.at(q2) == sccs.id.at(q)) alone = false;
        if (alone) return false;
      }
    }
  }
  return true;
}

inline bool predicate_n2(const LayeredAutomaton& a) {
  for (int x = 2; x < a.depth(); ++x)
    for (int q = a.layer_first(x); q < a.layer_end(x); ++q)
      for (int p : a.children(q))
        if (covered(a, q, p)) return false;
  return true;
}

// Safe-language equality classes of the states of one layer.
inline std::map<int, int> safe_classes(const LayeredAutomaton& a, int x) {
  std::map<int, int> cls;
  std::vector<int> reps;
  for (int q = a.layer_first(x); q < a.layer_end(x); ++q) {
    int found = -1;
    for (size_t r = 0; r < reps.size(); ++r)
      if (safety_compare(a, reps[r], a, q, CompareMode::Equal)) {
        found = static_cast<int>(r);
        break;
      }
    if (found == -1) {
      found = static_cast<int>(reps.size());
      reps.push_back(q);
    }
    cls[q] = found;
  }
  return cls;
}

// Signature of every state: language class of the layer-1 ancestor followed
// by the safe classes of the ancestors on layers 2..layer_of(q). Two states
// of one layer are seq_x-equivalent iff their signatures agree.
inline std::vector<std::vector<int>> seq_signatures(const LayeredAutomaton& a,
                                                    const std::vector<std::vector<bool>>& lang_eq) {
  std::vector<int> lang_class(static_cast<size_t>(a.state_count()), -1);
  {
    std::vector<int> reps;
    for (int q = a.layer_first(1); q < a.layer_end(1); ++q) {
      int found = -1;
      for (size_t r = 0; r < reps.size(); ++r)
        if (lang_eq[static_cast<size_t>(reps[r])][static_cast<size_t>(q)]) {
          found = static_cast<int>(r);
          break;
        }
      if (found == -1) {
        found = static_cast<int>(reps.size());
        reps.push_back(q);
      }
      lang_class[static_cast<size_t>(q)] = found;
    }
  }
  std::vector<std::map<int, int>> safe_cls(static_cast<size_t>(a.depth()) + 1);
  for (int x = 2; x <= a.depth(); ++x) safe_cls[static_cast<size_t>(x)] = safe_classes(a, x);

  std::vector<std::vector<int>> sig(static_cast<size_t>(a.state_count()));
  for (int q = 0; q < a.state_count(); ++q) {
    auto& s = sig[static_cast<size_t>(q)];
    s.push_back(lang_class[static_cast<size_t>(a.ancestor(q, 1))]);
    for (int y = 2; y <= a.layer_of(q); ++y) s.push_back(safe_cls[static_cast<size_t>(y)].at(a.ancestor(q, y)));
  }
  return sig;
}

inline bool predicate_safe_minimal(const LayeredAutomaton& a,
                                   const std::vector<std::vector<bool>>& lang_eq) {
  auto sig = seq_signatures(a, lang_eq);
  for (int x = 1; x <= a.depth(); ++x)
    for (int p = a.layer_first(x); p < a.layer_end(x); ++p)
      for (int q = p + 1; q < a.layer_end(x); ++q)
        if (sig[static_cast<size_t>(p)] == sig[static_cast<size_t>(q)]) return false;
  return true;
}

inline bool predicate_centralised(const LayeredAutomaton& a) {
  for (int x = 2; x <= a.depth(); ++x) {
    auto sccs = layer_sccs(a, x);
    for (int p = a.layer_first(x); p < a.layer_end(x); ++p)
      for (int q = a.layer_first(x); q < a.layer_end(x); ++q) {
        if (p == q || a.parent(p) != a.parent(q)) continue;
        if (sccs.id.at(p) == sccs.id.at(q)) continue;
        if (safety_compare(a, p, a, q, CompareMode::Included)) return false;
      }
  }
  return true;
}

}  // namespace detail

/// Direct evaluation of the three minimality predicates.
inline MinimalityPredicates predicates(const LayeredAutomaton& a, bool assume_consistent = false) {
  require_valid(a, "predicates");
  require_consistent(a, "predicates", assume_consistent);
  MinimalityPredicates out;
  out.normal = detail::predicate_n1(a) && detail::predicate_n2(a);
  auto lang_eq = layer1_language_equal_table(a, true);
  out.safe_minimal = detail::predicate_safe_minimal(a, lang_eq);
  out.centralised = detail::predicate_centralised(a);
  return out;
}

// ---------------------------------------------------------------------------
// Normalisation
// ---------------------------------------------------------------------------

namespace detail {

// One rewriting pass: delete the first transition that crosses SCCs on a
// layer >= 2 together with every deeper transition mapping onto it, then
// prune states left without outgoing transitions. Returns the number of
// transitions deleted, 0 when the automaton already satisfies N1.
inline int separate_step(const Alphabet& sigma, RawData& raw) {
  auto a = from_raw(sigma, raw);

  for (int x = 2; x <= a.depth(); ++x) {
    auto sccs = layer_sccs(a, x);
    for (int q = a.layer_first(x); q < a.layer_end(x); ++q)
      for (auto [sym, to] : a.transitions_of(q)) {
        if (sccs.id.at(q) == sccs.id.at(to)) continue;
        // delete the crossing transition and all transitions above it
        int removed = 0;
        for (int y = x; y <= a.depth(); ++y) {
          auto& ts = raw.layers[static_cast<size_t>(y - 1)];
          std::erase_if(ts.transitions, [&](const Transition& t) {
            int src = *a.find_on_layer(y, t.from);
            if (a.ancestor(src, x) != q) return false;
            if (sigma.index_or_throw(t.on) != sym) return false;
            ++removed;
            return true;
          });
        }
        // prune states (layers >= 2) without outgoing transitions
        bool pruned = true;
        while (pruned) {
          pruned = false;
          for (size_t i = 1; i < raw.layers.size(); ++i) {
            auto& ts = raw.layers[i];
            std::set<std::string> with_out;
            for (const auto& t : ts.transitions) with_out.insert(t.from);
            std::set<std::string> doomed;
            for (const auto& s : ts.states)
              if (!with_out.count(s)) doomed.insert(s);
            if (doomed.empty()) continue;
            erase_states(raw, doomed);
            pruned = true;
          }
        }
        return removed;
      }
  }
  return 0;
}

// One lowering step: find a covered SCC pair (S_x covered by its child SCC
// S_{x+1}) and shift the whole family two layers down. Returns false at the
// fixpoint.
inline bool lower_step(const Alphabet& sigma, RawData& raw) {
  auto a = from_raw(sigma, raw);

  for (int x = 2; x <= a.depth(); ++x) {
    for (int q = a.layer_first(x); q < a.layer_end(x); ++q)
      for (int p : a.children(q)) {
        if (!covered(a, q, p)) continue;

        auto scc_x = layer_sccs(a, x);
        auto scc_x1 = layer_sccs(a, x + 1);
        // membership of the moved families, by state index
        std::vector<bool> in_s(static_cast<size_t>(a.state_count()), false);  // maps to S_{x+1}
        std::vector<bool> in_z(static_cast<size_t>(a.state_count()), false);  // maps to S_x
        for (int w = 0; w < a.state_count(); ++w) {
          if (a.layer_of(w) >= x + 1 && scc_x1.id.count(a.ancestor(w, x + 1)) &&
              scc_x1.id.at(a.ancestor(w, x + 1)) == scc_x1.id.at(p))
            in_s[static_cast<size_t>(w)] = true;
          if (a.layer_of(w) >= x && scc_x.id.at(a.ancestor(w, x)) == scc_x.id.at(q))
            in_z[static_cast<size_t>(w)] = true;
        }

        RawData out;
        out.initial = raw.initial;
        out.layers.resize(raw.layers.size());
        out.parents.resize(raw.parents.size());
        auto place = [&](int w, int layer) {
          auto& ts = out.layers[static_cast<size_t>(layer - 1)];
          ts.states.push_back(a.name(w));
          for (auto [sym, to] : a.transitions_of(w))
            ts.transitions.push_back({a.name(w), sigma.symbol(sym), a.name(to)});
        };
        for (int w = 0; w < a.state_count(); ++w) {
          int y = a.layer_of(w);
          int target_layer;
          if (y < x) {
            target_layer = y;  // untouched
          } else if (in_s[static_cast<size_t>(w)] && y >= x + 2) {
            target_layer = y - 2;  // the moved family
          } else if (in_z[static_cast<size_t>(w)]) {
            continue;  // removed with S_x
          } else {
            target_layer = y;
          }
          place(w, target_layer);
          if (target_layer >= 2) {
            std::string par;
            if (y == target_layer)
              par = a.name(a.parent(w));
            else if (target_layer > x)
              par = a.name(a.parent(w));  // old parent, itself shifted down
            else
              par = a.name(a.ancestor(w, x - 1));  // landing on layer x
            out.parents[static_cast<size_t>(target_layer - 2)][a.name(w)] = par;
          }
        }
        raw = std::move(out);
        return true;
      }
  }
  return false;
}

}  // namespace detail

/// Deletes transitions between distinct SCCs on layers >= 2 (and everything
/// mapping onto them) until every layer is a union of non-trivial SCCs.
inline LayeredAutomaton separate_sccs(const LayeredAutomaton& a, bool assume_consistent = false,
                                      int* removed_count = nullptr) {
  require_valid(a, "separate_sccs");
  require_consistent(a, "separate_sccs", assume_consistent);
  auto raw = detail::to_raw(a);
  int total = 0;
  while (int n = detail::separate_step(a.alphabet(), raw)) total += n;
  if (removed_count) *removed_count = total;
  return detail::from_raw(a.alphabet(), raw);
}

/// Applies the lowering rewriting until no SCC is covered by a child SCC.
inline LayeredAutomaton lower_covered(const LayeredAutomaton& a, bool assume_consistent = false,
                                      int* lowered_count = nullptr) {
  require_valid(a, "lower_covered");
  require_consistent(a, "lower_covered", assume_consistent);
  if (!detail::predicate_n1(a))
    throw PreconditionError("lower_covered: input must satisfy N1 (run separate_sccs first)");
  auto raw = detail::to_raw(a);
  int total = 0;
  while (detail::lower_step(a.alphabet(), raw)) ++total;
  if (lowered_count) *lowered_count = total;
  return detail::from_raw(a.alphabet(), raw);
}

/// Normal form: separate SCCs, then alternate lowering and separation until
/// both fix points hold.
inline LayeredAutomaton normalize(const LayeredAutomaton& a, bool assume_consistent = false,
                                  int* removed_count = nullptr, int* lowered_count = nullptr) {
  require_valid(a, "normalize");
  require_consistent(a, "normalize", assume_consistent);
  int removed_total = 0, lowered_total = 0;
  auto current = separate_sccs(a, true, &removed_total);
  while (true) {
    int lowered = 0;
    auto next = lower_covered(current, true, &lowered);
    lowered_total += lowered;
    int removed = 0;
    next = separate_sccs(next, true, &removed);
    removed_total += removed;
    current = std::move(next);
    if (lowered == 0 && removed == 0) break;
  }
  if (removed_count) *removed_count = removed_total;
  if (lowered_count) *lowered_count = lowered_total;
  return current;
}

// ---------------------------------------------------------------------------
// Safe minimisation
// ---------------------------------------------------------------------------

/// Quotients every layer by seq_x (language equality plus equality of all
/// safe languages up to the layer). Returns the quotient together with the
/// surjective strong morphism onto it.
inline std::pair<LayeredAutomaton, LayeredMorphism> safe_minimize(const LayeredAutomaton& a,
                                                                  bool assume_consistent = false) {
  require_valid(a, "safe_minimize");
  require_consistent(a, "safe_minimize", assume_consistent);
  if (!detail::predicate_n1(a) || !detail::predicate_n2(a))
    throw PreconditionError("safe_minimize: input must be in normal form");

  auto lang_eq = layer1_language_equal_table(a, true);
  auto sig = detail::seq_signatures(a, lang_eq);

  // per layer, group states by signature; the least state is the class name
  std::vector<int> rep(static_cast<size_t>(a.state_count()), -1);
  for (int x = 1; x <= a.depth(); ++x) {
    std::map<std::vector<int>, int> seen;
    for (int q = a.layer_first(x); q < a.layer_end(x); ++q) {
      auto [it, fresh] = seen.try_emplace(sig[static_cast<size_t>(q)], q);
      (void)fresh;
      rep[static_cast<size_t>(q)] = it->second;
    }
  }

  detail::RawData raw;
  raw.initial = a.name(rep[static_cast<size_t>(a.initial())]);
  raw.layers.resize(static_cast<size_t>(a.depth()));
  raw.parents.resize(static_cast<size_t>(a.depth() - 1));
  for (int x = 1; x <= a.depth(); ++x) {
    auto& ts = raw.layers[static_cast<size_t>(x - 1)];
    for (int q = a.layer_first(x); q < a.layer_end(x); ++q) {
      if (rep[static_cast<size_t>(q)] != q) continue;
      ts.states.push_back(a.name(q));
      for (auto [sym, to] : a.transitions_of(q))
        ts.transitions.push_back(
            {a.name(q), a.alphabet().symbol(sym), a.name(rep[static_cast<size_t>(to)])});
      if (x >= 2)
        raw.parents[static_cast<size_t>(x - 2)][a.name(q)] =
            a.name(rep[static_cast<size_t>(a.parent(q))]);
    }
  }
  LayeredAutomaton quotient = detail::from_raw(a.alphabet(), std::move(raw));

  LayeredMorphism phi{a, quotient, {}, true};
  for (int q = 0; q < a.state_count(); ++q) phi.map[a.name(q)] = a.name(rep[static_cast<size_t>(q)]);
  return {std::move(quotient), std::move(phi)};
}

// ---------------------------------------------------------------------------
// Centralisation
// ---------------------------------------------------------------------------

/// Removes x-SCCs that are not maximal for the safe-language order among
/// states with a shared parent, together with all their descendants.
inline LayeredAutomaton centralize(const LayeredAutomaton& a, bool assume_consistent = false,
                                   int* deleted_sccs = nullptr) {
  require_valid(a, "centralize");
  require_consistent(a, "centralize", assume_consistent);
  {
    auto lang_eq = layer1_language_equal_table(a, true);
    if (!detail::predicate_n1(a) || !detail::predicate_n2(a) ||
        !detail::predicate_safe_minimal(a, lang_eq))
      throw PreconditionError("centralize: input must be normal and safe minimal");
  }

  auto current = a;
  int deleted = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int x = 2; x <= current.depth() && !changed; ++x) {
      auto sccs = detail::layer_sccs(current, x);
      for (int p = current.layer_first(x); p < current.layer_end(x) && !changed; ++p)
        for (int q = current.layer_first(x); q < current.layer_end(x); ++q) {
          if (p == q || current.parent(p) != current.parent(q)) continue;
          if (sccs.id.at(p) == sccs.id.at(q)) continue;
          if (!detail::safety_compare(current, p, current, q, CompareMode::Included)) continue;
          // p's SCC is dominated by q's: remove it and everything above it
          std::set<std::string> doomed;
          for (int w = 0; w < current.state_count(); ++w)
            if (current.layer_of(w) >= x && sccs.id.count(current.ancestor(w, x)) &&
                sccs.id.at(current.ancestor(w, x)) == sccs.id.at(p))
              doomed.insert(current.name(w));
          auto raw = detail::to_raw(current);
          detail::erase_states(raw, doomed);
          current = detail::from_raw(current.alphabet(), std::move(raw));
          ++deleted;
          changed = true;
          break;
        }
    }
  }
  if (deleted_sccs) *deleted_sccs = deleted;
  return current;
}

// ---------------------------------------------------------------------------
// The full pipeline
// ---------------------------------------------------------------------------

struct PipelineReport {
  int transitions_removed = 0;
  int sccs_lowered = 0;
  int classes_merged = 0;
  int sccs_deleted = 0;
  bool normal = false;
  bool safe_minimal = false;
  bool centralised = false;
  bool consistent = false;
};

/// normalize, then safe minimise, then centralise. The resulting automaton is
/// the unique minimal one for the language; all postconditions are re-checked
/// rather than trusted.
inline std::pair<LayeredAutomaton, PipelineReport> canonicalize(const LayeredAutomaton& a) {
  require_valid(a, "canonicalize");
  require_consistent(a, "canonicalize", false);

  PipelineReport report;
  auto normal = normalize(a, true, &report.transitions_removed, &report.sccs_lowered);
  auto [reduced, phi] = safe_minimize(normal, true);
  (void)phi;
  report.classes_merged = normal.state_count() - reduced.state_count();
  auto central = centralize(reduced, true, &report.sccs_deleted);

  auto check = predicates(central, false);
  report.normal = check.normal;
  report.safe_minimal = check.safe_minimal;
  report.centralised = check.centralised;
  report.consistent = true;  // predicates() above verified it
  if (!check.normal || !check.safe_minimal || !check.centralised)
    throw std::logic_error("canonicalize: pipeline output fails its own predicates");
  if (!is_equivalent(central, a, true))
    throw std::logic_error("canonicalize: pipeline changed the language");
  return {std::move(central), report};
}

// ---------------------------------------------------------------------------
// Central sequences
// ---------------------------------------------------------------------------

namespace detail {

// Shortest word alive on the layer of `from` whose run from `alive` survives
// while the run from `dies` (possibly on another layer) dies. Returns nothing
// when no such word exists.
inline std::optional<std::vector<int>> kill_word(const LayeredAutomaton& a, int alive, int dies) {
  std::map<std::pair<int, int>, std::pair<std::pair<int, int>, int>> pred;  // (s,t) -> parent, sym
  std::vector<std::pair<int, int>> queue{{alive, dies}};
  std::set<std::pair<int, int>> seen{{alive, dies}};
  size_t head = 0;
  while (head < queue.size()) {
    auto [s, t] = queue[head++];
    for (int sym = 0; sym < a.alphabet().size(); ++sym) {
      int s2 = a.step(s, sym);
      if (s2 == -1) continue;
      int t2 = a.step(t, sym);
      if (t2 == -1) {
        // reconstruct
        std::vector<int> word{sym};
        auto cur = std::make_pair(s, t);
        while (cur != std::make_pair(alive, dies)) {
          auto [par, psym] = pred.at(cur);
          word.push_back(psym);
          cur = par;
        }
        std::reverse(word.begin(), word.end());
        return word;
      }
      if (seen.insert({s2, t2}).second) {
        pred[{s2, t2}] = {{s, t}, sym};
        queue.push_back({s2, t2});
      }
    }
  }
  return std::nullopt;
}

// Shortest word labelling a path from `from` to `to` within their layer.
inline std::vector<int> path_word(const LayeredAutomaton& a, int from, int to) {
  if (from == to) return {};
  std::map<int, std::pair<int, int>> pred;
  std::vector<int> queue{from};
  std::set<int> seen{from};
  size_t head = 0;
  while (head < queue.size()) {
    int s = queue[head++];
    for (int sym = 0; sym < a.alphabet().size(); ++sym) {
      int s2 = a.step(s, sym);
      if (s2 == -1 || !seen.insert(s2).second) continue;
      pred[s2] = {s, sym};
      if (s2 == to) {
        std::vector<int> word;
        int cur = to;
        while (cur != from) {
          word.push_back(pred.at(cur).second);
          cur = pred.at(cur).first;
        }
        std::reverse(word.begin(), word.end());
        return word;
      }
      queue.push_back(s2);
    }
  }
  throw std::logic_error("path_word: target not reachable inside the SCC");
}

inline void append(std::vector<int>& word, const std::vector<int>& tail) {
  word.insert(word.end(), tail.begin(), tail.end());
}

// The three clauses of a central sequence, checked directly.
inline bool is_central_sequence(const LayeredAutomaton& a, int p, const std::vector<int>& z) {
  if (z.empty()) return false;
  const int x = a.layer_of(p);
  if (run_safe(a, x, p, z) != p) return false;
  for (int q = a.layer_first(x); q < a.layer_end(x); ++q) {
    if (a.ancestor(q, x - 1) != a.ancestor(p, x - 1)) continue;
    auto end = run_safe(a, x, q, z);
    if (end && *end != p) return false;
  }
  if (x + 1 <= a.depth())
    for (int q = a.layer_first(x + 1); q < a.layer_end(x + 1); ++q) {
      if (a.ancestor(q, x - 1) != a.ancestor(p, x - 1)) continue;
      if (run_safe(a, x + 1, q, z)) return false;
    }
  return true;
}

std::vector<int> central_sequence_impl(const LayeredAutomaton& a, int p);  // forward

// Case of a state that is maximal for the safe-language order among its
// siblings: fold every sibling run into p with distinguishing words, then
// kill the runs sitting on p's children.
inline std::vector<int> central_sequence_maximal(const LayeredAutomaton& a, int p) {
  const int x = a.layer_of(p);
  std::vector<int> siblings;
  for (int q = a.layer_first(x); q < a.layer_end(x); ++q)
    if (q != p && a.ancestor(q, x - 1) == a.ancestor(p, x - 1)) siblings.push_back(q);

  std::vector<int> word;
  // sibling runs: fold into p or kill
  std::set<int> live(siblings.begin(), siblings.end());
  while (true) {
    // advance bookkeeping: recompute current positions of sibling runs
    std::set<int> positions;
    for (int q : siblings) {
      auto end = run_safe(a, x, q, word);
      if (end && *end != p) positions.insert(*end);
    }
    if (positions.empty()) break;
    int target = *positions.begin();
    auto v = kill_word(a, p, target);
    if (!v) throw std::logic_error("central_sequence: no distinguishing word for a sibling");
    // return to p so the folding can continue
    auto backp = run_safe(a, x, p, *v);
    if (!backp) throw std::logic_error("central_sequence: distinguishing word left the state");
    append(*v, path_word(a, *backp, p));
    append(word, *v);
  }
  (void)live;

  // kill all runs currently sitting on children of p
  if (x + 1 <= a.depth()) {
    while (true) {
      std::set<int> positions;
      for (int q = a.layer_first(x + 1); q < a.layer_end(x + 1); ++q) {
        if (a.ancestor(q, x - 1) != a.ancestor(p, x - 1)) continue;
        auto end = run_safe(a, x + 1, q, word);
        if (end) positions.insert(*end);
      }
      if (positions.empty()) break;
      int target = *positions.begin();
      auto u = kill_word(a, p, target);
      if (!u) throw std::logic_error("central_sequence: cannot kill a child run (N2 violated?)");
      auto backp = run_safe(a, x, p, *u);
      if (!backp) throw std::logic_error("central_sequence: child-killing word left the state");
      append(*u, path_word(a, *backp, p));
      append(word, *u);
    }
  }

  if (word.empty()) {
    // no siblings and no children: any loop on p works
    word = path_word(a, a.step(p, [&] {
                       for (int s = 0; s < a.alphabet().size(); ++s)
                         if (a.step(p, s) != -1) return s;
                       throw std::logic_error("central_sequence: state has no transitions");
                     }()),
                     p);
    int first_sym = 0;
    for (int s = 0; s < a.alphabet().size(); ++s)
      if (a.step(p, s) != -1) {
        first_sym = s;
        break;
      }
    word.insert(word.begin(), first_sym);
  }
  return word;
}

inline std::vector<int> central_sequence_impl(const LayeredAutomaton& a, int p) {
  const int x = a.layer_of(p);
  // maximal sibling above p, if any
  int best = p;
  for (int q = a.layer_first(x); q < a.layer_end(x); ++q) {
    if (q == best || a.ancestor(q, x - 1) != a.ancestor(p, x - 1)) continue;
    if (safety_compare(a, best, a, q, CompareMode::Included)) best = q;
  }
  if (best == p) return central_sequence_maximal(a, p);
  auto z = central_sequence_maximal(a, best);
  auto u = path_word(a, p, best);
  auto v = path_word(a, best, p);
  std::vector<int> word = u;
  append(word, z);
  append(word, v);
  return word;
}

}  // namespace detail

/// A word that loops on p, sends every sibling with the same grandparent
/// class to p or to death, and kills every deeper state of the class. Exists
/// on every layer >= 2 of a canonical automaton; the construction is verified
/// against the three defining clauses before returning.
inline std::vector<std::string> central_sequence(const LayeredAutomaton& a,
                                                 const std::string& state,
                                                 bool assume_canonical = false) {
  require_valid(a, "central_sequence");
  int p = a.state_or_throw(state);
  if (a.layer_of(p) < 2)
    throw PreconditionError("central_sequence: state must live on a layer >= 2");
  if (!assume_canonical) {
    auto preds = predicates(a, false);
    if (!preds.normal || !preds.safe_minimal || !preds.centralised)
      throw PreconditionError("central_sequence: automaton must be normal, safe minimal and "
                              "centralised");
  }
  auto word = detail::central_sequence_impl(a, p);
  if (!detail::is_central_sequence(a, p, word))
    throw std::logic_error("central_sequence: constructed word fails the defining clauses");
  std::vector<std::string> out;
  for (int sym : word) out.push_back(a.alphabet().symbol(sym));
  return out;
}

// ---------------------------------------------------------------------------
// Isomorphism of safe-minimal automata
// ---------------------------------------------------------------------------

/// The unique layer-preserving bijection between two safe-minimal automata,
/// or nothing. Layer 1 is matched by synchronous traversal from the initial
/// states; deeper layers pair the children of matched parents by equality of
/// safe languages, which safe minimality makes unambiguous.
inline std::optional<std::map<std::string, std::string>> check_isomorphic(
    const LayeredAutomaton& a, const LayeredAutomaton& b, bool assume_canonical = false) {
  if (!assume_canonical) {
    auto pa = predicates(a);
    auto pb = predicates(b);
    if (!pa.safe_minimal || !pb.safe_minimal)
      throw PreconditionError("check_isomorphic: both automata must be safe minimal");
  }
  if (!(a.alphabet() == b.alphabet())) return std::nullopt;
  if (a.depth() != b.depth() || a.state_count() != b.state_count()) return std::nullopt;
  for (int x = 1; x <= a.depth(); ++x)
    if (a.layer_size(x) != b.layer_size(x)) return std::nullopt;

  std::vector<int> image(static_cast<size_t>(a.state_count()), -1);
  std::vector<bool> taken(static_cast<size_t>(b.state_count()), false);

  // layer 1 by deterministic traversal
  {
    std::vector<std::pair<int, int>> queue{{a.initial(), b.initial()}};
    image[static_cast<size_t>(a.initial())] = b.initial();
    taken[static_cast<size_t>(b.initial())] = true;
    size_t head = 0;
    while (head < queue.size()) {
      auto [s, t] = queue[head++];
      for (int sym = 0; sym < a.alphabet().size(); ++sym) {
        int s2 = a.step(s, sym);
        int t2 = b.step(t, sym);
        if (s2 == -1 || t2 == -1) return std::nullopt;
        int& slot = image[static_cast<size_t>(s2)];
        if (slot == -1) {
          if (taken[static_cast<size_t>(t2)]) return std::nullopt;
          slot = t2;
          taken[static_cast<size_t>(t2)] = true;
          queue.push_back({s2, t2});
        } else if (slot != t2) {
          return std::nullopt;
        }
      }
    }
    for (int q = a.layer_first(1); q < a.layer_end(1); ++q)
      if (image[static_cast<size_t>(q)] == -1) return std::nullopt;
  }

  // deeper layers: children of matched parents paired by safe language
  for (int x = 2; x <= a.depth(); ++x)
    for (int s = a.layer_first(x - 1); s < a.layer_end(x - 1); ++s) {
      int t = image[static_cast<size_t>(s)];
      auto cs = a.children(s);
      auto ct = b.children(t);
      if (cs.size() != ct.size()) return std::nullopt;
      for (int c : cs) {
        int found = -1;
        for (int c2 : ct)
          if (!taken[static_cast<size_t>(c2)] &&
              detail::safety_compare(a, c, b, c2, CompareMode::Equal)) {
            if (found != -1) return std::nullopt;
            found = c2;
          }
        if (found == -1) return std::nullopt;
        image[static_cast<size_t>(c)] = found;
        taken[static_cast<size_t>(found)] = true;
      }
    }

  // full verification before reporting success
  for (int q = 0; q < a.state_count(); ++q) {
    if (image[static_cast<size_t>(q)] == -1) return std::nullopt;
    int fq = image[static_cast<size_t>(q)];
    if (b.layer_of(fq) != a.layer_of(q)) return std::nullopt;
    for (int sym = 0; sym < a.alphabet().size(); ++sym) {
      int s2 = a.step(q, sym);
      int t2 = b.step(fq, sym);
      if ((s2 == -1) != (t2 == -1)) return std::nullopt;
      if (s2 != -1 && image[static_cast<size_t>(s2)] != t2) return std::nullopt;
    }
    if (a.parent(q) != -1 && image[static_cast<size_t>(a.parent(q))] != b.parent(fq))
      return std::nullopt;
  }

  std::map<std::string, std::string> out;
  for (int q = 0; q < a.state_count(); ++q) out[a.name(q)] = b.name(image[static_cast<size_t>(q)]);
  return out;
}

}  // namespace layered
