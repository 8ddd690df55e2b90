#pragma once

#include <random>

#include "layered/semantics.hpp"

namespace layered {

enum class Side { Eve, Adam };
enum class ResolverKind { LongestSuffix, Random };

struct RunStep {
  std::string state, symbol;
  int priority = 0;
  std::string successor;
};

struct RunTrace {
  std::string start;
  std::vector<RunStep> steps;
  uint64_t seed = 0;
  int horizon = 0;
};

struct RunStatistics {
  std::map<int, long> priority_counts;
  int tail_min_priority = 0;  // minimum over the final third of the trace
};

namespace detail {

// Length of the longest suffix of `word` labelling some layer-x path into
// `target`. The empty suffix always qualifies.
inline int longest_suffix_into(const LayeredAutomaton& a, int x, int target,
                               const std::vector<int>& word) {
  const int first = a.layer_first(x), last = a.layer_end(x);
  std::vector<char> cur(static_cast<size_t>(last - first), 0);
  std::vector<char> nxt(static_cast<size_t>(last - first), 0);
  cur[static_cast<size_t>(target - first)] = 1;
  int best = 0;
  for (int k = 1; k <= static_cast<int>(word.size()); ++k) {
    int letter = word[word.size() - static_cast<size_t>(k)];
    std::fill(nxt.begin(), nxt.end(), 0);
    bool any = false;
    for (int p = first; p < last; ++p) {
      int to = a.step(p, letter);
      if (to != -1 && cur[static_cast<size_t>(to - first)]) {
        nxt[static_cast<size_t>(p - first)] = 1;
        any = true;
      }
    }
    if (!any) break;
    cur.swap(nxt);
    best = k;
  }
  return best;
}

struct LeafContext {
  std::vector<int> leaves;
  std::vector<bool> is_leaf;

  explicit LeafContext(const LayeredAutomaton& a) : leaves(leaf_states(a)) {
    is_leaf.assign(static_cast<size_t>(a.state_count()), false);
    for (int q : leaves) is_leaf[static_cast<size_t>(q)] = true;
  }
};

// Successor leaves of the pending action, in state order.
inline std::vector<int> action_candidates(const LayeredAutomaton& a, const LeafContext& ctx,
                                          int leaf, int sym, int* out_priority) {
  int x = action_layer(a, leaf, sym);
  if (out_priority) *out_priority = x;
  int target = a.step(a.ancestor(leaf, x), sym);
  std::vector<int> out;
  for (int q : ctx.leaves)
    if (a.layer_of(q) >= x && a.ancestor(q, x) == target) out.push_back(q);
  return out;
}

// Longest-suffix choice among candidates: maximise the suffix of
// history+letter labelling a path into the candidate's layer-(x+1) ancestor,
// break ties towards the least state.
inline int longest_suffix_choice(const LayeredAutomaton& a, const std::vector<int>& candidates,
                                 int priority, const std::vector<int>& word_so_far) {
  if (candidates.size() == 1) return candidates.front();
  int best = -1, best_len = -1;
  std::map<int, int> by_ancestor;  // ancestor -> suffix length, computed once
  for (int q : candidates) {
    int anc = a.ancestor(q, priority + 1);
    auto it = by_ancestor.find(anc);
    int len;
    if (it != by_ancestor.end()) {
      len = it->second;
    } else {
      len = longest_suffix_into(a, priority + 1, anc, word_so_far);
      by_ancestor.emplace(anc, len);
    }
    if (len > best_len) {
      best_len = len;
      best = q;
    }
  }
  return best;
}

}  // namespace detail

/// One resolver decision: from the end of `history`, reading `symbol`, the
/// given side picks the successor leaf whose deeper-layer ancestor admits the
/// longest suffix of init_word + history + symbol. The side must own the
/// pending priority (Eve odd, Adam even).
inline std::string resolver_step(const LayeredAutomaton& a, const RunTrace& history,
                                 const std::string& symbol, Side side,
                                 const std::vector<std::string>& init_word = {}) {
  detail::LeafContext ctx(a);
  int leaf = a.state_or_throw(history.steps.empty() ? history.start : history.steps.back().successor);
  int sym = a.alphabet().index_or_throw(symbol);
  int priority = 0;
  auto candidates = detail::action_candidates(a, ctx, leaf, sym, &priority);
  bool eve_moves = priority % 2 == 1;
  if (eve_moves != (side == Side::Eve))
    throw std::invalid_argument("resolver_step: priority " + std::to_string(priority) +
                                " is resolved by " + (eve_moves ? "Eve" : "Adam"));
  std::vector<int> word;
  for (const auto& s : init_word) word.push_back(a.alphabet().index_or_throw(s));
  for (const auto& step : history.steps) word.push_back(a.alphabet().index_or_throw(step.symbol));
  word.push_back(sym);
  return a.name(detail::longest_suffix_choice(a, candidates, priority, word));
}

/// Plays `horizon` steps of sem(a) on the up-word, resolving Eve's and Adam's
/// choices with the requested resolvers. Deterministic for a fixed seed.
inline std::pair<RunTrace, RunStatistics> simulate_run(const LayeredAutomaton& a, const UpWord& w,
                                                       ResolverKind eve, ResolverKind adam,
                                                       int horizon, uint64_t seed = 0) {
  auto iw = detail::index_up_word(a.alphabet(), w);
  if (horizon < static_cast<int>(iw.prefix.size() + iw.period.size()))
    throw std::invalid_argument("simulate_run: horizon must cover prefix and period");

  detail::LeafContext ctx(a);
  int cur = -1;
  for (int q : ctx.leaves)
    if (a.ancestor(q, 1) == a.initial()) {
      cur = q;
      break;
    }
  if (cur == -1) throw std::invalid_argument("simulate_run: no leaf above the initial state");

  std::mt19937_64 rng(seed);
  RunTrace trace;
  trace.start = a.name(cur);
  trace.seed = seed;
  trace.horizon = horizon;
  RunStatistics stats;

  std::vector<int> word;
  word.reserve(static_cast<size_t>(horizon));
  for (int i = 0; i < horizon; ++i) {
    int sym = detail::up_letter(iw, static_cast<size_t>(i));
    word.push_back(sym);
    int priority = 0;
    auto candidates = detail::action_candidates(a, ctx, cur, sym, &priority);
    ResolverKind kind = priority % 2 == 1 ? eve : adam;
    int chosen;
    if (candidates.size() == 1) {
      chosen = candidates.front();
    } else if (kind == ResolverKind::Random) {
      chosen = candidates[static_cast<size_t>(rng() % candidates.size())];
    } else {
      chosen = detail::longest_suffix_choice(a, candidates, priority, word);
    }
    trace.steps.push_back({a.name(cur), a.alphabet().symbol(sym), priority, a.name(chosen)});
    ++stats.priority_counts[priority];
    cur = chosen;
  }

  size_t tail_from = trace.steps.size() - trace.steps.size() / 3;
  stats.tail_min_priority = INT32_MAX;
  for (size_t i = tail_from; i < trace.steps.size(); ++i)
    stats.tail_min_priority = std::min(stats.tail_min_priority, trace.steps[i].priority);
  return {std::move(trace), std::move(stats)};
}

}  // namespace layered
