#pragma once

#include <cstdint>

#include "layered/core.hpp"

namespace layered {

enum class Player { Prover, Refuter };

inline Player opponent(Player p) { return p == Player::Prover ? Player::Refuter : Player::Prover; }

struct GameVertex {
  Player owner = Player::Prover;
  std::optional<Player> sink_winner;  // set on vertices with no outgoing edges
};

struct GameEdge {
  int from = 0;
  int to = 0;
  int priority = 1;       // min-parity, liminf-even wins for Prover
  uint32_t colors = 0;    // membership bitmask for the Buchi color sets
};

enum class WinCondition { Parity, Buchi, GeneralizedBuchi };

struct GameArena {
  std::vector<GameVertex> vertices;
  std::vector<GameEdge> edges;
  WinCondition condition = WinCondition::Parity;
  int buchi_sets = 1;

  int add_vertex(Player owner) {
    vertices.push_back({owner, std::nullopt});
    return static_cast<int>(vertices.size()) - 1;
  }
  int add_sink(Player winner) {
    vertices.push_back({Player::Prover, winner});
    return static_cast<int>(vertices.size()) - 1;
  }
  void add_edge(int from, int to, int priority = 1, uint32_t colors = 0) {
    edges.push_back({from, to, priority, colors});
  }
};

inline std::vector<Diagnostic> validate_arena(const GameArena& g) {
  std::vector<Diagnostic> out;
  std::vector<int> outdeg(g.vertices.size(), 0);
  for (const auto& e : g.edges) {
    if (e.from < 0 || e.to < 0 || e.from >= static_cast<int>(g.vertices.size()) ||
        e.to >= static_cast<int>(g.vertices.size())) {
      out.push_back({"edge-range", "edge endpoint out of range"});
      continue;
    }
    if (g.condition == WinCondition::Parity && e.priority < 1)
      out.push_back({"priority-range", "edge priority must be at least 1"});
    ++outdeg[static_cast<size_t>(e.from)];
  }
  for (size_t v = 0; v < g.vertices.size(); ++v) {
    if (outdeg[v] == 0 && !g.vertices[v].sink_winner)
      out.push_back({"dead-end", "vertex " + std::to_string(v) +
                                     " has no outgoing edge and is not a labelled sink"});
    if (outdeg[v] > 0 && g.vertices[v].sink_winner)
      out.push_back({"sink-with-edges", "vertex " + std::to_string(v) +
                                            " is a labelled sink but has outgoing edges"});
  }
  if (g.buchi_sets < 1 || g.buchi_sets > 32)
    out.push_back({"color-count", "number of Buchi sets must be in [1, 32]"});
  return out;
}

namespace detail {

// Sinks become self-loops whose priority and colors hand the play to the
// labelled winner, so the solvers never deal with dead ends.
inline GameArena expand_sinks(const GameArena& g) {
  GameArena out = g;
  int max_pri = 2;
  for (const auto& e : g.edges) max_pri = std::max(max_pri, e.priority);
  uint32_t all_colors = g.buchi_sets >= 32 ? ~0u : ((1u << g.buchi_sets) - 1);
  for (size_t v = 0; v < out.vertices.size(); ++v) {
    if (!out.vertices[v].sink_winner) continue;
    bool prover_wins = *out.vertices[v].sink_winner == Player::Prover;
    out.add_edge(static_cast<int>(v), static_cast<int>(v), prover_wins ? 2 : 1,
                 prover_wins ? all_colors : 0);
    out.vertices[v].sink_winner.reset();
  }
  (void)max_pri;
  return out;
}

struct AdjacencyView {
  std::vector<std::vector<int>> out_edges;  // edge indices per source
  std::vector<std::vector<int>> in_edges;   // edge indices per target

  explicit AdjacencyView(const GameArena& g) {
    out_edges.resize(g.vertices.size());
    in_edges.resize(g.vertices.size());
    for (size_t i = 0; i < g.edges.size(); ++i) {
      out_edges[static_cast<size_t>(g.edges[i].from)].push_back(static_cast<int>(i));
      in_edges[static_cast<size_t>(g.edges[i].to)].push_back(static_cast<int>(i));
    }
  }
};

// Vertices of `alive` from which `who` can force reaching `base` (in zero or
// more steps), staying within `alive`.
inline std::vector<bool> attractor(const GameArena& g, const AdjacencyView& adj, Player who,
                                   const std::vector<bool>& base, const std::vector<bool>& alive) {
  std::vector<bool> in(g.vertices.size(), false);
  std::vector<int> escape(g.vertices.size(), 0);
  for (size_t v = 0; v < g.vertices.size(); ++v)
    if (alive[v] && g.vertices[v].owner != who)
      for (int ei : adj.out_edges[v])
        if (alive[static_cast<size_t>(g.edges[static_cast<size_t>(ei)].to)]) ++escape[v];
  std::vector<int> queue;
  for (size_t v = 0; v < g.vertices.size(); ++v)
    if (alive[v] && base[v]) {
      in[v] = true;
      queue.push_back(static_cast<int>(v));
    }
  while (!queue.empty()) {
    int v = queue.back();
    queue.pop_back();
    for (int ei : adj.in_edges[static_cast<size_t>(v)]) {
      int u = g.edges[static_cast<size_t>(ei)].from;
      if (!alive[static_cast<size_t>(u)] || in[static_cast<size_t>(u)]) continue;
      if (g.vertices[static_cast<size_t>(u)].owner == who) {
        in[static_cast<size_t>(u)] = true;
        queue.push_back(u);
      } else if (--escape[static_cast<size_t>(u)] == 0) {
        in[static_cast<size_t>(u)] = true;
        queue.push_back(u);
      }
    }
  }
  return in;
}

// Zielonka's recursive algorithm, min-parity over vertex priorities.
inline void zielonka(const GameArena& g, const AdjacencyView& adj, const std::vector<int>& priority,
                     std::vector<bool> alive, std::vector<Player>& winner) {
  int alive_count = 0;
  int min_pri = INT32_MAX;
  for (size_t v = 0; v < alive.size(); ++v)
    if (alive[v]) {
      ++alive_count;
      min_pri = std::min(min_pri, priority[v]);
    }
  if (alive_count == 0) return;

  Player sigma = (min_pri % 2 == 0) ? Player::Prover : Player::Refuter;
  std::vector<bool> base(alive.size(), false);
  for (size_t v = 0; v < alive.size(); ++v) base[v] = alive[v] && priority[v] == min_pri;
  auto attr = attractor(g, adj, sigma, base, alive);

  std::vector<bool> rest = alive;
  for (size_t v = 0; v < alive.size(); ++v)
    if (attr[v]) rest[v] = false;
  zielonka(g, adj, priority, rest, winner);

  bool opp_nonempty = false;
  for (size_t v = 0; v < alive.size(); ++v)
    if (rest[v] && winner[v] == opponent(sigma)) opp_nonempty = true;

  if (!opp_nonempty) {
    for (size_t v = 0; v < alive.size(); ++v)
      if (alive[v]) winner[v] = sigma;
    return;
  }

  std::vector<bool> opp_base(alive.size(), false);
  for (size_t v = 0; v < alive.size(); ++v)
    opp_base[v] = rest[v] && winner[v] == opponent(sigma);
  auto opp_attr = attractor(g, adj, opponent(sigma), opp_base, alive);
  std::vector<bool> rest2 = alive;
  for (size_t v = 0; v < alive.size(); ++v)
    if (opp_attr[v]) rest2[v] = false;
  zielonka(g, adj, priority, rest2, winner);
  for (size_t v = 0; v < alive.size(); ++v)
    if (alive[v] && opp_attr[v]) winner[v] = opponent(sigma);
}

// Vertices of `alive` from which Prover can force that an edge of `target`
// (restricted to alive endpoints) is eventually taken. Refuter escaping
// `alive` counts as avoiding the target.
inline std::vector<bool> edge_attractor_prover(const GameArena& g, const AdjacencyView& adj,
                                               const std::vector<bool>& target_edge,
                                               const std::vector<bool>& alive) {
  std::vector<bool> in(g.vertices.size(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t v = 0; v < g.vertices.size(); ++v) {
      if (!alive[v] || in[v]) continue;
      bool attracted;
      if (g.vertices[v].owner == Player::Prover) {
        attracted = false;
        for (int ei : adj.out_edges[v]) {
          const auto& e = g.edges[static_cast<size_t>(ei)];
          if (!alive[static_cast<size_t>(e.to)]) continue;
          if (target_edge[static_cast<size_t>(ei)] || in[static_cast<size_t>(e.to)]) {
            attracted = true;
            break;
          }
        }
      } else {
        attracted = true;
        for (int ei : adj.out_edges[v]) {
          const auto& e = g.edges[static_cast<size_t>(ei)];
          if (!alive[static_cast<size_t>(e.to)]) {
            attracted = false;  // Refuter can leave the subgame
            break;
          }
          if (!target_edge[static_cast<size_t>(ei)] && !in[static_cast<size_t>(e.to)]) {
            attracted = false;
            break;
          }
        }
      }
      if (attracted) {
        in[v] = true;
        changed = true;
      }
    }
  }
  return in;
}

// Refuter attractor used for removals: reaching `base` or leaving `alive`
// both count, since everything outside `alive` is already Refuter-won.
inline std::vector<bool> refuter_removal_attractor(const GameArena& g, const AdjacencyView& adj,
                                                   const std::vector<bool>& base,
                                                   const std::vector<bool>& alive) {
  std::vector<bool> in = base;
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t v = 0; v < g.vertices.size(); ++v) {
      if (!alive[v] || in[v]) continue;
      bool attracted;
      if (g.vertices[v].owner == Player::Refuter) {
        attracted = false;
        for (int ei : adj.out_edges[v]) {
          int w = g.edges[static_cast<size_t>(ei)].to;
          if (!alive[static_cast<size_t>(w)] || in[static_cast<size_t>(w)]) {
            attracted = true;
            break;
          }
        }
      } else {
        attracted = true;
        for (int ei : adj.out_edges[v]) {
          int w = g.edges[static_cast<size_t>(ei)].to;
          if (alive[static_cast<size_t>(w)] && !in[static_cast<size_t>(w)]) {
            attracted = false;
            break;
          }
        }
      }
      if (attracted) {
        in[v] = true;
        changed = true;
      }
    }
  }
  return in;
}

inline void require_valid_arena(const GameArena& g, const char* who) {
  auto diags = validate_arena(g);
  if (!diags.empty())
    throw PreconditionError(std::string(who) + ": malformed arena: " + diags.front().code + ": " +
                            diags.front().message);
}

}  // namespace detail

/// Parity solver: Zielonka's recursive algorithm over a subdivided graph so
/// that the edge priorities become vertex priorities. All arenas this library
/// builds have at most three relevant colors, so the simple algorithm is the
/// right trade-off.
inline std::vector<Player> solve_parity(const GameArena& input) {
  detail::require_valid_arena(input, "solve_parity");
  GameArena g = detail::expand_sinks(input);

  int max_pri = 2;
  for (const auto& e : g.edges) max_pri = std::max(max_pri, e.priority);

  GameArena sub;
  sub.vertices = g.vertices;
  std::vector<int> priority(g.vertices.size(), max_pri);
  for (const auto& e : g.edges) {
    int mid = sub.add_vertex(Player::Prover);
    priority.push_back(e.priority);
    sub.add_edge(e.from, mid);
    sub.add_edge(mid, e.to);
  }

  detail::AdjacencyView adj(sub);
  std::vector<Player> winner(sub.vertices.size(), Player::Prover);
  std::vector<bool> alive(sub.vertices.size(), true);
  detail::zielonka(sub, adj, priority, std::move(alive), winner);
  winner.resize(g.vertices.size());
  return winner;
}

/// Generalized Buchi: Prover wins iff he can force every color set to be hit
/// infinitely often. Nested attractor fixpoint, no counter product.
inline std::vector<Player> solve_generalized_buchi(const GameArena& input) {
  detail::require_valid_arena(input, "solve_generalized_buchi");
  GameArena g = detail::expand_sinks(input);
  detail::AdjacencyView adj(g);
  int k = g.buchi_sets;

  std::vector<bool> alive(g.vertices.size(), true);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < k && !changed; ++i) {
      std::vector<bool> target(g.edges.size(), false);
      for (size_t ei = 0; ei < g.edges.size(); ++ei)
        target[ei] = (g.edges[ei].colors >> i) & 1u;
      auto attr = detail::edge_attractor_prover(g, adj, target, alive);
      std::vector<bool> missed(g.vertices.size(), false);
      bool any = false;
      for (size_t v = 0; v < g.vertices.size(); ++v)
        if (alive[v] && !attr[v]) {
          missed[v] = true;
          any = true;
        }
      if (!any) continue;
      auto removed = detail::refuter_removal_attractor(g, adj, missed, alive);
      for (size_t v = 0; v < g.vertices.size(); ++v)
        if (removed[v]) alive[v] = false;
      changed = true;
    }
  }

  std::vector<Player> winner(g.vertices.size(), Player::Refuter);
  for (size_t v = 0; v < g.vertices.size(); ++v)
    if (alive[v]) winner[v] = Player::Prover;
  return winner;
}

/// Buchi is the one-set case of the generalized solver.
inline std::vector<Player> solve_buchi(const GameArena& input) {
  detail::require_valid_arena(input, "solve_buchi");
  GameArena g = input;
  g.buchi_sets = 1;
  g.condition = WinCondition::GeneralizedBuchi;
  return solve_generalized_buchi(g);
}

inline std::vector<Player> solve(const GameArena& g) {
  switch (g.condition) {
    case WinCondition::Parity: return solve_parity(g);
    case WinCondition::Buchi: return solve_buchi(g);
    case WinCondition::GeneralizedBuchi: return solve_generalized_buchi(g);
  }
  throw std::logic_error("unknown win condition");
}

}  // namespace layered
