#pragma once

#include <random>

#include "layered/automaton.hpp"

namespace layered {

/// One state over the alphabet {1..d}; reading letter x produces priority x.
inline DeterministicParityAutomaton gen_parity(int d) {
  if (d < 1) throw std::invalid_argument("gen_parity: d must be at least 1");
  std::vector<std::string> sigma;
  for (int x = 1; x <= d; ++x) sigma.push_back(std::to_string(x));
  std::vector<DpaTransition> ts;
  for (int x = 1; x <= d; ++x) ts.push_back({"q", std::to_string(x), "q", x});
  return DeterministicParityAutomaton(Alphabet(sigma), {"q"}, std::move(ts), "q", d);
}

/// Two chains of states under a complete root: a_x loops on {a_x..a_k, c} and
/// the b-strand mirrors it. The deepest states loop on c alone.
inline LayeredAutomaton gen_two_strand(int k) {
  if (k < 1) throw std::invalid_argument("gen_two_strand: k must be at least 1");
  std::vector<std::string> sigma{"c"};
  for (int i = 1; i <= k; ++i) {
    sigma.push_back("a" + std::to_string(i));
    sigma.push_back("b" + std::to_string(i));
  }

  std::vector<TransitionSystem> layers;
  std::vector<std::map<std::string, std::string>> parents;
  TransitionSystem t1;
  t1.states = {"e"};
  for (const auto& s : sigma) t1.transitions.push_back({"e", s, "e"});
  layers.push_back(std::move(t1));

  for (int x = 2; x <= k + 1; ++x) {
    TransitionSystem ts;
    std::map<std::string, std::string> pm;
    for (char strand : {'a', 'b'}) {
      std::string me = strand + std::to_string(x);
      ts.states.push_back(me);
      pm[me] = x == 2 ? std::string("e") : strand + std::to_string(x - 1);
      ts.transitions.push_back({me, "c", me});
      for (int i = x; i <= k; ++i)
        ts.transitions.push_back({me, strand + std::to_string(i), me});
    }
    layers.push_back(std::move(ts));
    parents.push_back(std::move(pm));
  }
  return LayeredAutomaton(Alphabet(sigma), std::move(layers), std::move(parents), "e");
}

/// Seeded complete random automaton; identical seeds give identical output.
inline DeterministicParityAutomaton gen_random_dpa(uint64_t seed, int states, int alphabet_size,
                                                   int max_priority) {
  if (states < 1 || alphabet_size < 1 || max_priority < 1)
    throw std::invalid_argument("gen_random_dpa: parameters must be positive");
  std::mt19937_64 rng(seed);
  std::vector<std::string> sigma;
  for (int i = 0; i < alphabet_size; ++i) sigma.emplace_back(1, static_cast<char>('a' + i % 26));
  if (alphabet_size > 26) {
    sigma.clear();
    for (int i = 0; i < alphabet_size; ++i) sigma.push_back("x" + std::to_string(i));
  }
  std::vector<std::string> names;
  for (int q = 0; q < states; ++q) names.push_back("s" + std::to_string(q));
  std::vector<DpaTransition> ts;
  for (int q = 0; q < states; ++q)
    for (int s = 0; s < alphabet_size; ++s) {
      int to = static_cast<int>(rng() % static_cast<uint64_t>(states));
      int pri = 1 + static_cast<int>(rng() % static_cast<uint64_t>(max_priority));
      ts.push_back({names[static_cast<size_t>(q)], sigma[static_cast<size_t>(s)],
                    names[static_cast<size_t>(to)], pri});
    }
  return DeterministicParityAutomaton(Alphabet(sigma), std::move(names), std::move(ts), "s0",
                                      max_priority);
}

// ---------------------------------------------------------------------------
// The bundled example languages.
//   L1: finitely many cc and infinitely many aa            (over a, b, c)
//   L2: (Sigma^2)* (aa + bb)^omega                         (over a, b)
//   L3: finitely many aba, infinitely many a and b         (over a, b)
//   L4: at least one letter occurs only finitely often     (over a, b, c)
// ---------------------------------------------------------------------------

inline DeterministicParityAutomaton fixture_dpa(const std::string& name) {
  if (name == "L1") {
    // states remember the previous letter; cc emits 1, aa emits 2
    std::vector<DpaTransition> ts;
    auto tgt = [](const std::string& letter) { return letter == "b" ? "se" : "s" + letter; };
    for (std::string from : {"se", "sa", "sc"})
      for (std::string letter : {"a", "b", "c"}) {
        int pri = 3;
        if (from == "sa" && letter == "a") pri = 2;
        if (from == "sc" && letter == "c") pri = 1;
        ts.push_back({from, letter, tgt(letter), pri});
      }
    return DeterministicParityAutomaton(Alphabet({"a", "b", "c"}), {"se", "sa", "sc"},
                                        std::move(ts), "se", 3);
  }
  if (name == "L2") {
    // even positions open a pair, odd positions close it; unequal pairs emit 1
    std::vector<DpaTransition> ts = {
        {"even", "a", "odda", 2}, {"even", "b", "oddb", 2}, {"odda", "a", "even", 2},
        {"odda", "b", "even", 1}, {"oddb", "a", "even", 1}, {"oddb", "b", "even", 2},
    };
    return DeterministicParityAutomaton(Alphabet({"a", "b"}), {"even", "odda", "oddb"},
                                        std::move(ts), "even", 2);
  }
  if (name == "L3") {
    // track progress towards aba; letter changes emit 2, aba emits 1
    std::vector<DpaTransition> ts = {
        {"s0", "a", "pa", 3},  {"s0", "b", "pb", 3},  {"pa", "a", "pa", 3},
        {"pa", "b", "pab", 2}, {"pab", "a", "pa", 1}, {"pab", "b", "pb", 3},
        {"pb", "a", "pa", 2},  {"pb", "b", "pb", 3},
    };
    return DeterministicParityAutomaton(Alphabet({"a", "b"}), {"s0", "pa", "pab", "pb"},
                                        std::move(ts), "s0", 3);
  }
  if (name == "L4") {
    // collect letters; completing {a,b,c} emits 1 and resets
    std::vector<std::string> subsets{"v", "va", "vb", "vc", "vab", "vac", "vbc"};
    auto encode = [](std::set<char> s) {
      std::string out = "v";
      for (char c : s) out.push_back(c);
      return out;
    };
    std::vector<DpaTransition> ts;
    for (const auto& from : subsets) {
      std::set<char> have(from.begin() + 1, from.end());
      for (char letter : {'a', 'b', 'c'}) {
        auto next = have;
        next.insert(letter);
        if (next.size() == 3)
          ts.push_back({from, std::string(1, letter), "v", 1});
        else
          ts.push_back({from, std::string(1, letter), encode(next), 2});
      }
    }
    return DeterministicParityAutomaton(Alphabet({"a", "b", "c"}), subsets, std::move(ts), "v", 2);
  }
  throw std::invalid_argument("unknown fixture '" + name + "' (expected L1..L4)");
}

/// A three-layer automaton over {a, b} that is deliberately inconsistent:
/// the childless even-layer state p strongly accepts a^omega while the
/// childless odd-layer state t strongly rejects every word.
inline LayeredAutomaton fixture_inconsistent() {
  TransitionSystem t1;
  t1.states = {"r"};
  t1.transitions = {{"r", "a", "r"}, {"r", "b", "r"}};
  TransitionSystem t2;
  t2.states = {"p", "q"};
  t2.transitions = {{"p", "a", "p"}, {"q", "a", "q"}, {"q", "b", "q"}};
  TransitionSystem t3;
  t3.states = {"t"};
  t3.transitions = {{"t", "a", "t"}, {"t", "b", "t"}};
  return LayeredAutomaton(Alphabet({"a", "b"}), {t1, t2, t3},
                          {{{"p", "r"}, {"q", "r"}}, {{"t", "q"}}}, "r");
}

// ---------------------------------------------------------------------------
// Language oracles for the fixtures, evaluated directly on the up-word.
// ---------------------------------------------------------------------------

namespace detail {

// A factor occurs infinitely often in u.v^omega iff it occurs in v^k starting
// within the first |v| positions, for v^k long enough to cover the factor.
inline bool factor_recurs(const std::vector<std::string>& period,
                          const std::vector<std::string>& factor) {
  std::vector<std::string> window = period;
  while (window.size() < period.size() + factor.size()) window.insert(window.end(), period.begin(), period.end());
  for (size_t start = 0; start < period.size(); ++start) {
    if (start + factor.size() > window.size()) break;
    if (std::equal(factor.begin(), factor.end(), window.begin() + static_cast<long>(start)))
      return true;
  }
  return false;
}

inline bool letter_recurs(const std::vector<std::string>& period, const std::string& letter) {
  return std::find(period.begin(), period.end(), letter) != period.end();
}

}  // namespace detail

inline bool fixture_oracle(const std::string& name, const UpWord& w) {
  if (w.period.empty()) throw std::invalid_argument("up-word period must be non-empty");
  if (name == "L1")
    return !detail::factor_recurs(w.period, {"c", "c"}) && detail::factor_recurs(w.period, {"a", "a"});
  if (name == "L2") {
    // some even cut beyond the prefix from which every aligned pair is equal
    auto at = [&](size_t i) -> const std::string& {
      if (i < w.prefix.size()) return w.prefix[i];
      return w.period[(i - w.prefix.size()) % w.period.size()];
    };
    for (size_t cut = w.prefix.size(); cut < w.prefix.size() + 2 * w.period.size(); ++cut) {
      if (cut % 2 != 0) continue;
      bool ok = true;
      for (size_t j = 0; j < w.period.size() && ok; ++j)
        ok = at(cut + 2 * j) == at(cut + 2 * j + 1);
      if (ok) return true;
    }
    return false;
  }
  if (name == "L3")
    return !detail::factor_recurs(w.period, {"a", "b", "a"}) &&
           detail::letter_recurs(w.period, "a") && detail::letter_recurs(w.period, "b");
  if (name == "L4")
    return !detail::letter_recurs(w.period, "a") || !detail::letter_recurs(w.period, "b") ||
           !detail::letter_recurs(w.period, "c");
  throw std::invalid_argument("unknown fixture '" + name + "' (expected L1..L4)");
}

}  // namespace layered
