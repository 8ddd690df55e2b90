#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace layered {

/// Thrown when an input document cannot be turned into an automaton.
class ParseError : public std::runtime_error {
public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a checked operation precondition fails (the message names a witness).
class PreconditionError : public std::invalid_argument {
public:
  explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when a desk-scale oracle exceeds its configured cap.
class ResourceError : public std::runtime_error {
public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// One validation finding. `code` is a stable machine-readable tag.
struct Diagnostic {
  std::string code;
  std::string message;
};

// Ordered finite set of symbol identifiers. Symbol order is the global
// tie-breaking source for every deterministic output of the library.
class Alphabet {
public:
  explicit Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    std::sort(symbols_.begin(), symbols_.end());
    if (symbols_.empty())
      throw ParseError("alphabet must be non-empty");
    if (std::adjacent_find(symbols_.begin(), symbols_.end()) != symbols_.end())
      throw ParseError("alphabet contains a duplicate symbol");
  }

  int size() const { return static_cast<int>(symbols_.size()); }
  const std::string& symbol(int i) const { return symbols_[static_cast<size_t>(i)]; }
  const std::vector<std::string>& symbols() const { return symbols_; }

  std::optional<int> index(std::string_view s) const {
    auto it = std::lower_bound(symbols_.begin(), symbols_.end(), s);
    if (it == symbols_.end() || *it != s) return std::nullopt;
    return static_cast<int>(it - symbols_.begin());
  }

  int index_or_throw(std::string_view s) const {
    if (auto i = index(s)) return *i;
    throw std::invalid_argument("unknown symbol '" + std::string(s) + "'");
  }

  /// Splits `text` into symbols. If every symbol is a single character and the
  /// text contains no separators, it is read character by character; otherwise
  /// it is split on spaces and commas.
  std::vector<std::string> split_word(std::string_view text) const {
    std::vector<std::string> out;
    if (text.find(' ') == std::string_view::npos && text.find(',') == std::string_view::npos) {
      bool single = std::all_of(symbols_.begin(), symbols_.end(),
                                [](const std::string& s) { return s.size() == 1; });
      if (single) {
        for (char c : text) out.emplace_back(1, c);
        return out;
      }
    }
    std::string cur;
    for (char c : text) {
      if (c == ' ' || c == ',') {
        if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
  }

  std::vector<int> parse_word(std::string_view text) const {
    std::vector<int> out;
    for (const auto& s : split_word(text)) out.push_back(index_or_throw(s));
    return out;
  }

  bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }

private:
  std::vector<std::string> symbols_;
};

/// Ultimately periodic word u.v^omega given by prefix and non-empty period.
struct UpWord {
  std::vector<std::string> prefix;
  std::vector<std::string> period;
};

inline UpWord make_up_word(const Alphabet& sigma, std::string_view prefix, std::string_view period) {
  UpWord w{sigma.split_word(prefix), sigma.split_word(period)};
  if (w.period.empty()) throw std::invalid_argument("up-word period must be non-empty");
  return w;
}

inline std::string word_text(const std::vector<std::string>& w, const char* sep = "") {
  std::string out;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) out += sep;
    out += w[i];
  }
  return out;
}

namespace detail {

// Resolves an up-word against an alphabet once, before the hot loops.
struct IndexedUpWord {
  std::vector<int> prefix;
  std::vector<int> period;
};

inline IndexedUpWord index_up_word(const Alphabet& sigma, const UpWord& w) {
  if (w.period.empty()) throw std::invalid_argument("up-word period must be non-empty");
  IndexedUpWord out;
  for (const auto& s : w.prefix) out.prefix.push_back(sigma.index_or_throw(s));
  for (const auto& s : w.period) out.period.push_back(sigma.index_or_throw(s));
  return out;
}

// Letter at absolute position i of u.v^omega.
inline int up_letter(const IndexedUpWord& w, size_t i) {
  if (i < w.prefix.size()) return w.prefix[i];
  return w.period[(i - w.prefix.size()) % w.period.size()];
}

// Period phase at absolute position i, or -1 while still inside the prefix.
inline int up_phase(const IndexedUpWord& w, size_t i) {
  if (i < w.prefix.size()) return -1;
  return static_cast<int>((i - w.prefix.size()) % w.period.size());
}

}  // namespace detail
}  // namespace layered
