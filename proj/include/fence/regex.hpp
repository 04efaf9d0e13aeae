#pragma once

#include <bitset>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fence {

class RegexError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thompson-NFA matcher for the token-definition subset: literals, `.`,
// bracket classes with ranges and negation, `\d \w \s` (and negations),
// escapes, groups, `|`, `*`, `+`, `?`. Matching is byte-wise.
class Regex {
 public:
  static Regex compile(std::string_view pattern);

  // Length of the longest match anchored at `offset`, if any (may be 0).
  std::optional<std::size_t> longestPrefix(std::string_view text, std::size_t offset) const;
  bool fullMatch(std::string_view text) const;

  const std::string& pattern() const { return pattern_; }

 private:
  using CharSet = std::bitset<256>;
  struct State {
    enum class Kind { chars, split, accept } kind = Kind::accept;
    CharSet set;
    std::size_t next = 0;
    std::size_t alt = 0;
  };

  class Compiler;

  void addClosure(std::vector<std::size_t>& list, std::vector<std::size_t>& mark, std::size_t gen,
                  std::size_t state) const;

  std::string pattern_;
  std::vector<State> states_;
  std::size_t startState_ = 0;
};

}  // namespace fence
