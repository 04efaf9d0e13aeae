#include "fence/regex.hpp"

#include <cctype>

namespace fence {

namespace {
constexpr std::size_t kDangling = static_cast<std::size_t>(-1);
}

class Regex::Compiler {
 public:
  Compiler(std::string_view src, std::vector<State>& states) : src_(src), states_(states) {}

  // Out-edges left open by a fragment: (state index, true = alt slot).
  using Outs = std::vector<std::pair<std::size_t, bool>>;
  struct Fragment {
    std::size_t start;
    Outs outs;
  };

  Fragment parse() {
    auto f = alternation();
    if (i_ != src_.size()) fail("unexpected ')'");
    return f;
  }

  void patch(const Outs& outs, std::size_t target) {
    for (auto [s, alt] : outs) (alt ? states_[s].alt : states_[s].next) = target;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw RegexError("regex /" + std::string(src_) + "/ at " + std::to_string(i_) + ": " + what);
  }

  std::size_t add(State s) {
    states_.push_back(s);
    return states_.size() - 1;
  }

  Fragment chars(const CharSet& set) {
    auto s = add({State::Kind::chars, set, kDangling, kDangling});
    return {s, {{s, false}}};
  }

  Fragment empty() {
    auto s = add({State::Kind::split, {}, kDangling, kDangling});
    return {s, {{s, false}, {s, true}}};
  }

  Fragment alternation() {
    auto f = concatenation();
    while (i_ < src_.size() && src_[i_] == '|') {
      ++i_;
      auto g = concatenation();
      auto s = add({State::Kind::split, {}, f.start, g.start});
      Outs outs = f.outs;
      outs.insert(outs.end(), g.outs.begin(), g.outs.end());
      f = {s, std::move(outs)};
    }
    return f;
  }

  Fragment concatenation() {
    std::optional<Fragment> acc;
    while (i_ < src_.size() && src_[i_] != '|' && src_[i_] != ')') {
      auto f = repetition();
      if (!acc) {
        acc = std::move(f);
      } else {
        patch(acc->outs, f.start);
        acc->outs = std::move(f.outs);
      }
    }
    return acc ? *acc : empty();
  }

  Fragment repetition() {
    auto f = atom();
    while (i_ < src_.size() && (src_[i_] == '*' || src_[i_] == '+' || src_[i_] == '?')) {
      char op = src_[i_++];
      auto s = add({State::Kind::split, {}, f.start, kDangling});
      if (op == '*') {
        patch(f.outs, s);
        f = {s, {{s, true}}};
      } else if (op == '+') {
        patch(f.outs, s);
        f = {f.start, {{s, true}}};
      } else {
        Outs outs = f.outs;
        outs.emplace_back(s, true);
        f = {s, std::move(outs)};
      }
    }
    return f;
  }

  Fragment atom() {
    char c = src_[i_];
    if (c == '*' || c == '+' || c == '?') fail("quantifier without operand");
    if (c == '(') {
      ++i_;
      if (src_.substr(i_, 2) == "?:") i_ += 2;
      auto f = alternation();
      if (i_ >= src_.size() || src_[i_] != ')') fail("missing ')'");
      ++i_;
      return f;
    }
    if (c == '[') return chars(bracket());
    if (c == '.') {
      ++i_;
      CharSet set;
      set.set();
      set.reset('\n');
      return chars(set);
    }
    if (c == '\\') {
      ++i_;
      return chars(escape());
    }
    ++i_;
    CharSet set;
    set.set(static_cast<unsigned char>(c));
    return chars(set);
  }

  // Called after the backslash.
  CharSet escape() {
    if (i_ >= src_.size()) fail("trailing backslash");
    char c = src_[i_++];
    CharSet set;
    auto fill = [&](auto pred) {
      for (int b = 0; b < 256; ++b)
        if (pred(static_cast<unsigned char>(b))) set.set(b);
    };
    switch (c) {
      case 'd': fill([](unsigned char b) { return std::isdigit(b); }); break;
      case 'D': fill([](unsigned char b) { return !std::isdigit(b); }); break;
      case 'w': fill([](unsigned char b) { return std::isalnum(b) || b == '_'; }); break;
      case 'W': fill([](unsigned char b) { return !(std::isalnum(b) || b == '_'); }); break;
      case 's': fill([](unsigned char b) { return std::isspace(b); }); break;
      case 'S': fill([](unsigned char b) { return !std::isspace(b); }); break;
      case 'n': set.set('\n'); break;
      case 't': set.set('\t'); break;
      case 'r': set.set('\r'); break;
      case 'f': set.set('\f'); break;
      case 'v': set.set('\v'); break;
      default:
        if (std::isalnum(static_cast<unsigned char>(c))) fail(std::string("unsupported escape \\") + c);
        set.set(static_cast<unsigned char>(c));
    }
    return set;
  }

  CharSet bracket() {
    ++i_;  // '['
    bool negate = false;
    if (i_ < src_.size() && src_[i_] == '^') {
      negate = true;
      ++i_;
    }
    CharSet set;
    bool first = true;
    while (i_ < src_.size() && (src_[i_] != ']' || first)) {
      first = false;
      CharSet lo;
      int loChar = -1;
      if (src_[i_] == '\\') {
        ++i_;
        lo = escape();
        if (lo.count() == 1)
          for (int b = 0; b < 256; ++b)
            if (lo.test(b)) loChar = b;
      } else {
        loChar = static_cast<unsigned char>(src_[i_++]);
        lo.set(loChar);
      }
      if (loChar >= 0 && i_ + 1 < src_.size() && src_[i_] == '-' && src_[i_ + 1] != ']') {
        ++i_;
        int hiChar;
        if (src_[i_] == '\\') {
          ++i_;
          auto hi = escape();
          if (hi.count() != 1) fail("class escape cannot end a range");
          hiChar = -1;
          for (int b = 0; b < 256; ++b)
            if (hi.test(b)) hiChar = b;
        } else {
          hiChar = static_cast<unsigned char>(src_[i_++]);
        }
        if (hiChar < loChar) fail("inverted range");
        for (int b = loChar; b <= hiChar; ++b) set.set(b);
      } else {
        set |= lo;
      }
    }
    if (i_ >= src_.size()) fail("missing ']'");
    ++i_;
    if (negate) set.flip();
    return set;
  }

  std::string_view src_;
  std::vector<State>& states_;
  std::size_t i_ = 0;
};

Regex Regex::compile(std::string_view pattern) {
  Regex r;
  r.pattern_ = std::string(pattern);
  Compiler c(pattern, r.states_);
  auto f = c.parse();
  auto accept = r.states_.size();
  r.states_.push_back({State::Kind::accept, {}, kDangling, kDangling});
  c.patch(f.outs, accept);
  r.startState_ = f.start;
  return r;
}

void Regex::addClosure(std::vector<std::size_t>& list, std::vector<std::size_t>& mark, std::size_t gen,
                       std::size_t state) const {
  std::vector<std::size_t> stack{state};
  while (!stack.empty()) {
    auto s = stack.back();
    stack.pop_back();
    if (mark[s] == gen) continue;
    mark[s] = gen;
    if (states_[s].kind == State::Kind::split) {
      stack.push_back(states_[s].alt);
      stack.push_back(states_[s].next);
    } else {
      list.push_back(s);
    }
  }
}

std::optional<std::size_t> Regex::longestPrefix(std::string_view text, std::size_t offset) const {
  std::vector<std::size_t> current, next;
  std::vector<std::size_t> mark(states_.size(), 0);
  std::size_t gen = 1;
  addClosure(current, mark, gen, startState_);
  std::optional<std::size_t> best;
  for (std::size_t i = offset;; ++i) {
    for (auto s : current)
      if (states_[s].kind == State::Kind::accept) best = i - offset;
    if (i >= text.size() || current.empty()) break;
    auto c = static_cast<unsigned char>(text[i]);
    next.clear();
    ++gen;
    for (auto s : current)
      if (states_[s].kind == State::Kind::chars && states_[s].set.test(c))
        addClosure(next, mark, gen, states_[s].next);
    std::swap(current, next);
  }
  return best;
}

bool Regex::fullMatch(std::string_view text) const {
  auto n = longestPrefix(text, 0);
  return n && *n == text.size();
}

}  // namespace fence
