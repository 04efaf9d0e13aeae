#include <cctype>
#include <set>
#include <sstream>

#include "fence/grammar.hpp"

namespace fence {

namespace {

constexpr std::string_view kDefaultSkip = "[ \\t\\r\\n]+";

struct Position {
  std::size_t line = 1;
  std::size_t column = 1;
};

class Reader {
 public:
  explicit Reader(std::string_view src) : src_(src) {}

  Position position() const { return pos_; }
  bool atEnd() {
    skipBlank();
    return i_ >= src_.size();
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw GrammarError(message, pos_.line, pos_.column);
  }
  [[noreturn]] void fail(const std::string& message, Position at) const {
    throw GrammarError(message, at.line, at.column);
  }

  char peek() {
    skipBlank();
    return i_ < src_.size() ? src_[i_] : '\0';
  }

  bool accept(std::string_view literal) {
    skipBlank();
    if (src_.substr(i_, literal.size()) != literal) return false;
    advance(literal.size());
    return true;
  }

  void expect(std::string_view literal) {
    if (!accept(literal)) fail("expected '" + std::string(literal) + "'");
  }

  std::string identifier() {
    skipBlank();
    std::size_t j = i_;
    if (j < src_.size() && (std::isalpha(static_cast<unsigned char>(src_[j])) || src_[j] == '_')) {
      ++j;
      while (j < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_')) ++j;
    }
    if (j == i_) fail("expected identifier");
    std::string out(src_.substr(i_, j - i_));
    advance(j - i_);
    return out;
  }

  // `/.../` with `\/` allowed inside; backslashes are kept for the regex
  // compiler.
  std::string regex() {
    skipBlank();
    if (i_ >= src_.size() || src_[i_] != '/') fail("expected /regex/");
    advance(1);
    std::string out;
    while (i_ < src_.size() && src_[i_] != '/') {
      if (src_[i_] == '\n') fail("unterminated regex");
      if (src_[i_] == '\\' && i_ + 1 < src_.size()) {
        out += src_[i_];
        advance(1);
      }
      out += src_[i_];
      advance(1);
    }
    if (i_ >= src_.size()) fail("unterminated regex");
    advance(1);
    if (out.empty()) fail("empty regex");
    return out;
  }

 private:
  void advance(std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i_) {
      if (src_[i_] == '\n') {
        ++pos_.line;
        pos_.column = 1;
      } else {
        ++pos_.column;
      }
    }
  }

  void skipBlank() {
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (c == '#') {
        while (i_ < src_.size() && src_[i_] != '\n') advance(1);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t i_ = 0;
  Position pos_;
};

struct RawProduction {
  std::string label;
  std::string lhs;
  std::vector<std::pair<std::string, Position>> rhs;
  std::optional<Associativity> assoc;
};

struct RawPrefer {
  bool select = true;
  std::string preferred, other;
  Position at;
};

}  // namespace

Grammar parseGrammarText(std::string_view source) {
  Reader in(source);
  std::vector<std::pair<std::string, std::string>> tokens;
  std::set<std::string> tokenNames;
  std::optional<std::string> skip;
  std::optional<std::pair<std::string, Position>> start;
  std::vector<RawProduction> productions;
  std::vector<RawPrefer> prefers;

  auto readProduction = [&](std::optional<Associativity> assoc) {
    RawProduction p;
    p.assoc = assoc;
    if (in.accept("[")) {
      p.label = in.identifier();
      in.expect("]");
    }
    p.lhs = in.identifier();
    in.expect("::=");
    while (!in.accept(";")) {
      if (in.atEnd()) in.fail("unterminated production (missing ';')");
      auto at = in.position();
      p.rhs.emplace_back(in.identifier(), at);
    }
    productions.push_back(std::move(p));
  };

  while (!in.atEnd()) {
    auto at = in.position();
    if (in.accept("%token")) {
      auto nameAt = in.position();
      auto name = in.identifier();
      if (!tokenNames.insert(name).second) in.fail("duplicate token name '" + name + "'", nameAt);
      tokens.emplace_back(name, in.regex());
    } else if (in.accept("%skip")) {
      skip = in.regex();
    } else if (in.accept("%start")) {
      auto nameAt = in.position();
      start = {in.identifier(), nameAt};
    } else if (in.accept("%assoc")) {
      auto kind = in.identifier();
      Associativity a;
      if (kind == "left") a = Associativity::left_to_right;
      else if (kind == "right") a = Associativity::right_to_left;
      else if (kind == "none") a = Associativity::non_associative;
      else in.fail("associativity must be left, right or none", at);
      readProduction(a);
    } else if (in.accept("%prefer")) {
      RawPrefer pr;
      pr.at = at;
      auto kind = in.identifier();
      if (kind == "select") pr.select = true;
      else if (kind == "compose") pr.select = false;
      else in.fail("%prefer expects 'select' or 'compose'", at);
      pr.preferred = in.identifier();
      if (in.identifier() != "over") in.fail("expected 'over'");
      pr.other = in.identifier();
      in.expect(";");
      prefers.push_back(std::move(pr));
    } else if (in.peek() == '%') {
      in.fail("unknown directive");
    } else {
      readProduction(std::nullopt);
    }
  }

  // Resolve names here so errors carry positions; the builder re-checks.
  std::set<std::string> lhsNames;
  for (auto& p : productions) lhsNames.insert(p.lhs);
  for (auto& p : productions) {
    if (tokenNames.count(p.lhs)) in.fail("'" + p.lhs + "' is both a token and a nonterminal");
    for (auto& [name, pos] : p.rhs)
      if (!tokenNames.count(name) && !lhsNames.count(name))
        in.fail("unknown symbol '" + name + "'", pos);
  }
  if (!start) in.fail("start symbol missing (no %start declaration)");
  if (!lhsNames.count(start->first))
    in.fail("start symbol '" + start->first + "' has no productions", start->second);

  GrammarBuilder b;
  for (auto& [name, pattern] : tokens) b.token(name, pattern);
  if (skip) b.skip(*skip);
  b.start(start->first);
  std::map<std::string, ProductionId> labels;
  for (auto& p : productions) {
    std::vector<std::string> rhs;
    for (auto& [name, _] : p.rhs) rhs.push_back(name);
    auto id = b.production(p.lhs, std::move(rhs), p.label);
    if (!p.label.empty() && !labels.emplace(p.label, id).second)
      in.fail("duplicate production label '" + p.label + "'");
    if (p.assoc) b.associativity(id, *p.assoc);
  }
  for (auto& pr : prefers) {
    auto a = labels.find(pr.preferred), o = labels.find(pr.other);
    if (a == labels.end()) in.fail("unknown production label '" + pr.preferred + "'", pr.at);
    if (o == labels.end()) in.fail("unknown production label '" + pr.other + "'", pr.at);
    if (pr.select) b.preferSelect(a->second, o->second);
    else b.preferCompose(a->second, o->second);
  }
  return b.build();
}

std::string writeGrammarText(const Grammar& g) {
  std::ostringstream out;
  auto regex = [](const std::string& pattern) {
    std::string s = "/";
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      if (pattern[i] == '\\' && i + 1 < pattern.size()) {
        s += pattern[i];
        s += pattern[++i];
      } else if (pattern[i] == '/') {
        s += "\\/";
      } else {
        s += pattern[i];
      }
    }
    return s + "/";
  };
  for (auto& t : g.tokens()) out << "%token " << g.symbol(t.symbol).name << ' ' << regex(t.pattern) << '\n';
  if (g.skipPattern() != kDefaultSkip) out << "%skip " << regex(g.skipPattern()) << '\n';
  out << "%start " << g.symbol(g.start()).name << '\n';

  const auto& c = g.constraints();
  std::set<ProductionId> referenced;
  for (auto* order : {&c.selection, &c.composition})
    for (auto [a, b] : order->declared()) referenced.insert({a, b});
  auto labelOf = [&](ProductionId id) {
    const auto& p = g.production(id);
    return p.label.empty() ? "_p" + std::to_string(id) : p.label;
  };

  for (auto& p : g.productions()) {
    if (auto it = c.associativity.find(p.id); it != c.associativity.end())
      out << "%assoc " << toString(it->second) << ' ';
    if (!p.label.empty() || referenced.count(p.id)) out << '[' << labelOf(p.id) << "] ";
    out << g.symbol(p.lhs).name << " ::=";
    for (auto r : p.rhs) out << ' ' << g.symbol(r).name;
    out << " ;\n";
  }
  for (auto [a, b] : c.selection.declared())
    out << "%prefer select " << labelOf(a) << " over " << labelOf(b) << " ;\n";
  for (auto [a, b] : c.composition.declared())
    out << "%prefer compose " << labelOf(a) << " over " << labelOf(b) << " ;\n";
  return out.str();
}

}  // namespace fence
