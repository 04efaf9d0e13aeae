#pragma once

// Grammars and inputs shared by the unit, property and acceptance tests.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fence/grammar.hpp"

namespace fence::fixtures {

inline const char* kAmpersandGrammar = R"(
%token Integer /(-|\+)?[0-9]+/
%token Real /(-|\+)?[0-9]+\.[0-9]+/
%token Point /\./
%token Slash /\//
%token Ampersand /\&/
%start E
E ::= A B ;
A ::= Ampersand Real Ampersand ;
B ::= Slash Integer Point Integer Slash ;
)";

inline const char* kAmpersandInput = "&5.2& /25.20/";

inline const char* kArithmetic = R"(
%token int /[0-9]+/
%token plus /\+/
%start E
[add] E ::= E plus E ;
[num] E ::= int ;
)";

inline const char* kArithmeticLeft = R"(
%token int /[0-9]+/
%token plus /\+/
%start E
%assoc left [add] E ::= E plus E ;
[num] E ::= int ;
)";

// Unambiguous left-recursive expression grammar.
inline const char* kExpression = R"(
%token int /[0-9]+/
%token plus /\+/
%token times /\*/
%start E
E ::= E plus T ;
E ::= T ;
T ::= T times int ;
T ::= int ;
)";

inline const char* kDenseAmbiguous = R"(
%token a /a/
%start S
S ::= S S ;
S ::= a ;
)";

inline const char* kDanglingElse = R"(
%token If /if/
%token Else /else/
%token Expr /expr[0-9]*/
%token Sent /sent[0-9]*/
%start Sentence
[ifthen] Sentence ::= If Expr Sentence ;
[ifelse] Sentence ::= If Expr Sentence Else Sentence ;
[simple] Sentence ::= Sent ;
%prefer compose ifelse over ifthen ;
)";

inline const char* kOutputCall = R"(
%token Ident /[A-Za-z_][A-Za-z0-9_]*/
%token LParen /\(/
%token RParen /\)/
%token Semi /;/
%start Statement
Statement ::= OutputStatement ;
Statement ::= FunctionCall ;
[output] OutputStatement ::= Ident LParen Ident RParen Semi ;
[call] FunctionCall ::= Ident LParen Ident RParen Semi ;
%prefer select output over call ;
)";

inline const char* kEpsilon = R"(
%token b /b/
%start S
S ::= A b ;
A ::= ;
)";

inline const char* kCyclic = R"(
%token c /c/
%start A
A ::= c ;
A ::= B ;
B ::= A ;
)";

inline const char* kSingle = R"(
%token a /a/
%start S
S ::= a ;
)";

inline std::string chain(std::size_t operands, const std::string& op = "+") {
  std::string s;
  for (std::size_t i = 0; i < operands; ++i) {
    if (i) s += op;
    s += std::to_string(i % 10);
  }
  return s;
}

inline std::uint64_t catalan(unsigned n) {
  std::vector<std::uint64_t> c(n + 1, 0);
  c[0] = 1;
  for (unsigned i = 1; i <= n; ++i)
    for (unsigned j = 0; j < i; ++j) c[i] += c[j] * c[i - 1 - j];
  return c[n];
}

// Random small grammars over single-letter tokens plus a two-letter token
// that overlaps them, so lattices carry real lexical ambiguity.
struct RandomInstance {
  std::string grammarText;
  std::string input;
};

class RandomSuite {
 public:
  explicit RandomSuite(std::uint32_t seed) : rng_(seed) {}

  RandomInstance next(bool withConstraints) {
    const int nonterminals = pick(1, 6);
    const int budget = pick(nonterminals, 10);
    std::vector<std::string> nts, ts = {"a", "b", "c", "ab"};
    for (int i = 0; i < nonterminals; ++i) nts.push_back("N" + std::to_string(i));

    struct Prod {
      int lhs;
      std::vector<std::string> rhs;
    };
    std::vector<Prod> prods;
    for (int i = 0; i < budget; ++i) {
      Prod p{i < nonterminals ? i : pick(0, nonterminals - 1), {}};
      const int roll = pick(0, 99);
      if (roll < 10 && i >= nonterminals) {
        // empty rhs
      } else if (roll < 20) {
        p.rhs.push_back(nts[pick(0, nonterminals - 1)]);  // unit, cycles likely
      } else if (roll < 30 && !prods.empty()) {
        p.rhs = prods[pick(0, int(prods.size()) - 1)].rhs;  // shared rhs for selection
      } else {
        const int len = pick(1, 3);
        for (int k = 0; k < len; ++k)
          p.rhs.push_back(pick(0, 99) < 45 ? nts[pick(0, nonterminals - 1)] : ts[pick(0, int(ts.size()) - 1)]);
      }
      prods.push_back(std::move(p));
    }

    std::string g = "%token a /a/\n%token b /b/\n%token c /c/\n%token ab /ab/\n%start N0\n";
    std::vector<std::string> assoc(prods.size());
    if (withConstraints) {
      const char* kinds[] = {"left", "right", "none"};
      for (auto& a : assoc)
        if (pick(0, 99) < 30) a = kinds[pick(0, 2)];
    }
    for (std::size_t i = 0; i < prods.size(); ++i) {
      if (!assoc[i].empty()) g += "%assoc " + assoc[i] + " ";
      g += "[p" + std::to_string(i) + "] " + nts[prods[i].lhs] + " ::=";
      for (auto& s : prods[i].rhs) g += " " + s;
      g += " ;\n";
    }
    if (withConstraints) {
      // Pairs follow a random ranking so both orders stay acyclic. Selection
      // only bites on identical rhs, so such pairs are favoured.
      for (const char* kind : {"select", "compose"}) {
        std::vector<int> order(prods.size()), rank(prods.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = int(i);
        std::shuffle(order.begin(), order.end(), rng_);
        for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = int(i);
        auto declare = [&](std::size_t x, std::size_t y) {
          if (rank[x] > rank[y]) std::swap(x, y);
          g += std::string("%prefer ") + kind + " p" + std::to_string(x) + " over p" + std::to_string(y) + " ;\n";
        };
        if (kind[0] == 's')
          for (std::size_t x = 0; x < prods.size(); ++x)
            for (std::size_t y = x + 1; y < prods.size(); ++y)
              if (prods[x].rhs == prods[y].rhs && pick(0, 99) < 70) declare(x, y);
        const int pairs = pick(0, 3);
        for (int k = 0; k < pairs && prods.size() > 1; ++k) {
          const int x = pick(0, int(prods.size()) - 1);
          int y = pick(0, int(prods.size()) - 2);
          if (y >= x) ++y;
          declare(x, y);
        }
      }
    }

    // Most inputs are sampled from the grammar so acceptance is common.
    std::string input;
    for (int attempt = 0; attempt < 6 && input.empty() && pick(0, 4) != 0; ++attempt) {
      std::vector<std::string> out;
      if (sample(prods, nts, 0, 0, out) && out.size() <= 12)
        for (auto& t : out) input += t;
    }
    if (input.empty() || input.size() > 12) {
      input.clear();
      const int len = pick(1, 8);
      for (int i = 0; i < len; ++i) input += "abc"[pick(0, 2)];
    }
    return {g, input};
  }

 private:
  template <class Prods>
  bool sample(const Prods& prods, const std::vector<std::string>& nts, int nt, int depth,
              std::vector<std::string>& out) {
    if (depth > 6 || out.size() > 12) return false;
    std::vector<std::size_t> options;
    for (std::size_t i = 0; i < prods.size(); ++i)
      if (prods[i].lhs == nt) options.push_back(i);
    const auto& p = prods[options[pick(0, int(options.size()) - 1)]];
    for (auto& s : p.rhs) {
      if (s[0] == 'N') {
        if (!sample(prods, nts, std::stoi(s.substr(1)), depth + 1, out)) return false;
      } else {
        out.push_back(s);
      }
    }
    return true;
  }

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  std::mt19937 rng_;
};

}  // namespace fence::fixtures
