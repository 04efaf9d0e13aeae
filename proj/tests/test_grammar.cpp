#include "doctest.h"

#include "fence/grammar.hpp"
#include "support/fixtures.hpp"

using namespace fence;

namespace {
std::set<std::string> names(const Grammar& g, const std::set<SymbolId>& ids) {
  std::set<std::string> out;
  for (auto id : ids) out.insert(g.symbol(id).name);
  return out;
}
}  // namespace

TEST_CASE("ampersand grammar parses with 3 productions and 5 terminals") {
  auto g = parseGrammarText(fixtures::kAmpersandGrammar);
  CHECK(g.productions().size() == 3);
  CHECK(g.tokens().size() == 5);
  CHECK(g.symbol(g.start()).name == "E");
  std::size_t terminals = 0;
  for (auto& s : g.symbols()) terminals += s.isTerminal();
  CHECK(terminals == 5);
  for (std::size_t i = 0; i < 3; ++i) CHECK(g.production(i).id == i);
  CHECK(g.epsilonSymbols().empty());
}

TEST_CASE("epsilon symbols") {
  SUBCASE("direct epsilon lhs") {
    auto g = parseGrammarText("%token a /a/\n%start S\nS ::= ;");
    CHECK(names(g, g.epsilonSymbols()) == std::set<std::string>{"S"});
    CHECK(g.production(0).isEpsilon());
  }
  SUBCASE("chained nullables are closed transitively") {
    auto g = parseGrammarText("%token a /a/\n%start S\nS ::= A B; A ::= ; B ::= A;");
    CHECK(names(g, g.epsilonSymbols()) == std::set<std::string>{"S", "A", "B"});
  }
  SUBCASE("two-step fixed point") {
    auto g = parseGrammarText("%token a /a/\n%start S\nS ::= A A; A ::= ;");
    CHECK(names(g, g.epsilonSymbols()) == std::set<std::string>{"S", "A"});
  }
  SUBCASE("no nullable chain") {
    auto g = parseGrammarText(fixtures::kArithmetic);
    CHECK(computeEpsilonSymbols(g.productions()).empty());
  }
  SUBCASE("canonical epsilon production is the earliest-round one") {
    // S becomes nullable in round 1 via `S ::=`, not via the later chain.
    auto g = parseGrammarText("%token a /a/\n%start S\nS ::= A; S ::= ; A ::= ;");
    auto S = *g.findSymbol("S");
    CHECK(g.epsilonProduction(S) == 1);
    CHECK(g.nullableSuffix(0, 0));
    CHECK(g.nullableSuffix(0, 1));
  }
}

TEST_CASE("nullable suffix") {
  auto g = parseGrammarText(fixtures::kEpsilon);
  CHECK_FALSE(g.nullableSuffix(0, 0));
  CHECK_FALSE(g.nullableSuffix(0, 1));
  CHECK(g.nullableSuffix(0, 2));
}

TEST_CASE("grammar text errors carry positions") {
  auto fails = [](const char* src, const char* fragment, std::size_t line = 0) {
    try {
      parseGrammarText(src);
      FAIL("no error for: " << src);
    } catch (const GrammarError& e) {
      CHECK(std::string(e.what()).find(fragment) != std::string::npos);
      if (line) CHECK(e.line() == line);
    }
  };
  fails("%token a /a/\n%start S\nS ::= a b;", "unknown symbol 'b'", 3);
  fails("%token a /a/\n%token a /b/\n%start S\nS ::= a;", "duplicate token", 2);
  fails("%token a /a/\nS ::= a;", "start symbol missing");
  fails("%token a /a/\n%start S\nS ::= a", "missing ';'");
  fails("%token a /a/\n%start S\n[x] S ::= a;\n[y] S ::= S a;\n%prefer select x over y;\n%prefer select y over x;",
        "cycle");
  fails("%token a /a/\n%start S\n[x] S ::= a;\n%prefer select x over zz;", "unknown production label", 4);
  fails("%token a /a/\n%start S\nS ::= a;\n%frobnicate", "unknown directive", 4);
  fails("%token a /a\n%start S\nS ::= a;", "unterminated regex");
  fails("%token a /a/\n%start a\nS ::= a;", "start symbol");
  fails("%token a /a/\n%start S\na ::= a;", "token");
}

TEST_CASE("validateConstraints") {
  auto g = parseGrammarText(fixtures::kArithmetic);
  SUBCASE("empty constraint set is ok") { CHECK(validateConstraints(g).ok()); }
  SUBCASE("2-cycle names both productions") {
    ConstraintSet cs;
    cs.selection.add(0, 1);
    cs.selection.add(1, 0);
    auto r = validateConstraints(g.productions(), cs);
    REQUIRE(r.errors().size() == 1);
    CHECK(r.errors()[0].productions == std::vector<ProductionId>{0, 1});
    CHECK_THROWS_AS(g.withConstraints(cs), GrammarError);
  }
  SUBCASE("every violation is reported") {
    ConstraintSet cs;
    cs.selection.add(0, 0);
    cs.composition.add(0, 1);
    cs.composition.add(1, 0);
    cs.associativity[7] = Associativity::left_to_right;
    CHECK(validateConstraints(g.productions(), cs).errors().size() == 3);
  }
  SUBCASE("associativity on a unit-length rhs warns") {
    ConstraintSet cs;
    cs.associativity[1] = Associativity::left_to_right;
    auto r = validateConstraints(g.productions(), cs);
    CHECK(r.ok());
    REQUIRE(r.warnings().size() == 1);
    CHECK(r.warnings()[0].productions == std::vector<ProductionId>{1});
  }
  SUBCASE("binary associativity does not warn") {
    ConstraintSet cs;
    cs.associativity[0] = Associativity::left_to_right;
    CHECK(validateConstraints(g.productions(), cs).issues.empty());
  }
}

TEST_CASE("precedence orders close transitively") {
  PrecedenceOrder o;
  o.add(0, 1);
  o.add(1, 2);
  o.close();
  CHECK(o.precedes(0, 2));
  CHECK_FALSE(o.precedes(2, 0));
  CHECK_FALSE(o.precedes(0, 0));
}

TEST_CASE("builder assigns ids and rejects bad input") {
  GrammarBuilder b;
  b.token("x", "x").start("S");
  auto p0 = b.production("S", {"S", "x"});
  auto p1 = b.production("S", {"x"}, "base");
  b.associativity(p0, Associativity::left_to_right);
  auto g = b.build();
  CHECK(p0 == 0);
  CHECK(p1 == 1);
  CHECK(g.findProduction("base") == 1);
  CHECK(g.isTerminal(*g.findSymbol("x")));
  CHECK(g.productionsFor(*g.findSymbol("S")).size() == 2);

  GrammarBuilder bad;
  bad.token("x", "x").start("S").production("S", {"y"});
  CHECK_THROWS_AS(bad.build(), GrammarError);
  GrammarBuilder noStart;
  noStart.token("x", "x").production("S", {"x"});
  CHECK_THROWS_AS(noStart.build(), GrammarError);
}

TEST_CASE("text round trip is structurally identical") {
  for (auto* src : {fixtures::kAmpersandGrammar, fixtures::kArithmeticLeft, fixtures::kDanglingElse,
                    fixtures::kOutputCall, fixtures::kEpsilon, fixtures::kCyclic}) {
    auto g = parseGrammarText(src);
    auto text = writeGrammarText(g);
    auto again = parseGrammarText(text);
    CHECK_MESSAGE(structurallyEqual(g, again), text);
    CHECK(writeGrammarText(again) == text);
  }
  auto withSkip = parseGrammarText("%token a /a/\n%skip /,+/\n%start S\nS ::= a;");
  CHECK(parseGrammarText(writeGrammarText(withSkip)).skipPattern() == ",+");
}

TEST_CASE("production ids stable under re-parse") {
  auto a = parseGrammarText(fixtures::kDanglingElse), b = parseGrammarText(fixtures::kDanglingElse);
  CHECK(structurallyEqual(a, b));
  CHECK(a.findProduction("ifelse") == b.findProduction("ifelse"));
}

TEST_CASE("comments are ignored") {
  auto g = parseGrammarText("# leading\n%token a /a/ # after\n%start S\nS ::= a ; # done\n");
  CHECK(g.productions().size() == 1);
}
