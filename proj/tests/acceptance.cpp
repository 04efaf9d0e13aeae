// One line per acceptance criterion; exits non-zero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "fence/pipeline.hpp"
#include "oracle/oracle.hpp"
#include "support/fixtures.hpp"

using namespace fence;
using Clock = std::chrono::steady_clock;

namespace {

double secondsSince(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::multiset<std::string> forestSet(const Grammar& g, const EGraph& eg) {
  std::multiset<std::string> out;
  for (auto& t : enumerateTrees(eg, std::size_t(-1))) out.insert(canonicalString(t, g));
  return out;
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& why) {
    if (!ok && pass) detail << "failed: " << why << "; ";
    pass = pass && ok;
  }
};

using Check = std::function<void(Outcome&)>;

void criterion1(Outcome& v) {
  const auto t0 = Clock::now();
  auto g = parseGrammarText(fixtures::kAmpersandGrammar);
  auto s = parse(g, fixtures::kAmpersandInput);
  const auto elapsed = secondsSince(t0);
  v.require(!s.lexError, "tokenization failed");
  if (s.lexError) return;

  std::set<std::vector<std::string>> paths;
  for (auto& p : enumerateTokenPaths(*s.la, 100)) {
    std::vector<std::string> names;
    for (auto id : p) names.push_back(g.symbol(s.la->nodes[id].symbol).name);
    paths.insert(names);
  }
  using V = std::vector<std::string>;
  const std::set<V> expected = {
      {"Ampersand", "Real", "Ampersand", "Slash", "Real", "Slash"},
      {"Ampersand", "Real", "Ampersand", "Slash", "Integer", "Point", "Integer", "Slash"},
      {"Ampersand", "Integer", "Point", "Integer", "Ampersand", "Slash", "Real", "Slash"},
      {"Ampersand", "Integer", "Point", "Integer", "Ampersand", "Slash", "Integer", "Point", "Integer", "Slash"}};
  v.require(paths == expected, "token paths differ from the four expected sequences");
  v.require(s.eg->roots.size() == 1 && countTrees(*s.eg).total == 1, "expected exactly one root and one tree");
  auto trees = enumerateTrees(*s.eg, 2);
  if (trees.size() == 1) {
    auto& a = trees[0].children.at(0);
    auto& b = trees[0].children.at(1);
    std::string aRead, bRead;
    for (auto& c : a.children) aRead += g.symbol(c.symbol).name + "(" + c.lexeme + ") ";
    for (auto& c : b.children) bRead += g.symbol(c.symbol).name + " ";
    v.require(aRead == "Ampersand(&) Real(5.2) Ampersand(&) ", "A subtree reads " + aRead);
    v.require(bRead == "Slash Integer Point Integer Slash ", "B subtree reads " + bRead);
  }
  v.require(elapsed < 1.0, "runtime above 1 s");
  v.detail << "paths=" << paths.size() << " trees=" << countTrees(*s.eg).total << " time=" << elapsed << "s";
}

// Runs a generated suite against the oracle. Instances beyond the oracle's
// bounds are replaced by fresh ones.
void oracleSuite(Outcome& v, bool constrained) {
  const auto t0 = Clock::now();
  fixtures::RandomSuite suite(constrained ? 2024 : 1999);
  std::size_t compared = 0, accepted = 0, ambiguous = 0, pruned = 0, skipped = 0, mismatches = 0, nullable = 0,
              cyclic = 0;
  while (compared < 400) {
    auto inst = suite.next(constrained);
    auto g = parseGrammarText(inst.grammarText);
    std::optional<LAGraph> la;
    try {
      la = tokenize(g, inst.input);
    } catch (const LexError&) {
    }
    oracle::OracleResult expected;
    if (la) {
      expected = oracle::oracleParseAll(g, *la);
      if (expected.outcome != oracle::Outcome::ok) {
        ++skipped;
        continue;
      }
    }
    ++compared;
    nullable += !g.epsilonSymbols().empty();
    for (auto& p : g.productions())
      if (p.rhs.size() == 1 && !g.isTerminal(p.rhs[0])) {
        ++cyclic;  // unit productions, the source of derivation cycles
        break;
      }
    auto want = oracle::canonicalSet(constrained ? oracle::oracleFilter(expected.trees, g) : expected.trees, g);
    auto s = parse(g, inst.input);
    std::multiset<std::string> got;
    if (s.eg) got = forestSet(g, *s.eg);
    accepted += !want.empty();
    ambiguous += want.size() > 1;
    pruned += want.size() < expected.trees.size();
    if (got != want) {
      if (mismatches == 0)
        v.detail << "first mismatch on input '" << inst.input << "' with grammar:\n" << inst.grammarText << "\n";
      ++mismatches;
    }
  }
  const auto elapsed = secondsSince(t0);
  v.require(mismatches == 0, std::to_string(mismatches) + " instances differ");
  v.require(elapsed < 300, "suite slower than 5 min");
  v.detail << "instances=" << compared << " accepted=" << accepted << " ambiguous=" << ambiguous;
  if (constrained) v.detail << " prunedByConstraints=" << pruned;
  v.detail << " withNullable=" << nullable
           << " withUnitProductions=" << cyclic << " regenerated=" << skipped << " time=" << elapsed << "s";
}

void criterion4(Outcome& v) {
  auto left = parseGrammarText(fixtures::kArithmeticLeft);
  auto free = left.withoutConstraints();
  std::ostringstream counts;
  for (unsigned k = 2; k <= 10; ++k) {
    const auto input = fixtures::chain(k);
    auto constrained = countTrees(*parse(left, input).eg).total;
    auto all = countTrees(*parse(free, input).eg).total;
    v.require(constrained == 1, "k=" + std::to_string(k) + " left-assoc count " + std::to_string(constrained));
    v.require(all == fixtures::catalan(k - 1), "k=" + std::to_string(k) + " unconstrained count " + std::to_string(all));
    counts << all << (k < 10 ? "," : "");
  }
  v.detail << "unconstrained=" << counts.str() << " constrained=1 each";
}

void criterion5(Outcome& v) {
  auto g = parseGrammarText(fixtures::kDanglingElse);
  const char* input = "if expr1 if expr2 sent1 else sent2";
  auto s = parse(g, input);
  auto trees = enumerateTrees(*s.eg, 10);
  v.require(trees.size() == 1, "constrained tree count " + std::to_string(trees.size()));
  if (trees.size() == 1) {
    const auto& outer = trees[0];
    v.require(outer.production == g.findProduction("ifthen"), "outer conditional is not if-then");
    v.require(outer.children.size() == 3 && outer.children[2].production == g.findProduction("ifelse"),
              "else is not attached to the inner conditional");
  }
  auto free = countTrees(*parse(g.withoutConstraints(), input).eg).total;
  v.require(free == 2, "unconstrained count " + std::to_string(free));
  v.detail << "constrained=" << trees.size() << " unconstrained=" << free;
}

void criterion6(Outcome& v) {
  auto g = parseGrammarText(fixtures::kOutputCall);
  auto s = parse(g, "output(var);");
  auto trees = enumerateTrees(*s.eg, 10);
  v.require(trees.size() == 1, "constrained tree count " + std::to_string(trees.size()));
  if (trees.size() == 1)
    v.require(g.symbol(trees[0].children.at(0).symbol).name == "OutputStatement", "survivor is not OutputStatement");
  auto free = countTrees(*parse(g.withoutConstraints(), "output(var);").eg).total;
  v.require(free == 2, "unconstrained count " + std::to_string(free));
  v.detail << "constrained=" << trees.size() << " unconstrained=" << free;
}

void criterion7(Outcome& v) {
  auto eps = parseGrammarText(fixtures::kEpsilon);
  auto s = parse(eps, "b");
  auto trees = s.eg ? enumerateTrees(*s.eg, 10) : std::vector<ParseTree>{};
  v.require(trees.size() == 1, "epsilon grammar tree count " + std::to_string(trees.size()));
  if (trees.size() == 1)
    v.require(trees[0].children.size() == 2 && trees[0].children[0].kind == ExplicitKind::epsilon,
              "missing epsilon marker");

  const auto t0 = Clock::now();
  auto cyc = parseGrammarText(fixtures::kCyclic);
  auto c = parse(cyc, "c");
  const auto elapsed = secondsSince(t0);
  auto count = c.eg ? countTrees(*c.eg).total : 0;
  v.require(count == 1, "cyclic grammar tree count " + std::to_string(count));
  v.require(elapsed < 0.1, "cyclic parse slower than 100 ms");
  v.detail << "epsilonTree=" << (trees.empty() ? "none" : canonicalString(trees[0], eps)) << " cyclicTrees=" << count
           << " time=" << elapsed * 1000 << "ms";
}

void criterion8(Outcome& v) {
  auto pops = [&](const Grammar& g, const std::string& input, double& seconds) {
    const auto t0 = Clock::now();
    auto ig = runChart(g, buildELAGraph(tokenize(g, input)));
    seconds = secondsSince(t0);
    if (!ig.accepted()) v.require(false, "scaling input rejected");
    return double(ig.stats.agendaPops);
  };
  auto expr = parseGrammarText(fixtures::kExpression);
  auto dense = parseGrammarText(fixtures::kDenseAmbiguous);
  auto exprInput = [](std::size_t n) {
    std::string s = "1";  // n tokens: operands joined by alternating operators
    for (std::size_t i = 1; i + 1 < n; i += 2) s += (i / 2) % 2 ? "*2" : "+3";
    return s;
  };
  for (auto [name, grammar, band, makeInput] :
       {std::tuple{"expression", &expr, 4.5, std::function<std::string(std::size_t)>(exprInput)},
        std::tuple{"S::=SS|a", &dense, 9.5, std::function<std::string(std::size_t)>([](std::size_t n) {
                     return std::string(n, 'a');
                   })}}) {
    double prev = 0;
    v.detail << name << ":";
    for (std::size_t n : {64, 128, 256}) {
      double secs = 0;
      const double p = pops(*grammar, makeInput(n), secs);
      v.require(secs < 10, std::string(name) + " n=" + std::to_string(n) + " slower than 10 s");
      if (prev > 0) {
        const double ratio = p / prev;
        v.require(ratio <= band, std::string(name) + " ratio " + std::to_string(ratio));
        v.detail << " r=" << ratio;
      }
      v.detail << " pops(" << n << ")=" << p;
      prev = p;
    }
    v.detail << "; ";
  }
}

void criterion9(Outcome& v) {
  auto g = parseGrammarText(fixtures::kArithmeticLeft);
  auto ig = runChart(g, buildELAGraph(tokenize(g, fixtures::chain(8))));
  EnforceStats early, late;
  auto built = enforce(g, ig, {}, &early);
  auto filtered = filterForest(enforce(g, ig, {false}, &late), g);
  v.require(forestSet(g, built) == forestSet(g, filtered), "surviving trees differ");
  v.require(early.constructions < late.constructions, "in-apply enforcement did not save constructions");
  v.detail << "inApply=" << early.constructions << " postFilter=" << late.constructions;
}

void criterion10(Outcome& v) {
  std::size_t runs = 0, differing = 0;
  for (bool constrained : {false, true}) {
    fixtures::RandomSuite first(constrained ? 2024 : 1999), second(constrained ? 2024 : 1999);
    for (int i = 0; i < 400; ++i) {
      auto a = first.next(constrained), b = second.next(constrained);
      auto render = [](const fixtures::RandomInstance& inst) {
        auto g = parseGrammarText(inst.grammarText);
        auto s = parse(g, inst.input);
        std::ostringstream out;
        if (s.lexError) out << "lex " << s.lexFurthest;
        else out << serializeEGraph(*s.eg, g).dump() << dumpIGraph(*s.ig, g).dump();
        return out.str();
      };
      ++runs;
      differing += render(a) != render(b);
    }
  }
  v.require(differing == 0, std::to_string(differing) + " instances differ between runs");
  v.detail << "instances=" << runs;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Check>> criteria = {
      {"ampersand and slash example end to end", criterion1},
      {"oracle equivalence, unconstrained", [](Outcome& v) { oracleSuite(v, false); }},
      {"oracle equivalence, constrained", [](Outcome& v) { oracleSuite(v, true); }},
      {"associativity collapse", criterion4},
      {"dangling else", criterion5},
      {"selection precedence", criterion6},
      {"epsilon and cycle robustness", criterion7},
      {"scaling bands", criterion8},
      {"early-enforcement economy", criterion9},
      {"determinism", criterion10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome v;
    try {
      criteria[i].second(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    failed += !v.pass;
    std::printf("criterion %zu %s: %s (%s)\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first,
                v.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
