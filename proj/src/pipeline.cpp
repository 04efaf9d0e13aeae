#include "fence/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fence/elagraph.hpp"
#include "fence/regex.hpp"

namespace fence {

ParseSession parse(const Grammar& grammar, std::string_view input, EnforceOptions options) {
  ParseSession s;
  try {
    s.la = tokenize(grammar, input);
  } catch (const LexError& e) {
    s.lexError = e.what();
    s.lexFurthest = e.furthestOffset();
    return s;
  }
  s.ig = runChart(grammar, buildELAGraph(*s.la));
  s.eg = enforce(grammar, *s.ig, options, &s.enforceStats);
  return s;
}

std::string explainRejection(const ParseSession& session, const Grammar& grammar) {
  std::ostringstream msg;
  if (session.lexError) {
    msg << "lexical analysis failed: " << *session.lexError << "\n";
    msg << "furthest reachable offset: " << session.lexFurthest << "\n";
    return msg.str();
  }
  std::size_t furthest = 0;
  for (auto& t : session.la->nodes) furthest = std::max(furthest, t.end);
  msg << "input rejected\n";
  msg << "furthest tokenized offset: " << furthest << "\n";
  if (session.ig && session.ig->accepted())
    msg << "the chart accepted the input but every derivation violates a constraint\n";
  const auto spans = session.ig ? longestNonterminalSpans(*session.ig, grammar) : std::vector<NodeId>{};
  if (spans.empty()) {
    msg << "longest nonterminal spans: none\n";
  } else {
    msg << "longest nonterminal spans:";
    for (auto id : spans) {
      const auto& n = session.ig->graph.node(id);
      msg << " " << grammar.symbol(n.symbol).name << "[" << n.start << "," << n.end << ")";
    }
    msg << "\n";
  }
  return msg.str();
}

namespace {

std::optional<std::string> readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::json treeJson(const ParseTree& t, const Grammar& g) {
  nlohmann::json j = {{"symbol", g.symbol(t.symbol).name}, {"start", t.start}, {"end", t.end}};
  if (t.production) j["production"] = *t.production;
  switch (t.kind) {
    case ExplicitKind::token: j["lexeme"] = t.lexeme; break;
    case ExplicitKind::epsilon: j["epsilon"] = true; break;
    case ExplicitKind::nonterminal: {
      auto children = nlohmann::json::array();
      for (auto& c : t.children) children.push_back(treeJson(c, g));
      j["children"] = std::move(children);
      break;
    }
  }
  return j;
}

}  // namespace

int runPipeline(const SessionConfig& config, std::ostream& out, std::ostream& err) {
  if (config.inputPath.has_value() == config.text.has_value()) {
    err << "usage: exactly one of --input or --text is required\n";
    return kExitUsage;
  }
  if (config.enumerateLimit && *config.enumerateLimit == 0) {
    err << "usage: --enumerate needs a limit >= 1\n";
    return kExitUsage;
  }

  auto grammarText = readFile(config.grammarPath);
  if (!grammarText) {
    err << "grammar: cannot read " << config.grammarPath << "\n";
    return kExitUsage;
  }
  std::optional<Grammar> grammar;
  try {
    grammar = parseGrammarText(*grammarText);
    for (auto& w : validateConstraints(*grammar).warnings()) err << "grammar: warning: " << w.message << "\n";
    for (auto& t : grammar->tokens()) Regex::compile(t.pattern);
    Regex::compile(grammar->skipPattern());
  } catch (const GrammarError& e) {
    err << "grammar: " << config.grammarPath << (e.line() ? ":" : ": ") << e.what() << "\n";
    return kExitUsage;
  } catch (const RegexError& e) {
    err << "grammar: " << e.what() << "\n";
    return kExitUsage;
  }

  std::string input;
  if (config.text) {
    input = *config.text;
  } else {
    auto content = readFile(*config.inputPath);
    if (!content) {
      err << "input: cannot read " << *config.inputPath << "\n";
      return kExitUsage;
    }
    input = std::move(*content);
  }

  ParseSession session;
  try {
    session = parse(*grammar, input);
  } catch (const ParseSessionError& e) {
    err << "enforce: " << e.what() << "\n";
    return kExitUsage;
  }

  if (session.lexError) {
    err << "lex: " << explainRejection(session, *grammar);
    return kExitRejected;
  }
  if (config.dumpLA) out << serializeLAGraph(*session.la, *grammar).dump() << "\n";
  if (config.dumpELA) out << serializeELAGraph(session.ig->graph, *grammar).dump() << "\n";
  if (config.dumpIG) out << dumpIGraph(*session.ig, *grammar).dump() << "\n";

  if (!session.accepted()) {
    if (config.countOnly) out << 0 << "\n";
    err << "parse: " << explainRejection(session, *grammar);
    return kExitRejected;
  }

  EGraph forest = *session.eg;
  if (config.countOnly) {
    out << countTrees(forest).total << "\n";
    return kExitAccepted;
  }
  if (config.enumerateLimit) {
    const auto trees = enumerateTrees(forest, *config.enumerateLimit);
    if (config.format == OutputFormat::dot) {
      forest.roots.resize(std::min(forest.roots.size(), *config.enumerateLimit));
      out << toDot(forest, *grammar);
    } else {
      auto list = nlohmann::json::array();
      for (auto& t : trees) list.push_back(treeJson(t, *grammar));
      out << nlohmann::json{{"trees", list}}.dump() << "\n";
    }
    return kExitAccepted;
  }
  if (config.format == OutputFormat::dot) out << toDot(forest, *grammar);
  else out << serializeEGraph(forest, *grammar).dump() << "\n";
  return kExitAccepted;
}

}  // namespace fence
