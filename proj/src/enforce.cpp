#include "fence/enforce.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

namespace fence {

std::string_view toString(Verdict v) {
  switch (v) {
    case Verdict::accept: return "accept";
    case Verdict::associativity: return "associativity";
    case Verdict::selection: return "selection";
    case Verdict::composition: return "composition";
    case Verdict::custom: return "custom";
  }
  return "accept";
}

namespace {

std::vector<CandidateChild> childViews(const std::vector<ExplicitNode>& nodes,
                                       const std::vector<ExplicitId>& children) {
  std::vector<CandidateChild> out;
  out.reserve(children.size());
  for (auto c : children) {
    const auto& n = nodes[c];
    out.push_back({n.symbol, n.start, n.end, n.production, n.lexeme, n.kind == ExplicitKind::epsilon});
  }
  return out;
}

bool derivedBy(const CandidateChild& c, ProductionId p) {
  return !c.epsilon && c.production == p;
}

// Associativity, composition and custom rules for `p` over `view`.
Verdict checkLocal(const Grammar& grammar, ProductionId p, const CandidateView& view) {
  const auto& cs = grammar.constraints();
  const auto& kids = view.children;
  if (auto a = cs.associativity.find(p); a != cs.associativity.end() && !kids.empty()) {
    const bool leftClash = derivedBy(kids.front(), p);
    const bool rightClash = derivedBy(kids.back(), p);
    switch (a->second) {
      case Associativity::left_to_right:
        if (rightClash) return Verdict::associativity;
        break;
      case Associativity::right_to_left:
        if (leftClash) return Verdict::associativity;
        break;
      case Associativity::non_associative:
        if (leftClash || rightClash) return Verdict::associativity;
        break;
    }
  }
  if (!cs.composition.empty()) {
    for (auto& c : kids)
      if (!c.epsilon && c.production && cs.composition.precedes(p, *c.production)) return Verdict::composition;
  }
  if (auto e = cs.custom.find(p); e != cs.custom.end()) {
    bool ok;
    try {
      ok = e->second(view);
    } catch (const std::exception& ex) {
      throw ParseSessionError("custom constraint of production " + grammar.describe(p) + " failed: " + ex.what());
    } catch (...) {
      throw ParseSessionError("custom constraint of production " + grammar.describe(p) + " failed");
    }
    if (!ok) return Verdict::custom;
  }
  return Verdict::accept;
}

}  // namespace

Verdict checkConstraints(const Grammar& grammar, const std::vector<ExplicitNode>& nodes, ProductionId p,
                         std::size_t start, std::size_t end, const std::vector<ExplicitId>& children) {
  const auto& cs = grammar.constraints();
  if (cs.empty()) return Verdict::accept;
  const auto kids = childViews(nodes, children);
  const auto& prod = grammar.production(p);
  CandidateView view{p, prod.lhs, start, end, kids};
  if (auto v = checkLocal(grammar, p, view); v != Verdict::accept) return v;
  if (!cs.selection.empty()) {
    for (auto& q : grammar.productions()) {
      if (q.id == p || q.rhs != prod.rhs || !cs.selection.precedes(q.id, p)) continue;
      CandidateView alt{q.id, q.lhs, start, end, kids};
      if (checkLocal(grammar, q.id, alt) == Verdict::accept) return Verdict::selection;
    }
  }
  return Verdict::accept;
}

namespace {

// Keeps the nodes reachable from `roots`, in creation order.
EGraph restrictTo(const EGraph& graph, const std::vector<ExplicitId>& roots) {
  std::vector<bool> live(graph.nodes.size(), false);
  std::vector<ExplicitId> stack(roots.begin(), roots.end());
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    if (live[v]) continue;
    live[v] = true;
    for (auto c : graph.nodes[v].children) stack.push_back(c);
  }
  std::vector<ExplicitId> renumber(graph.nodes.size());
  EGraph out;
  out.input = graph.input;
  for (auto& n : graph.nodes) {
    if (!live[n.id]) continue;
    renumber[n.id] = out.nodes.size();
    ExplicitNode copy = n;
    copy.id = out.nodes.size();
    for (auto& c : copy.children) c = renumber[c];
    out.nodes.push_back(std::move(copy));
  }
  for (auto r : roots) out.roots.push_back(renumber[r]);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Enforcer

Enforcer::Enforcer(const Grammar& grammar, const IGraph& igraph, EnforceOptions options)
    : grammar_(grammar), igraph_(igraph), options_(options) {
  for (auto& n : igraph_.graph.nodes()) byStart_[{n.start, n.symbol}].push_back(n.id);
  for (auto& [_, ids] : byStart_)
    std::sort(ids.begin(), ids.end(), [&](NodeId a, NodeId b) {
      const auto &x = igraph_.graph.node(a), &y = igraph_.graph.node(b);
      return std::tie(x.end, x.id) < std::tie(y.end, y.id);
    });
}

const std::vector<NodeId>& Enforcer::nodesAt(std::size_t start, SymbolId symbol) const {
  static const std::vector<NodeId> none;
  auto it = byStart_.find({start, symbol});
  return it == byStart_.end() ? none : it->second;
}

ExplicitId Enforcer::leaf(NodeId tokenNode) {
  if (auto it = leaves_.find(tokenNode); it != leaves_.end()) return it->second;
  const auto& n = igraph_.graph.node(tokenNode);
  ExplicitNode e;
  e.id = nodes_.size();
  e.kind = ExplicitKind::token;
  e.symbol = n.symbol;
  e.start = n.start;
  e.end = n.end;
  e.lexeme = igraph_.graph.input().substr(n.start, n.end - n.start);
  nodes_.push_back(std::move(e));
  leaves_.emplace(tokenNode, nodes_.back().id);
  return nodes_.back().id;
}

ExplicitId Enforcer::marker(SymbolId symbol, std::size_t position) {
  if (auto it = markers_.find({symbol, position}); it != markers_.end()) return it->second;
  const auto p = grammar_.epsilonProduction(symbol);
  std::vector<ExplicitId> children;
  for (auto s : grammar_.production(p).rhs) children.push_back(marker(s, position));
  ExplicitNode e;
  e.id = nodes_.size();
  e.kind = ExplicitKind::epsilon;
  e.symbol = symbol;
  e.start = e.end = position;
  e.production = p;
  e.children = std::move(children);
  nodes_.push_back(std::move(e));
  markers_.emplace(std::pair{symbol, position}, nodes_.back().id);
  return nodes_.back().id;
}

std::optional<ExplicitId> Enforcer::construct(ProductionId p, std::size_t start, std::size_t end,
                                              const std::vector<ExplicitId>& children) {
  ++stats_.constructions;
  if (options_.applyConstraints &&
      checkConstraints(grammar_, nodes_, p, start, end, children) != Verdict::accept) {
    ++stats_.rejected;
    return std::nullopt;
  }
  auto [it, inserted] = interned_.emplace(std::pair{p, children}, nodes_.size());
  if (inserted) {
    ExplicitNode e;
    e.id = nodes_.size();
    e.kind = ExplicitKind::nonterminal;
    e.symbol = grammar_.production(p).lhs;
    e.start = start;
    e.end = end;
    e.production = p;
    e.children = children;
    nodes_.push_back(std::move(e));
  }
  return it->second;
}

std::vector<ExplicitId> Enforcer::expand(NodeId node) { return expand(node, {}); }

std::vector<ExplicitId> Enforcer::apply(ProductionId p, NodeId target) {
  std::vector<ExplicitId> out;
  applyProduction(p, igraph_.graph.node(target), History{target}, out);
  return out;
}

std::vector<ExplicitId> Enforcer::expand(NodeId node, const History& history) {
  const auto& n = igraph_.graph.node(node);
  if (n.isToken()) return {leaf(node)};

  auto key = std::pair{node, history};
  if (auto it = memo_.find(key); it != memo_.end()) {
    ++stats_.memoHits;
    return it->second;
  }
  History inner = history;
  inner.insert(std::lower_bound(inner.begin(), inner.end(), node), node);

  std::vector<ExplicitId> out;
  for (auto p : grammar_.productionsFor(n.symbol))
    if (!grammar_.production(p).isEpsilon()) applyProduction(p, n, inner, out);

  std::vector<ExplicitId> unique;
  std::set<ExplicitId> seen;
  for (auto e : out)
    if (seen.insert(e).second) unique.push_back(e);
  memo_.emplace(std::move(key), unique);
  return unique;
}

// Matches the rhs of `p` left to right against implicit nodes inside the
// target span. Nullable positions branch into an epsilon marker and a real
// match; the last matched node must end exactly at the target end.
void Enforcer::applyProduction(ProductionId p, const ImplicitNode& target, const History& inner,
                               std::vector<ExplicitId>& out) {
  const auto& rhs = grammar_.production(p).rhs;
  const auto& ela = igraph_.graph;
  std::vector<ExplicitId> content;

  std::function<void(std::size_t, std::size_t, const std::vector<std::size_t>&, bool)> step =
      [&](std::size_t pos, std::size_t anchor, const std::vector<std::size_t>& starts, bool matched) {
        if (pos == rhs.size()) {
          if (matched && anchor == target.end)
            if (auto id = construct(p, target.start, target.end, content)) out.push_back(*id);
          return;
        }
        const auto symbol = rhs[pos];
        if (grammar_.isNullable(symbol)) {
          content.push_back(marker(symbol, anchor));
          step(pos + 1, anchor, starts, matched);
          content.pop_back();
        }
        for (auto s : starts) {
          for (auto m : nodesAt(s, symbol)) {
            const auto& child = ela.node(m);
            if (child.end > target.end) break;
            if (child.end == target.end && !grammar_.nullableSuffix(p, pos + 1)) continue;
            const bool sameSpan = child.start == target.start && child.end == target.end;
            if (sameSpan && std::binary_search(inner.begin(), inner.end(), m)) {
              ++stats_.historyCuts;
              continue;
            }
            // Only same-span ancestors can recur below a child.
            const auto alternatives = expand(m, sameSpan ? inner : History{});
            if (alternatives.empty()) continue;
            std::vector<std::size_t> next;
            for (auto c : child.followingCores) next.push_back(ela.core(c).position);
            for (auto a : alternatives) {
              content.push_back(a);
              step(pos + 1, child.end, next, true);
              content.pop_back();
            }
          }
        }
      };
  step(0, target.start, {target.start}, false);
}

EGraph Enforcer::run() {
  std::vector<ExplicitId> roots;
  if (igraph_.acceptsEmpty) {
    roots.push_back(marker(grammar_.start(), 0));
  } else {
    for (auto s : igraph_.starting)
      for (auto e : expand(s))
        if (std::find(roots.begin(), roots.end(), e) == roots.end()) roots.push_back(e);
  }

  EGraph all;
  all.input = igraph_.graph.input();
  all.nodes = nodes_;
  return restrictTo(all, roots);
}

EGraph enforce(const Grammar& grammar, const IGraph& igraph, EnforceOptions options, EnforceStats* stats) {
  Enforcer e(grammar, igraph, options);
  auto g = e.run();
  if (stats) *stats = e.stats();
  return g;
}

// ---------------------------------------------------------------------------
// Forest utilities


EGraph filterForest(const EGraph& graph, const Grammar& grammar) {
  // Children always precede parents, so one forward pass settles validity.
  std::vector<bool> valid(graph.nodes.size(), true);
  for (auto& n : graph.nodes) {
    if (n.kind != ExplicitKind::nonterminal) continue;
    bool ok = std::all_of(n.children.begin(), n.children.end(), [&](ExplicitId c) { return valid[c]; });
    if (ok) ok = checkConstraints(grammar, graph.nodes, *n.production, n.start, n.end, n.children) == Verdict::accept;
    valid[n.id] = ok;
  }
  std::vector<ExplicitId> roots;
  for (auto r : graph.roots)
    if (valid[r]) roots.push_back(r);
  return restrictTo(graph, roots);
}

TreeCount countTrees(const EGraph& graph) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  TreeCount tc;
  std::vector<std::uint64_t> count(graph.nodes.size(), 1);
  for (auto& n : graph.nodes) {
    std::uint64_t c = 1;
    for (auto child : n.children) {
      if (count[child] != 0 && c > kMax / count[child]) {
        c = kMax;
        tc.saturated = true;
      } else {
        c *= count[child];
      }
    }
    count[n.id] = c;
  }
  for (auto r : graph.roots) {
    tc.perRoot[r] = count[r];
    if (tc.total > kMax - count[r]) {
      tc.total = kMax;
      tc.saturated = true;
    } else {
      tc.total += count[r];
    }
  }
  return tc;
}

namespace {
ParseTree toTree(const EGraph& g, ExplicitId id) {
  const auto& n = g.node(id);
  ParseTree t;
  t.kind = n.kind;
  t.symbol = n.symbol;
  t.production = n.production;
  t.start = n.start;
  t.end = n.end;
  t.lexeme = n.lexeme;
  if (n.kind == ExplicitKind::nonterminal)
    for (auto c : n.children) t.children.push_back(toTree(g, c));
  return t;
}

void writeCanonical(const ParseTree& t, const Grammar& grammar, std::string& out) {
  const auto& name = grammar.symbol(t.symbol).name;
  switch (t.kind) {
    case ExplicitKind::token:
      out += name + "[" + std::to_string(t.start) + "," + std::to_string(t.end) + "]";
      break;
    case ExplicitKind::epsilon:
      out += "<" + name + "#" + std::to_string(*t.production) + "@" + std::to_string(t.start) + ">";
      break;
    case ExplicitKind::nonterminal:
      out += "(" + name + "#" + std::to_string(*t.production) + "[" + std::to_string(t.start) + "," +
             std::to_string(t.end) + "]";
      for (auto& c : t.children) {
        out += ' ';
        writeCanonical(c, grammar, out);
      }
      out += ")";
      break;
  }
}
}  // namespace

std::vector<ParseTree> enumerateTrees(const EGraph& graph, std::size_t limit) {
  std::vector<ParseTree> out;
  for (auto r : graph.roots) {
    if (out.size() >= limit) break;
    out.push_back(toTree(graph, r));
  }
  return out;
}

std::string canonicalString(const ParseTree& tree, const Grammar& grammar) {
  std::string s;
  writeCanonical(tree, grammar, s);
  return s;
}

nlohmann::json serializeEGraph(const EGraph& graph, const Grammar& grammar) {
  nlohmann::json nodes = nlohmann::json::array();
  for (auto& n : graph.nodes) {
    nlohmann::json jn = {{"id", n.id},
                         {"symbol", grammar.symbol(n.symbol).name},
                         {"start", n.start},
                         {"end", n.end}};
    if (n.production) jn["production"] = *n.production;
    if (n.kind != ExplicitKind::token) jn["children"] = n.children;
    if (n.kind == ExplicitKind::token) jn["lexeme"] = n.lexeme;
    if (n.kind == ExplicitKind::epsilon) jn["epsilon"] = true;
    nodes.push_back(std::move(jn));
  }
  auto counts = countTrees(graph);
  nlohmann::json treeCounts = nlohmann::json::object();
  for (auto& [root, c] : counts.perRoot) treeCounts[std::to_string(root)] = c;
  return {{"nodes", nodes}, {"roots", graph.roots}, {"treeCounts", treeCounts}, {"saturated", counts.saturated}};
}

std::string toDot(const EGraph& graph, const Grammar& grammar) {
  auto escape = [](const std::string& s) {
    std::string out;
    for (char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out;
  };
  std::ostringstream dot;
  dot << "digraph egraph {\n  ordering=out;\n";
  for (auto& n : graph.nodes) {
    const auto& name = grammar.symbol(n.symbol).name;
    dot << "  n" << n.id << " [";
    switch (n.kind) {
      case ExplicitKind::nonterminal:
        dot << "shape=box, label=\"" << escape(name) << " [" << n.start << "," << n.end << ")\"";
        break;
      case ExplicitKind::token:
        dot << "shape=ellipse, label=\"" << escape(name) << "\\n" << escape(n.lexeme) << "\"";
        break;
      case ExplicitKind::epsilon:
        dot << "shape=box, style=dashed, label=\"" << escape(name) << " = ε\"";
        break;
    }
    if (std::find(graph.roots.begin(), graph.roots.end(), n.id) != graph.roots.end()) dot << ", peripheries=2";
    dot << "];\n";
  }
  for (auto& n : graph.nodes)
    for (auto c : n.children) dot << "  n" << n.id << " -> n" << c << ";\n";
  dot << "}\n";
  return dot.str();
}

}  // namespace fence
