#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "fence/chart.hpp"
#include "fence/grammar.hpp"

namespace fence {

using ExplicitId = std::size_t;

enum class ExplicitKind { token, nonterminal, epsilon };

// A derivation-bearing node. Nonterminal nodes own an ordered child list, so
// every explicit node stands for exactly one tree; identical subtrees are
// shared. Epsilon markers are zero-span children for skipped nullable rhs
// positions and carry the canonical epsilon derivation of their symbol.
struct ExplicitNode {
  ExplicitId id = 0;
  ExplicitKind kind = ExplicitKind::token;
  SymbolId symbol = 0;
  std::size_t start = 0;
  std::size_t end = 0;
  std::optional<ProductionId> production;
  std::vector<ExplicitId> children;
  std::string lexeme;  // tokens only
};

struct EGraph {
  std::string input;
  std::vector<ExplicitNode> nodes;
  std::vector<ExplicitId> roots;

  const ExplicitNode& node(ExplicitId id) const { return nodes.at(id); }
};

class ParseSessionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnforceOptions {
  // When false, candidates are never rejected (used for post-filtering and
  // for unconstrained counts).
  bool applyConstraints = true;
};

struct EnforceStats {
  std::size_t constructions = 0;  // complete candidate nodes built by apply
  std::size_t rejected = 0;
  std::size_t memoHits = 0;
  std::size_t historyCuts = 0;
};

enum class Verdict { accept, associativity, selection, composition, custom };

std::string_view toString(Verdict v);

// Constraint check for a candidate `p` over `children`, which are nodes of
// `nodes`. Associativity, composition and custom rules look at this node and
// its direct children only. Selection rejects the candidate when a strictly
// preferred production with the same rhs passes those three rules over the
// very same children; transitivity of the order makes that equivalent to
// requiring the preferred alternative to survive.
Verdict checkConstraints(const Grammar& grammar, const std::vector<ExplicitNode>& nodes, ProductionId p,
                         std::size_t start, std::size_t end, const std::vector<ExplicitId>& children);

class Enforcer {
 public:
  Enforcer(const Grammar& grammar, const IGraph& igraph, EnforceOptions options = {});

  // Every constraint-satisfying derivation of the implicit node, with no
  // enclosing recursion path.
  std::vector<ExplicitId> expand(NodeId node);

  // Candidates of production `p` spanning exactly the implicit node
  // `target`, as apply() sees them with `target` on the recursion path.
  std::vector<ExplicitId> apply(ProductionId p, NodeId target);

  // Expands every starting node; roots keep only the reachable nodes.
  EGraph run();

  const EnforceStats& stats() const { return stats_; }
  const std::vector<ExplicitNode>& nodes() const { return nodes_; }

 private:
  using History = std::vector<NodeId>;  // sorted; same-span ancestors only

  std::vector<ExplicitId> expand(NodeId node, const History& history);
  void applyProduction(ProductionId p, const ImplicitNode& target, const History& inner,
                       std::vector<ExplicitId>& out);
  ExplicitId leaf(NodeId tokenNode);
  ExplicitId marker(SymbolId symbol, std::size_t position);
  std::optional<ExplicitId> construct(ProductionId p, std::size_t start, std::size_t end,
                                      const std::vector<ExplicitId>& children);
  const std::vector<NodeId>& nodesAt(std::size_t start, SymbolId symbol) const;

  const Grammar& grammar_;
  const IGraph& igraph_;
  EnforceOptions options_;
  EnforceStats stats_;

  std::vector<ExplicitNode> nodes_;
  std::map<std::pair<ProductionId, std::vector<ExplicitId>>, ExplicitId> interned_;
  std::map<NodeId, ExplicitId> leaves_;
  std::map<std::pair<SymbolId, std::size_t>, ExplicitId> markers_;
  std::map<std::pair<NodeId, History>, std::vector<ExplicitId>> memo_;
  std::map<std::pair<std::size_t, SymbolId>, std::vector<NodeId>> byStart_;
};

EGraph enforce(const Grammar& grammar, const IGraph& igraph, EnforceOptions options = {},
               EnforceStats* stats = nullptr);

// Keeps the roots whose every node passes checkConstraints.
EGraph filterForest(const EGraph& graph, const Grammar& grammar);

struct TreeCount {
  std::map<ExplicitId, std::uint64_t> perRoot;
  std::uint64_t total = 0;
  bool saturated = false;
};

TreeCount countTrees(const EGraph& graph);

struct ParseTree {
  ExplicitKind kind = ExplicitKind::token;
  SymbolId symbol = 0;
  std::optional<ProductionId> production;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string lexeme;
  std::vector<ParseTree> children;
};

// Trees in root order, at most `limit`.
std::vector<ParseTree> enumerateTrees(const EGraph& graph, std::size_t limit);

// Token `Sym[s,e]`, nonterminal `(Sym#p[s,e] children...)`, marker `<Sym#p@pos>`.
std::string canonicalString(const ParseTree& tree, const Grammar& grammar);

// {nodes:[{id, symbol, start, end, production?, children?, lexeme?}], roots, treeCounts}
nlohmann::json serializeEGraph(const EGraph& graph, const Grammar& grammar);

// Squares for nonterminals, ellipses for tokens.
std::string toDot(const EGraph& graph, const Grammar& grammar);

}  // namespace fence
