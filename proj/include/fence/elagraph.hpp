#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fence/grammar.hpp"
#include "fence/lexgraph.hpp"

namespace fence {

using NodeId = std::size_t;
using CoreId = std::size_t;

// Partially applied production: `dot` rhs symbols are behind us, matched
// starting at `startIndex`. `first` is the first node actually matched; it is
// empty while every position so far was skipped as nullable.
struct Handle {
  ProductionId production = 0;
  std::size_t dot = 0;
  std::optional<NodeId> first;
  std::size_t startIndex = 0;

  friend bool operator==(const Handle&, const Handle&) = default;
};

struct HandleHash {
  std::size_t operator()(const Handle& h) const noexcept;
};

struct Core {
  CoreId id = 0;
  std::size_t position = 0;
  std::vector<Handle> handles;     // insertion order; never shrinks
  std::vector<NodeId> preceding;   // nodes ending here
  std::vector<NodeId> following;   // nodes starting here
};

// (start, end, symbol) node. Token nodes keep their lattice id as node id.
struct ImplicitNode {
  NodeId id = 0;
  std::size_t start = 0;
  std::size_t end = 0;
  SymbolId symbol = 0;
  std::optional<TokenId> token;
  std::vector<CoreId> precedingCores;
  std::vector<CoreId> followingCores;

  bool isToken() const { return token.has_value(); }
};

class ELAGraph {
 public:
  const std::string& input() const { return input_; }
  const std::vector<Core>& cores() const { return cores_; }
  const std::vector<ImplicitNode>& nodes() const { return nodes_; }
  const Core& core(CoreId id) const { return cores_.at(id); }
  const ImplicitNode& node(NodeId id) const { return nodes_.at(id); }
  CoreId startingCore() const { return startingCore_; }
  CoreId lastCore() const { return lastCore_; }
  std::size_t tokenCount() const { return tokenCount_; }

  std::optional<NodeId> findNode(std::size_t start, std::size_t end, SymbolId symbol) const;
  std::optional<CoreId> coreAt(std::size_t position) const;

  // Returns the node for the triple, creating it unconnected if needed.
  std::pair<NodeId, bool> internNode(std::size_t start, std::size_t end, SymbolId symbol);
  // Symmetric node/core links; return false if already present.
  bool linkPreceding(NodeId node, CoreId core);
  bool linkFollowing(NodeId node, CoreId core);
  Core& mutableCore(CoreId id) { return cores_.at(id); }

 private:
  friend ELAGraph buildELAGraph(const LAGraph& la);

  struct Key {
    std::size_t start, end;
    SymbolId symbol;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };

  std::string input_;
  std::vector<Core> cores_;
  std::vector<ImplicitNode> nodes_;
  std::unordered_map<Key, NodeId, KeyHash> index_;
  std::unordered_map<std::size_t, CoreId> coreByPosition_;
  CoreId startingCore_ = 0;
  CoreId lastCore_ = 0;
  std::size_t tokenCount_ = 0;
};

// One core per distinct token start offset plus a last core at the input
// end; tokens starting at the same offset share their preceding core. An
// empty lattice gets a single core that is both starting and last.
ELAGraph buildELAGraph(const LAGraph& la);

// Token paths through the ELA graph, as node id sequences, in lexicographic
// order (test and diagnostic use).
std::vector<std::vector<NodeId>> enumerateELAPaths(const ELAGraph& ela, std::size_t limit);

nlohmann::json serializeELAGraph(const ELAGraph& ela, const Grammar& grammar);

}  // namespace fence
