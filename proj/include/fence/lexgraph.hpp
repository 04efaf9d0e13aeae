#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "fence/grammar.hpp"

namespace fence {

using TokenId = std::size_t;

struct TokenNode {
  TokenId id = 0;
  SymbolId symbol = 0;
  std::size_t start = 0;  // inclusive character offset
  std::size_t end = 0;    // exclusive
  std::string lexeme;
  std::vector<TokenId> preceding;  // sorted
  std::vector<TokenId> following;  // sorted

  friend bool operator==(const TokenNode&, const TokenNode&) = default;
};

// Token lattice over one input string. Node ids are dense and ordered by
// (start, end, symbol).
struct LAGraph {
  std::string input;
  std::vector<TokenNode> nodes;
  std::vector<TokenId> starting;

  bool empty() const { return nodes.empty(); }
  friend bool operator==(const LAGraph&, const LAGraph&) = default;
};

class LexError : public std::runtime_error {
 public:
  LexError(const std::string& message, std::size_t furthestOffset)
      : std::runtime_error(message), furthest_(furthestOffset) {}
  std::size_t furthestOffset() const { return furthest_; }

 private:
  std::size_t furthest_;
};

class DocumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// All-matches lexer. At each reachable offset every token definition
// contributes its longest match; tokens are linked to every token starting
// after the skip run that follows them. Nodes off any full-coverage path are
// pruned. Input made only of skip characters yields an empty graph.
LAGraph tokenize(const Grammar& grammar, std::string_view input);

// Distinct full token paths in lexicographic order of node ids, at most
// `limit` of them.
std::vector<std::vector<TokenId>> enumerateTokenPaths(const LAGraph& graph, std::size_t limit);

// Drops nodes that are not on a start-to-final path and renumbers.
// A node is final when it has no followers.
LAGraph prune(const LAGraph& graph);

nlohmann::json serializeLAGraph(const LAGraph& graph, const Grammar& grammar);

// Re-validates every TokenNode/LAGraph invariant, plus the offset
// consistency the shared-core ELA construction relies on. Throws
// DocumentError.
LAGraph loadLAGraph(const nlohmann::json& doc, const Grammar& grammar);

}  // namespace fence
