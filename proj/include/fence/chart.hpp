#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "fence/elagraph.hpp"
#include "fence/grammar.hpp"

namespace fence {

struct ChartStats {
  std::size_t agendaPops = 0;
  std::size_t agendaPushes = 0;
  std::size_t handles = 0;
};

// The agenda is a stack; FIFO exists to check that the order does not
// change the resulting graph.
enum class AgendaOrder { lifo, fifo };

// Output of the chart phase: the ELA graph extended with nonterminal nodes,
// and the nodes accepted as parse roots.
struct IGraph {
  ELAGraph graph;
  std::vector<NodeId> starting;
  ChartStats stats;
  // Empty token path and a nullable start symbol.
  bool acceptsEmpty = false;

  bool accepted() const { return acceptsEmpty || !starting.empty(); }
};

struct AgendaEntry {
  CoreId core = 0;
  std::size_t handle = 0;  // index into core.handles
  NodeId node = 0;
};

class ChartParser {
 public:
  ChartParser(const Grammar& grammar, ELAGraph graph, AgendaOrder order = AgendaOrder::lifo);

  // Seeds every non-epsilon production at dot 0 into every core.
  void initialize();

  // Inserts (p, dot, first, startIndex) into `core` if absent, pairs it with
  // the core's following nodes that match the dot symbol, and repeats with
  // the dot advanced while the dot symbol is nullable.
  void addHandle(ProductionId p, std::size_t dot, std::optional<NodeId> first, std::size_t startIndex,
                 CoreId core);

  // Drains the agenda.
  void run();

  // Collects the starting nodes and hands the graph over.
  IGraph finish() &&;

  const ELAGraph& graph() const { return graph_; }
  const ChartStats& stats() const { return stats_; }
  std::size_t agendaSize() const { return agenda_.size(); }
  const std::deque<AgendaEntry>& agenda() const { return agenda_; }

 private:
  void push(CoreId core, std::size_t handle, NodeId node);
  void process(const AgendaEntry& entry);
  void reduce(const Handle& h, NodeId last);

  struct CoreIndex {
    std::unordered_map<Handle, std::size_t, HandleHash> handles;
    std::unordered_map<SymbolId, std::vector<std::size_t>> waiting;  // by dot symbol
    std::unordered_map<SymbolId, std::vector<NodeId>> following;     // by node symbol
  };

  const Grammar& grammar_;
  ELAGraph graph_;
  AgendaOrder order_;
  std::vector<CoreIndex> index_;
  std::vector<std::vector<std::uint32_t>> handleGid_;
  std::uint32_t nextGid_ = 0;
  std::deque<AgendaEntry> agenda_;
  std::unordered_set<std::uint64_t> alreadyGenerated_;
  ChartStats stats_;
};

IGraph runChart(const Grammar& grammar, ELAGraph graph, AgendaOrder order = AgendaOrder::lifo);

struct IGraphStatistics {
  std::size_t nodes = 0;
  std::size_t tokenNodes = 0;
  std::size_t edges = 0;  // node-core links, both directions counted once
  std::size_t starting = 0;
};

IGraphStatistics igraphStatistics(const IGraph& ig);

// Nonterminal nodes with the largest span (rejection diagnostics).
std::vector<NodeId> longestNonterminalSpans(const IGraph& ig, const Grammar& grammar);

// {nodes:[{start,end,symbol}], starting:[...], stats:{agendaPops, handles}}
nlohmann::json dumpIGraph(const IGraph& ig, const Grammar& grammar);

}  // namespace fence
