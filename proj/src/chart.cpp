#include "fence/chart.hpp"

#include <algorithm>
#include <limits>

namespace fence {

ChartParser::ChartParser(const Grammar& grammar, ELAGraph graph, AgendaOrder order)
    : grammar_(grammar), graph_(std::move(graph)), order_(order) {
  index_.resize(graph_.cores().size());
  handleGid_.resize(graph_.cores().size());
  for (auto& c : graph_.cores())
    for (auto n : c.following) index_[c.id].following[graph_.node(n).symbol].push_back(n);
}

void ChartParser::push(CoreId core, std::size_t handle, NodeId node) {
  const std::uint64_t key = (static_cast<std::uint64_t>(handleGid_[core][handle]) << 32) | node;
  if (!alreadyGenerated_.insert(key).second) return;
  agenda_.push_back({core, handle, node});
  ++stats_.agendaPushes;
}

void ChartParser::initialize() {
  for (auto& c : graph_.cores())
    for (auto& p : grammar_.productions())
      if (!p.isEpsilon()) addHandle(p.id, 0, std::nullopt, c.position, c.id);
}

void ChartParser::addHandle(ProductionId p, std::size_t dot, std::optional<NodeId> first,
                            std::size_t startIndex, CoreId core) {
  const auto& rhs = grammar_.production(p).rhs;
  auto& idx = index_[core];
  for (; dot < rhs.size(); ++dot) {
    Handle h{p, dot, first, startIndex};
    auto [it, inserted] = idx.handles.emplace(h, graph_.core(core).handles.size());
    const auto local = it->second;
    if (inserted) {
      graph_.mutableCore(core).handles.push_back(h);
      idx.waiting[rhs[dot]].push_back(local);
      if (nextGid_ == std::numeric_limits<std::uint32_t>::max())
        throw std::length_error("chart handle count exceeds 2^32");
      handleGid_[core].push_back(nextGid_++);
      ++stats_.handles;
    }
    if (auto f = idx.following.find(rhs[dot]); f != idx.following.end())
      for (auto n : f->second) push(core, local, n);
    if (!grammar_.isNullable(rhs[dot])) break;
  }
}

void ChartParser::run() {
  while (!agenda_.empty()) {
    AgendaEntry e;
    if (order_ == AgendaOrder::lifo) {
      e = agenda_.back();
      agenda_.pop_back();
    } else {
      e = agenda_.front();
      agenda_.pop_front();
    }
    ++stats_.agendaPops;
    process(e);
  }
}

void ChartParser::process(const AgendaEntry& entry) {
  const Handle h = graph_.core(entry.core).handles[entry.handle];
  const auto& prod = grammar_.production(h.production);
  const auto next = h.dot + 1;
  if (grammar_.nullableSuffix(h.production, next)) reduce(h, entry.node);
  if (next < prod.rhs.size()) {
    const auto first = h.first ? h.first : std::optional<NodeId>(entry.node);
    const auto cores = graph_.node(entry.node).followingCores;
    for (auto c : cores) addHandle(h.production, next, first, h.startIndex, c);
  }
}

void ChartParser::reduce(const Handle& h, NodeId last) {
  const auto& prod = grammar_.production(h.production);
  const NodeId firstNode = h.first ? *h.first : last;
  const auto end = graph_.node(last).end;
  const NodeId nn = graph_.internNode(h.startIndex, end, prod.lhs).first;

  const auto following = graph_.node(last).followingCores;
  for (auto c : following) graph_.linkFollowing(nn, c);

  const auto preceding = graph_.node(firstNode).precedingCores;
  for (auto c : preceding) {
    if (!graph_.linkPreceding(nn, c)) continue;
    auto& idx = index_[c];
    idx.following[prod.lhs].push_back(nn);
    // Re-awaken handles in that core waiting for the new node's symbol.
    if (auto w = idx.waiting.find(prod.lhs); w != idx.waiting.end()) {
      const auto waiting = w->second;
      for (auto local : waiting) push(c, local, nn);
    }
  }
}

IGraph ChartParser::finish() && {
  IGraph ig;
  ig.stats = stats_;
  const auto startCore = graph_.startingCore();
  const auto lastCore = graph_.lastCore();
  for (auto& n : graph_.nodes()) {
    if (n.symbol != grammar_.start()) continue;
    if (n.precedingCores == std::vector<CoreId>{startCore} && n.followingCores == std::vector<CoreId>{lastCore})
      ig.starting.push_back(n.id);
  }
  ig.acceptsEmpty = graph_.tokenCount() == 0 && grammar_.isNullable(grammar_.start());
  ig.graph = std::move(graph_);
  return ig;
}

IGraph runChart(const Grammar& grammar, ELAGraph graph, AgendaOrder order) {
  ChartParser parser(grammar, std::move(graph), order);
  parser.initialize();
  parser.run();
  return std::move(parser).finish();
}

IGraphStatistics igraphStatistics(const IGraph& ig) {
  IGraphStatistics s;
  for (auto& n : ig.graph.nodes()) {
    ++s.nodes;
    if (n.isToken()) ++s.tokenNodes;
    s.edges += n.precedingCores.size() + n.followingCores.size();
  }
  s.starting = ig.starting.size();
  return s;
}

std::vector<NodeId> longestNonterminalSpans(const IGraph& ig, const Grammar& grammar) {
  std::size_t best = 0;
  std::vector<NodeId> out;
  for (auto& n : ig.graph.nodes()) {
    if (grammar.isTerminal(n.symbol)) continue;
    auto span = n.end - n.start;
    if (span > best) {
      best = span;
      out.clear();
    }
    if (span == best) out.push_back(n.id);
  }
  return out;
}

nlohmann::json dumpIGraph(const IGraph& ig, const Grammar& grammar) {
  nlohmann::json nodes = nlohmann::json::array();
  for (auto& n : ig.graph.nodes())
    nodes.push_back({{"id", n.id}, {"start", n.start}, {"end", n.end}, {"symbol", grammar.symbol(n.symbol).name}});
  auto st = igraphStatistics(ig);
  return {{"nodes", nodes},
          {"starting", ig.starting},
          {"acceptsEmpty", ig.acceptsEmpty},
          {"stats",
           {{"agendaPops", ig.stats.agendaPops},
            {"agendaPushes", ig.stats.agendaPushes},
            {"handles", ig.stats.handles},
            {"nodeCount", st.nodes},
            {"edgeCount", st.edges}}}};
}

}  // namespace fence
