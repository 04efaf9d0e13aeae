#include "fence/elagraph.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace fence {

namespace {
inline void hashCombine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

bool insertSorted(std::vector<std::size_t>& v, std::size_t x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it != v.end() && *it == x) return false;
  v.insert(it, x);
  return true;
}
}  // namespace

std::size_t HandleHash::operator()(const Handle& h) const noexcept {
  std::size_t seed = h.production;
  hashCombine(seed, h.dot);
  hashCombine(seed, h.first ? *h.first + 1 : 0);
  hashCombine(seed, h.startIndex);
  return seed;
}

std::size_t ELAGraph::KeyHash::operator()(const Key& k) const noexcept {
  std::size_t seed = k.start;
  hashCombine(seed, k.end);
  hashCombine(seed, k.symbol);
  return seed;
}

std::optional<NodeId> ELAGraph::findNode(std::size_t start, std::size_t end, SymbolId symbol) const {
  auto it = index_.find({start, end, symbol});
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<CoreId> ELAGraph::coreAt(std::size_t position) const {
  auto it = coreByPosition_.find(position);
  if (it == coreByPosition_.end()) return std::nullopt;
  return it->second;
}

std::pair<NodeId, bool> ELAGraph::internNode(std::size_t start, std::size_t end, SymbolId symbol) {
  auto [it, inserted] = index_.emplace(Key{start, end, symbol}, nodes_.size());
  if (inserted) {
    ImplicitNode n;
    n.id = nodes_.size();
    n.start = start;
    n.end = end;
    n.symbol = symbol;
    nodes_.push_back(std::move(n));
  }
  return {it->second, inserted};
}

bool ELAGraph::linkPreceding(NodeId node, CoreId core) {
  if (!insertSorted(nodes_.at(node).precedingCores, core)) return false;
  cores_.at(core).following.push_back(node);
  return true;
}

bool ELAGraph::linkFollowing(NodeId node, CoreId core) {
  if (!insertSorted(nodes_.at(node).followingCores, core)) return false;
  cores_.at(core).preceding.push_back(node);
  return true;
}

ELAGraph buildELAGraph(const LAGraph& la) {
  ELAGraph g;
  g.input_ = la.input;
  g.tokenCount_ = la.nodes.size();

  auto addCore = [&](std::size_t position) {
    auto [it, inserted] = g.coreByPosition_.emplace(position, g.cores_.size());
    if (inserted) {
      Core c;
      c.id = g.cores_.size();
      c.position = position;
      g.cores_.push_back(std::move(c));
    }
    return it->second;
  };

  if (la.nodes.empty()) {
    g.startingCore_ = g.lastCore_ = addCore(la.input.size());
    return g;
  }

  std::set<std::size_t> starts;
  for (auto& t : la.nodes) starts.insert(t.start);
  // Starting offset first so the starting core gets id 0.
  std::size_t firstStart = la.nodes.at(la.starting.front()).start;
  g.startingCore_ = addCore(firstStart);
  for (auto s : starts) addCore(s);
  g.lastCore_ = addCore(la.input.size());

  for (auto& t : la.nodes) {
    auto [id, inserted] = g.internNode(t.start, t.end, t.symbol);
    g.nodes_[id].token = t.id;
  }
  for (auto& t : la.nodes) {
    g.linkPreceding(t.id, g.coreByPosition_.at(t.start));
    if (t.following.empty()) {
      g.linkFollowing(t.id, g.lastCore_);
    } else {
      for (auto y : t.following) g.linkFollowing(t.id, g.coreByPosition_.at(la.nodes[y].start));
    }
  }
  for (auto& c : g.cores_) {
    std::sort(c.preceding.begin(), c.preceding.end());
    std::sort(c.following.begin(), c.following.end());
  }
  return g;
}

std::vector<std::vector<NodeId>> enumerateELAPaths(const ELAGraph& ela, std::size_t limit) {
  std::vector<std::vector<NodeId>> out;
  std::vector<NodeId> path;
  std::function<bool(CoreId)> walk = [&](CoreId c) {
    if (c == ela.lastCore()) {
      out.push_back(path);
      return out.size() < limit;
    }
    for (auto n : ela.core(c).following) {
      if (!ela.node(n).isToken()) continue;
      path.push_back(n);
      for (auto next : ela.node(n).followingCores)
        if (!walk(next)) return false;
      path.pop_back();
    }
    return true;
  };
  if (limit > 0) walk(ela.startingCore());
  return out;
}

nlohmann::json serializeELAGraph(const ELAGraph& ela, const Grammar& grammar) {
  nlohmann::json cores = nlohmann::json::array();
  for (auto& c : ela.cores()) {
    auto preceding = c.preceding, following = c.following;
    std::sort(preceding.begin(), preceding.end());
    std::sort(following.begin(), following.end());
    cores.push_back({{"id", c.id},
                     {"position", c.position},
                     {"handleCount", c.handles.size()},
                     {"preceding", preceding},
                     {"following", following}});
  }
  nlohmann::json nodes = nlohmann::json::array();
  for (auto& n : ela.nodes()) {
    nlohmann::json jn = {{"id", n.id},
                         {"symbol", grammar.symbol(n.symbol).name},
                         {"start", n.start},
                         {"end", n.end},
                         {"precedingCores", n.precedingCores},
                         {"followingCores", n.followingCores}};
    if (n.token) jn["token"] = *n.token;
    nodes.push_back(std::move(jn));
  }
  return {{"cores", cores},
          {"nodes", nodes},
          {"startingCore", ela.startingCore()},
          {"lastCore", ela.lastCore()}};
}

}  // namespace fence
