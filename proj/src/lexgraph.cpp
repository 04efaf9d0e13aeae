#include "fence/lexgraph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "fence/regex.hpp"

namespace fence {

namespace {

std::size_t skipEnd(const Regex& skip, std::string_view input, std::size_t offset) {
  if (offset >= input.size()) return offset;
  return offset + skip.longestPrefix(input, offset).value_or(0);
}

// Keeps nodes that are reachable from `starting` and reach a node in `final`;
// sorts by (start, end, symbol), renumbers, and rebuilds `starting`.
LAGraph pruneWith(const LAGraph& g, const std::vector<bool>& isFinal) {
  const auto n = g.nodes.size();
  std::vector<bool> fwd(n, false), bwd(n, false);
  std::vector<TokenId> stack(g.starting.begin(), g.starting.end());
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    if (fwd[v]) continue;
    fwd[v] = true;
    for (auto w : g.nodes[v].following) stack.push_back(w);
  }
  for (TokenId v = 0; v < n; ++v)
    if (isFinal[v]) stack.push_back(v);
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    if (bwd[v]) continue;
    bwd[v] = true;
    for (auto w : g.nodes[v].preceding) stack.push_back(w);
  }

  std::vector<TokenId> kept;
  for (TokenId v = 0; v < n; ++v)
    if (fwd[v] && bwd[v]) kept.push_back(v);
  std::sort(kept.begin(), kept.end(), [&](TokenId a, TokenId b) {
    const auto &x = g.nodes[a], &y = g.nodes[b];
    return std::tie(x.start, x.end, x.symbol) < std::tie(y.start, y.end, y.symbol);
  });
  std::vector<std::optional<TokenId>> renumber(n);
  for (TokenId i = 0; i < kept.size(); ++i) renumber[kept[i]] = i;

  LAGraph out;
  out.input = g.input;
  for (auto old : kept) {
    TokenNode t = g.nodes[old];
    t.id = *renumber[old];
    auto remap = [&](std::vector<TokenId>& ids) {
      std::vector<TokenId> mapped;
      for (auto id : ids)
        if (renumber[id]) mapped.push_back(*renumber[id]);
      std::sort(mapped.begin(), mapped.end());
      ids = std::move(mapped);
    };
    remap(t.preceding);
    remap(t.following);
    out.nodes.push_back(std::move(t));
  }
  for (auto& t : out.nodes)
    if (t.preceding.empty()) out.starting.push_back(t.id);
  return out;
}

}  // namespace

LAGraph tokenize(const Grammar& grammar, std::string_view input) {
  if (grammar.tokens().empty()) throw LexError("grammar declares no tokens", 0);
  std::vector<std::pair<SymbolId, Regex>> defs;
  for (auto& t : grammar.tokens()) defs.emplace_back(t.symbol, Regex::compile(t.pattern));
  const auto skip = Regex::compile(grammar.skipPattern());

  LAGraph raw;
  raw.input = std::string(input);
  const auto first = skipEnd(skip, input, 0);
  if (first >= input.size()) return raw;

  std::set<std::size_t> frontier{first}, visited;
  std::map<std::size_t, std::vector<TokenId>> byStart;
  while (!frontier.empty()) {
    auto p = *frontier.begin();
    frontier.erase(frontier.begin());
    if (!visited.insert(p).second || p >= input.size()) continue;
    for (auto& [symbol, re] : defs) {
      auto len = re.longestPrefix(input, p);
      if (!len || *len == 0) continue;
      TokenNode t;
      t.id = raw.nodes.size();
      t.symbol = symbol;
      t.start = p;
      t.end = p + *len;
      t.lexeme = std::string(input.substr(p, *len));
      byStart[p].push_back(t.id);
      raw.nodes.push_back(std::move(t));
      frontier.insert(skipEnd(skip, input, p + *len));
    }
  }

  std::vector<bool> isFinal(raw.nodes.size(), false);
  std::size_t furthest = first;
  for (auto& t : raw.nodes) {
    auto next = skipEnd(skip, input, t.end);
    furthest = std::max(furthest, next);
    if (next >= input.size()) {
      isFinal[t.id] = true;
      continue;
    }
    if (auto it = byStart.find(next); it != byStart.end()) {
      for (auto y : it->second) {
        t.following.push_back(y);
        raw.nodes[y].preceding.push_back(t.id);
      }
    }
  }
  for (auto& t : raw.nodes)
    if (t.start == first) raw.starting.push_back(t.id);

  auto pruned = pruneWith(raw, isFinal);
  if (pruned.nodes.empty())
    throw LexError("no tokenization covers the input; furthest reachable offset " + std::to_string(furthest),
                   furthest);
  return pruned;
}

LAGraph prune(const LAGraph& graph) {
  std::size_t maxEnd = 0;
  for (auto& t : graph.nodes) maxEnd = std::max(maxEnd, t.end);
  std::vector<bool> isFinal(graph.nodes.size(), false);
  for (auto& t : graph.nodes) isFinal[t.id] = t.following.empty() && t.end == maxEnd;
  return pruneWith(graph, isFinal);
}

std::vector<std::vector<TokenId>> enumerateTokenPaths(const LAGraph& graph, std::size_t limit) {
  std::vector<std::vector<TokenId>> out;
  if (limit == 0) return out;
  if (graph.nodes.empty()) {
    out.emplace_back();
    return out;
  }
  std::vector<TokenId> path;
  // Iterative DFS keeps deep lattices off the call stack.
  struct Frame {
    TokenId node;
    std::size_t nextChild;
  };
  std::vector<Frame> stack;
  auto starting = graph.starting;
  std::sort(starting.begin(), starting.end());
  for (auto s : starting) {
    stack.push_back({s, 0});
    path.push_back(s);
    while (!stack.empty()) {
      auto& top = stack.back();
      const auto& node = graph.nodes[top.node];
      if (node.following.empty()) {
        out.push_back(path);
        if (out.size() >= limit) return out;
        stack.pop_back();
        path.pop_back();
        continue;
      }
      if (top.nextChild < node.following.size()) {
        auto child = node.following[top.nextChild++];
        stack.push_back({child, 0});
        path.push_back(child);
      } else {
        stack.pop_back();
        path.pop_back();
      }
    }
  }
  return out;
}

nlohmann::json serializeLAGraph(const LAGraph& graph, const Grammar& grammar) {
  nlohmann::json nodes = nlohmann::json::array();
  for (auto& t : graph.nodes) {
    nodes.push_back({{"id", t.id},
                     {"symbol", grammar.symbol(t.symbol).name},
                     {"start", t.start},
                     {"end", t.end},
                     {"preceding", t.preceding},
                     {"following", t.following}});
  }
  return {{"input", graph.input}, {"nodes", nodes}, {"starting", graph.starting}};
}

LAGraph loadLAGraph(const nlohmann::json& doc, const Grammar& grammar) {
  auto fail = [](const std::string& what) -> void { throw DocumentError("LA graph: " + what); };
  auto requireField = [&](const nlohmann::json& obj, const char* key, auto check, const char* kind) {
    if (!obj.is_object() || !obj.contains(key) || !check(obj.at(key)))
      fail(std::string("field '") + key + "' missing or not " + kind);
  };
  auto isUInt = [](const nlohmann::json& j) { return j.is_number_unsigned() || (j.is_number_integer() && j.get<long long>() >= 0); };
  auto isIdArray = [&](const nlohmann::json& j) {
    return j.is_array() && std::all_of(j.begin(), j.end(), isUInt);
  };

  requireField(doc, "input", [](auto& j) { return j.is_string(); }, "a string");
  requireField(doc, "nodes", [](auto& j) { return j.is_array(); }, "an array");
  requireField(doc, "starting", isIdArray, "an id array");

  LAGraph g;
  g.input = doc.at("input").get<std::string>();
  const auto inputSize = g.input.size();
  const auto skip = Regex::compile(grammar.skipPattern());

  std::map<std::size_t, TokenId> byDocId;
  for (auto& jn : doc.at("nodes")) {
    requireField(jn, "id", isUInt, "a non-negative integer");
    requireField(jn, "symbol", [](auto& j) { return j.is_string(); }, "a string");
    requireField(jn, "start", isUInt, "a non-negative integer");
    requireField(jn, "end", isUInt, "a non-negative integer");
    requireField(jn, "preceding", isIdArray, "an id array");
    requireField(jn, "following", isIdArray, "an id array");
    TokenNode t;
    t.id = g.nodes.size();
    auto docId = jn.at("id").get<std::size_t>();
    if (!byDocId.emplace(docId, t.id).second) fail("duplicate node id " + std::to_string(docId));
    auto name = jn.at("symbol").get<std::string>();
    auto sym = grammar.findSymbol(name);
    if (!sym || !grammar.isTerminal(*sym)) fail("symbol '" + name + "' is not a token of the grammar");
    t.symbol = *sym;
    t.start = jn.at("start").get<std::size_t>();
    t.end = jn.at("end").get<std::size_t>();
    if (t.start >= t.end) fail("zero-width or inverted token " + std::to_string(docId));
    if (t.end > inputSize) fail("token " + std::to_string(docId) + " extends past the input");
    t.lexeme = g.input.substr(t.start, t.end - t.start);
    g.nodes.push_back(std::move(t));
  }
  auto resolve = [&](std::size_t docId) {
    auto it = byDocId.find(docId);
    if (it == byDocId.end()) fail("reference to unknown node " + std::to_string(docId));
    return it->second;
  };
  {
    std::size_t i = 0;
    for (auto& jn : doc.at("nodes")) {
      auto& t = g.nodes[i++];
      for (auto& p : jn.at("preceding")) t.preceding.push_back(resolve(p.get<std::size_t>()));
      for (auto& f : jn.at("following")) t.following.push_back(resolve(f.get<std::size_t>()));
      std::sort(t.preceding.begin(), t.preceding.end());
      std::sort(t.following.begin(), t.following.end());
    }
  }
  std::set<TokenId> starting;
  for (auto& s : doc.at("starting")) starting.insert(resolve(s.get<std::size_t>()));

  std::set<std::tuple<std::size_t, std::size_t, SymbolId>> triples;
  auto skipCovers = [&](std::size_t from, std::size_t to) { return skipEnd(skip, g.input, from) >= to; };
  for (auto& t : g.nodes) {
    if (!triples.emplace(t.start, t.end, t.symbol).second)
      fail("duplicate token (" + std::to_string(t.start) + "," + std::to_string(t.end) + "," +
           grammar.symbol(t.symbol).name + ")");
    for (auto y : t.following) {
      auto& yn = g.nodes[y];
      if (!std::binary_search(yn.preceding.begin(), yn.preceding.end(), t.id))
        fail("asymmetric link " + std::to_string(t.id) + " -> " + std::to_string(y));
      if (yn.start < t.end || !skipCovers(t.end, yn.start))
        fail("link " + std::to_string(t.id) + " -> " + std::to_string(y) + " does not join adjacent tokens");
    }
    for (auto x : t.preceding) {
      auto& xn = g.nodes[x];
      if (!std::binary_search(xn.following.begin(), xn.following.end(), t.id))
        fail("asymmetric link " + std::to_string(x) + " -> " + std::to_string(t.id));
    }
    if (t.preceding.empty() != (starting.count(t.id) != 0))
      fail("starting set must be exactly the nodes without predecessors");
    if (t.following.empty() && !skipCovers(t.end, inputSize))
      fail("node " + std::to_string(t.id) + " is a dead end before the input end");
  }

  // Cores are shared per offset, so links must be determined by offsets.
  std::map<std::size_t, const std::vector<TokenId>*> precedingAt, followingAt;
  for (auto& t : g.nodes) {
    auto [pi, pnew] = precedingAt.emplace(t.start, &t.preceding);
    if (!pnew && *pi->second != t.preceding)
      fail("tokens starting at offset " + std::to_string(t.start) + " have different predecessors");
    auto [fi, fnew] = followingAt.emplace(t.end, &t.following);
    if (!fnew && *fi->second != t.following)
      fail("tokens ending at offset " + std::to_string(t.end) + " have different successors");
  }
  std::set<std::size_t> startOffsets;
  for (auto s : starting) startOffsets.insert(g.nodes[s].start);
  if (startOffsets.size() > 1) fail("starting tokens begin at different offsets");
  if (!g.nodes.empty() && !skipCovers(0, *startOffsets.begin()))
    fail("starting tokens do not begin the input");
  for (auto& t : g.nodes)
    if (!t.preceding.empty() && startOffsets.count(t.start))
      fail("token " + std::to_string(t.id) + " shares the starting offset but has predecessors");
  if (g.nodes.empty() && !skipCovers(0, inputSize)) fail("empty lattice over non-blank input");

  g.starting.assign(starting.begin(), starting.end());
  std::vector<bool> isFinal(g.nodes.size());
  for (auto& t : g.nodes) isFinal[t.id] = t.following.empty();
  auto canonical = pruneWith(g, isFinal);
  if (canonical.nodes.size() != g.nodes.size()) fail("graph contains nodes off every full path");
  return canonical;
}

}  // namespace fence
