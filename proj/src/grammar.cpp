#include "fence/grammar.hpp"

#include <algorithm>
#include <sstream>

namespace fence {

std::string_view toString(Associativity a) {
  switch (a) {
    case Associativity::left_to_right: return "left";
    case Associativity::right_to_left: return "right";
    case Associativity::non_associative: return "none";
  }
  return "none";
}

GrammarError::GrammarError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(line ? std::to_string(line) + ":" + std::to_string(column) + ": " + message
                              : message),
      line_(line),
      column_(column) {}

// ---------------------------------------------------------------------------
// PrecedenceOrder

void PrecedenceOrder::add(ProductionId preferred, ProductionId other) {
  declared_.emplace_back(preferred, other);
  closure_.emplace(preferred, other);
}

bool PrecedenceOrder::precedes(ProductionId preferred, ProductionId other) const {
  return closure_.count({preferred, other}) != 0;
}

void PrecedenceOrder::close() {
  closure_.clear();
  closure_.insert(declared_.begin(), declared_.end());
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<std::pair<ProductionId, ProductionId>> added;
    for (auto [a, b] : closure_)
      for (auto it = closure_.lower_bound({b, 0}); it != closure_.end() && it->first == b; ++it)
        if (!closure_.count({a, it->second})) added.emplace_back(a, it->second);
    for (auto& pr : added) grew |= closure_.insert(pr).second;
  }
}

// ---------------------------------------------------------------------------
// Constraint validation

bool ConstraintReport::ok() const {
  return std::none_of(issues.begin(), issues.end(), [](const ConstraintIssue& i) {
    return i.severity == ConstraintIssue::Severity::error;
  });
}

std::vector<ConstraintIssue> ConstraintReport::errors() const {
  std::vector<ConstraintIssue> out;
  for (auto& i : issues)
    if (i.severity == ConstraintIssue::Severity::error) out.push_back(i);
  return out;
}

std::vector<ConstraintIssue> ConstraintReport::warnings() const {
  std::vector<ConstraintIssue> out;
  for (auto& i : issues)
    if (i.severity == ConstraintIssue::Severity::warning) out.push_back(i);
  return out;
}

namespace {

std::string productionList(const std::vector<ProductionId>& ps) {
  std::string s;
  for (auto p : ps) {
    if (!s.empty()) s += ", ";
    s += "p" + std::to_string(p);
  }
  return s;
}

// Reports self-loops and every elementary cycle found by DFS over the
// declared pairs (one report per strongly connected component).
void checkOrder(const PrecedenceOrder& order, std::string_view kind, std::size_t productionCount,
                ConstraintReport& report) {
  std::map<ProductionId, std::vector<ProductionId>> edges;
  for (auto [a, b] : order.declared()) {
    bool bad = false;
    for (auto p : {a, b}) {
      if (p >= productionCount) {
        report.issues.push_back({ConstraintIssue::Severity::error,
                                 std::string(kind) + " precedence references unknown production p" +
                                     std::to_string(p),
                                 {p}});
        bad = true;
      }
    }
    if (bad) continue;
    if (a == b) {
      report.issues.push_back({ConstraintIssue::Severity::error,
                               std::string(kind) + " precedence is reflexive on p" + std::to_string(a),
                               {a}});
      continue;
    }
    edges[a].push_back(b);
  }

  // Tarjan SCC; any component with more than one member is a cycle.
  std::map<ProductionId, std::size_t> index, low;
  std::vector<ProductionId> stack;
  std::set<ProductionId> onStack;
  std::size_t counter = 0;
  std::function<void(ProductionId)> visit = [&](ProductionId v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    onStack.insert(v);
    for (auto w : edges[v]) {
      if (!index.count(w)) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (onStack.count(w)) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<ProductionId> component;
      ProductionId w;
      do {
        w = stack.back();
        stack.pop_back();
        onStack.erase(w);
        component.push_back(w);
      } while (w != v);
      if (component.size() > 1) {
        std::sort(component.begin(), component.end());
        report.issues.push_back({ConstraintIssue::Severity::error,
                                 std::string(kind) + " precedence cycle among " + productionList(component),
                                 component});
      }
    }
  };
  std::vector<ProductionId> nodes;
  for (auto& [a, _] : edges) nodes.push_back(a);
  for (auto v : nodes)
    if (!index.count(v)) visit(v);
}

}  // namespace

ConstraintReport validateConstraints(std::span<const Production> productions,
                                     const ConstraintSet& constraints) {
  ConstraintReport report;
  const auto count = productions.size();
  checkOrder(constraints.selection, "selection", count, report);
  checkOrder(constraints.composition, "composition", count, report);

  for (auto& [p, assoc] : constraints.associativity) {
    if (p >= count) {
      report.issues.push_back({ConstraintIssue::Severity::error,
                               "associativity references unknown production p" + std::to_string(p),
                               {p}});
      continue;
    }
    const auto& prod = productions[p];
    // The rule inspects the outermost rhs children for a node built by the
    // same production, which needs the lhs at that edge of a rhs of length >= 2.
    const bool leftEdge = !prod.rhs.empty() && prod.rhs.front() == prod.lhs;
    const bool rightEdge = !prod.rhs.empty() && prod.rhs.back() == prod.lhs;
    bool canFire = prod.rhs.size() >= 2;
    switch (assoc) {
      case Associativity::left_to_right: canFire = canFire && rightEdge; break;
      case Associativity::right_to_left: canFire = canFire && leftEdge; break;
      case Associativity::non_associative: canFire = canFire && (leftEdge || rightEdge); break;
    }
    if (!canFire)
      report.issues.push_back({ConstraintIssue::Severity::warning,
                               "associativity on p" + std::to_string(p) + " can never trigger",
                               {p}});
  }
  for (auto& [p, _] : constraints.custom)
    if (p >= count)
      report.issues.push_back({ConstraintIssue::Severity::error,
                               "evaluator references unknown production p" + std::to_string(p),
                               {p}});
  return report;
}

ConstraintReport validateConstraints(const Grammar& grammar) {
  return validateConstraints(grammar.productions(), grammar.constraints());
}

// ---------------------------------------------------------------------------
// Epsilon symbols

std::set<SymbolId> computeEpsilonSymbols(std::span<const Production> productions) {
  std::set<SymbolId> nullable;
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& p : productions) {
      if (nullable.count(p.lhs)) continue;
      if (std::all_of(p.rhs.begin(), p.rhs.end(), [&](SymbolId s) { return nullable.count(s) != 0; })) {
        nullable.insert(p.lhs);
        changed = true;
      }
    }
  }
  return nullable;
}

// ---------------------------------------------------------------------------
// Grammar

std::optional<SymbolId> Grammar::findSymbol(std::string_view name) const {
  auto it = byName_.find(std::string(name));
  if (it == byName_.end()) return std::nullopt;
  return it->second;
}

std::optional<ProductionId> Grammar::findProduction(std::string_view label) const {
  for (auto& p : productions_)
    if (!p.label.empty() && p.label == label) return p.id;
  return std::nullopt;
}

std::span<const ProductionId> Grammar::productionsFor(SymbolId lhs) const {
  if (lhs >= byLhs_.size()) return {};
  return byLhs_[lhs];
}

ProductionId Grammar::epsilonProduction(SymbolId nullable) const {
  auto it = epsilonProduction_.find(nullable);
  if (it == epsilonProduction_.end())
    throw std::logic_error("symbol " + symbols_.at(nullable).name + " is not nullable");
  return it->second;
}

bool Grammar::nullableSuffix(ProductionId p, std::size_t from) const {
  return nullableSuffix_.at(p).at(from);
}

Grammar Grammar::withConstraints(ConstraintSet constraints) const {
  Grammar g = *this;
  g.constraints_ = std::move(constraints);
  auto report = validateConstraints(g);
  if (!report.ok()) {
    std::string msg = "invalid constraints:";
    for (auto& e : report.errors()) msg += " " + e.message + ";";
    throw GrammarError(msg);
  }
  g.constraints_.selection.close();
  g.constraints_.composition.close();
  return g;
}

std::string Grammar::describe(ProductionId id) const {
  const auto& p = productions_.at(id);
  std::string s;
  if (!p.label.empty()) s += "[" + p.label + "] ";
  s += symbols_.at(p.lhs).name + " ::=";
  for (auto r : p.rhs) s += " " + symbols_.at(r).name;
  return s;
}

void Grammar::finalize() {
  byName_.clear();
  for (auto& s : symbols_) byName_.emplace(s.name, s.id);
  byLhs_.assign(symbols_.size(), {});
  for (auto& p : productions_) byLhs_[p.lhs].push_back(p.id);

  epsilon_ = computeEpsilonSymbols(productions_);

  // Round-stratified fixed point for canonical epsilon derivations.
  epsilonProduction_.clear();
  std::set<SymbolId> known;
  for (;;) {
    std::map<SymbolId, ProductionId> round;
    for (auto& p : productions_) {
      if (known.count(p.lhs) || round.count(p.lhs)) continue;
      if (std::all_of(p.rhs.begin(), p.rhs.end(), [&](SymbolId s) { return known.count(s) != 0; }))
        round.emplace(p.lhs, p.id);
    }
    if (round.empty()) break;
    for (auto& [s, p] : round) {
      known.insert(s);
      epsilonProduction_.emplace(s, p);
    }
  }

  nullableSuffix_.clear();
  for (auto& p : productions_) {
    std::vector<bool> suffix(p.rhs.size() + 1, true);
    for (std::size_t i = p.rhs.size(); i-- > 0;) suffix[i] = suffix[i + 1] && epsilon_.count(p.rhs[i]);
    nullableSuffix_.push_back(std::move(suffix));
  }
}

// ---------------------------------------------------------------------------
// GrammarBuilder

GrammarBuilder& GrammarBuilder::token(std::string_view name, std::string_view pattern) {
  tokens_.emplace_back(std::string(name), std::string(pattern));
  return *this;
}

ProductionId GrammarBuilder::production(std::string_view lhs, std::vector<std::string> rhs,
                                        std::string_view label) {
  productions_.push_back({std::string(lhs), std::move(rhs), std::string(label)});
  return productions_.size() - 1;
}

GrammarBuilder& GrammarBuilder::start(std::string_view name) {
  start_ = std::string(name);
  return *this;
}

GrammarBuilder& GrammarBuilder::skip(std::string_view pattern) {
  skip_ = std::string(pattern);
  return *this;
}

GrammarBuilder& GrammarBuilder::associativity(ProductionId p, Associativity a) {
  constraints_.associativity[p] = a;
  return *this;
}

GrammarBuilder& GrammarBuilder::preferSelect(ProductionId preferred, ProductionId other) {
  constraints_.selection.add(preferred, other);
  return *this;
}

GrammarBuilder& GrammarBuilder::preferCompose(ProductionId preferred, ProductionId other) {
  constraints_.composition.add(preferred, other);
  return *this;
}

GrammarBuilder& GrammarBuilder::evaluator(ProductionId p, Evaluator e) {
  constraints_.custom[p] = std::move(e);
  return *this;
}

Grammar GrammarBuilder::build() const {
  Grammar g;
  std::unordered_map<std::string, SymbolId> names;
  for (auto& [name, pattern] : tokens_) {
    if (names.count(name)) throw GrammarError("duplicate token name '" + name + "'");
    SymbolId id = g.symbols_.size();
    names.emplace(name, id);
    g.symbols_.push_back({id, name, SymbolKind::terminal});
    g.tokens_.push_back({id, pattern});
  }
  for (auto& p : productions_) {
    auto it = names.find(p.lhs);
    if (it == names.end()) {
      SymbolId id = g.symbols_.size();
      names.emplace(p.lhs, id);
      g.symbols_.push_back({id, p.lhs, SymbolKind::nonterminal});
    } else if (g.symbols_[it->second].isTerminal()) {
      throw GrammarError("'" + p.lhs + "' is declared as a token and used as a production lhs");
    }
  }
  std::set<std::string> labels;
  for (auto& p : productions_) {
    Production prod;
    prod.id = g.productions_.size();
    prod.lhs = names.at(p.lhs);
    prod.label = p.label;
    if (!p.label.empty() && !labels.insert(p.label).second)
      throw GrammarError("duplicate production label '" + p.label + "'");
    for (auto& r : p.rhs) {
      auto it = names.find(r);
      if (it == names.end()) throw GrammarError("unknown symbol '" + r + "' in " + p.lhs + " production");
      prod.rhs.push_back(it->second);
    }
    g.productions_.push_back(std::move(prod));
  }
  if (!start_) throw GrammarError("start symbol missing");
  auto st = names.find(*start_);
  if (st == names.end() || g.symbols_[st->second].isTerminal())
    throw GrammarError("start symbol '" + *start_ + "' is not a nonterminal");
  g.start_ = st->second;
  if (skip_) g.skip_ = *skip_;
  g.finalize();
  return g.withConstraints(constraints_);
}

bool structurallyEqual(const Grammar& a, const Grammar& b) {
  auto sameOrder = [](const PrecedenceOrder& x, const PrecedenceOrder& y) {
    auto dx = x.declared(), dy = y.declared();
    std::sort(dx.begin(), dx.end());
    std::sort(dy.begin(), dy.end());
    return dx == dy;
  };
  return a.symbols() == b.symbols() && a.productions() == b.productions() &&
         a.tokens() == b.tokens() && a.skipPattern() == b.skipPattern() && a.start() == b.start() &&
         a.constraints().associativity == b.constraints().associativity &&
         sameOrder(a.constraints().selection, b.constraints().selection) &&
         sameOrder(a.constraints().composition, b.constraints().composition);
}

}  // namespace fence
