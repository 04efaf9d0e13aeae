#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fence {

using SymbolId = std::size_t;
using ProductionId = std::size_t;

enum class SymbolKind { terminal, nonterminal };

struct Symbol {
  SymbolId id = 0;
  std::string name;
  SymbolKind kind = SymbolKind::terminal;

  bool isTerminal() const { return kind == SymbolKind::terminal; }
  friend bool operator==(const Symbol&, const Symbol&) = default;
};

struct Production {
  ProductionId id = 0;
  SymbolId lhs = 0;
  std::vector<SymbolId> rhs;
  std::string label;  // optional `[name]` used by precedence declarations

  bool isEpsilon() const { return rhs.empty(); }
  friend bool operator==(const Production&, const Production&) = default;
};

struct TokenDef {
  SymbolId symbol = 0;
  std::string pattern;
  friend bool operator==(const TokenDef&, const TokenDef&) = default;
};

enum class Associativity { left_to_right, right_to_left, non_associative };

std::string_view toString(Associativity a);

// Read-only view of a candidate explicit node handed to constraint checks
// and custom evaluators.
struct CandidateChild {
  SymbolId symbol = 0;
  std::size_t start = 0;
  std::size_t end = 0;
  std::optional<ProductionId> production;  // empty for token leaves
  std::string_view lexeme;                 // tokens only
  bool epsilon = false;                    // skipped nullable position
};

struct CandidateView {
  ProductionId production = 0;
  SymbolId symbol = 0;
  std::size_t start = 0;
  std::size_t end = 0;
  std::span<const CandidateChild> children;
};

using Evaluator = std::function<bool(const CandidateView&)>;

// Strict partial order over productions. Pairs are declared as
// (preferred, other); `precedes` answers on the transitive closure.
class PrecedenceOrder {
 public:
  void add(ProductionId preferred, ProductionId other);
  bool precedes(ProductionId preferred, ProductionId other) const;

  const std::vector<std::pair<ProductionId, ProductionId>>& declared() const { return declared_; }
  bool empty() const { return declared_.empty(); }

  // Recomputes the closure; call after the last `add`.
  void close();

 private:
  std::vector<std::pair<ProductionId, ProductionId>> declared_;
  std::set<std::pair<ProductionId, ProductionId>> closure_;
};

struct ConstraintSet {
  std::map<ProductionId, Associativity> associativity;
  PrecedenceOrder selection;
  PrecedenceOrder composition;
  std::map<ProductionId, Evaluator> custom;

  bool empty() const {
    return associativity.empty() && selection.empty() && composition.empty() && custom.empty();
  }
};

struct ConstraintIssue {
  enum class Severity { error, warning };
  Severity severity = Severity::error;
  std::string message;
  std::vector<ProductionId> productions;
};

struct ConstraintReport {
  std::vector<ConstraintIssue> issues;

  bool ok() const;
  std::vector<ConstraintIssue> errors() const;
  std::vector<ConstraintIssue> warnings() const;
};

class GrammarError : public std::runtime_error {
 public:
  GrammarError(const std::string& message, std::size_t line = 0, std::size_t column = 0);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Least fixed point of nullable nonterminals over `productions`.
std::set<SymbolId> computeEpsilonSymbols(std::span<const Production> productions);

// Checks irreflexivity/acyclicity of both precedence relations, that every
// referenced production exists, and flags associativity declarations that can
// never fire. Every violation is reported.
ConstraintReport validateConstraints(std::span<const Production> productions,
                                     const ConstraintSet& constraints);

class Grammar;
ConstraintReport validateConstraints(const Grammar& grammar);

// Immutable context-free grammar with lexical definitions and constraints.
// Build through GrammarBuilder or parseGrammarText.
class Grammar {
 public:
  const std::vector<Symbol>& symbols() const { return symbols_; }
  const std::vector<Production>& productions() const { return productions_; }
  const std::vector<TokenDef>& tokens() const { return tokens_; }
  const std::string& skipPattern() const { return skip_; }
  SymbolId start() const { return start_; }
  const ConstraintSet& constraints() const { return constraints_; }
  const std::set<SymbolId>& epsilonSymbols() const { return epsilon_; }

  const Symbol& symbol(SymbolId id) const { return symbols_.at(id); }
  const Production& production(ProductionId id) const { return productions_.at(id); }
  std::optional<SymbolId> findSymbol(std::string_view name) const;
  std::optional<ProductionId> findProduction(std::string_view label) const;

  bool isNullable(SymbolId s) const { return epsilon_.count(s) != 0; }
  bool isTerminal(SymbolId s) const { return symbols_.at(s).isTerminal(); }

  // Productions with the given lhs, in id order.
  std::span<const ProductionId> productionsFor(SymbolId lhs) const;

  // Canonical minimal epsilon derivation of a nullable symbol: the production
  // used at the fixed-point round in which the symbol first became nullable
  // (lowest id among ties). All its rhs symbols became nullable strictly
  // earlier, so unfolding it always terminates.
  ProductionId epsilonProduction(SymbolId nullable) const;

  // True if every rhs symbol from `from` onwards is nullable.
  bool nullableSuffix(ProductionId p, std::size_t from) const;

  // Copy with a different constraint set; validates and closes the orders.
  Grammar withConstraints(ConstraintSet constraints) const;
  Grammar withoutConstraints() const { return withConstraints({}); }

  std::string describe(ProductionId p) const;

 private:
  friend class GrammarBuilder;
  void finalize();

  std::vector<Symbol> symbols_;
  std::vector<Production> productions_;
  std::vector<TokenDef> tokens_;
  std::string skip_ = "[ \\t\\r\\n]+";
  SymbolId start_ = 0;
  ConstraintSet constraints_;

  std::set<SymbolId> epsilon_;
  std::unordered_map<std::string, SymbolId> byName_;
  std::vector<std::vector<ProductionId>> byLhs_;
  std::map<SymbolId, ProductionId> epsilonProduction_;
  std::vector<std::vector<bool>> nullableSuffix_;
};

class GrammarBuilder {
 public:
  // Terminal ids follow token declaration order; nonterminal ids follow first
  // appearance as a production lhs.
  GrammarBuilder& token(std::string_view name, std::string_view pattern);

  // Production ids follow declaration order starting at 0.
  ProductionId production(std::string_view lhs, std::vector<std::string> rhs,
                          std::string_view label = {});

  GrammarBuilder& start(std::string_view name);
  GrammarBuilder& skip(std::string_view pattern);
  GrammarBuilder& associativity(ProductionId p, Associativity a);
  GrammarBuilder& preferSelect(ProductionId preferred, ProductionId other);
  GrammarBuilder& preferCompose(ProductionId preferred, ProductionId other);
  GrammarBuilder& evaluator(ProductionId p, Evaluator e);

  // Resolves rhs names, validates, computes epsilon symbols. Throws
  // GrammarError.
  Grammar build() const;

 private:
  struct PendingProduction {
    std::string lhs;
    std::vector<std::string> rhs;
    std::string label;
  };
  std::vector<std::pair<std::string, std::string>> tokens_;
  std::vector<PendingProduction> productions_;
  std::optional<std::string> start_;
  std::optional<std::string> skip_;
  ConstraintSet constraints_;
};

// Text format: %token / %skip / %start / productions / %assoc / %prefer.
Grammar parseGrammarText(std::string_view source);
std::string writeGrammarText(const Grammar& grammar);

// Structural equality ignoring custom evaluators.
bool structurallyEqual(const Grammar& a, const Grammar& b);

}  // namespace fence
