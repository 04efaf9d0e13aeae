#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "fence/chart.hpp"
#include "fence/enforce.hpp"
#include "fence/grammar.hpp"
#include "fence/lexgraph.hpp"

namespace fence {

enum class OutputFormat { json, dot };

struct SessionConfig {
  std::string grammarPath;
  std::optional<std::string> inputPath;
  std::optional<std::string> text;
  bool dumpLA = false;
  bool dumpELA = false;
  bool dumpIG = false;
  OutputFormat format = OutputFormat::json;
  std::optional<std::size_t> enumerateLimit;
  bool countOnly = false;
};

// Exit codes of runPipeline / the CLI.
inline constexpr int kExitAccepted = 0;
inline constexpr int kExitRejected = 1;
inline constexpr int kExitUsage = 2;

// Everything one parse produced. `lexError` is set when tokenization failed;
// the later phases are then empty.
struct ParseSession {
  std::optional<LAGraph> la;
  std::optional<IGraph> ig;
  std::optional<EGraph> eg;
  EnforceStats enforceStats;
  std::optional<std::string> lexError;
  std::size_t lexFurthest = 0;

  bool accepted() const { return eg && !eg->roots.empty(); }
};

// tokenize -> buildELAGraph -> runChart -> expand starting nodes.
ParseSession parse(const Grammar& grammar, std::string_view input, EnforceOptions options = {});

// Furthest tokenized offset and the largest nonterminal spans found.
std::string explainRejection(const ParseSession& session, const Grammar& grammar);

// Returns the exit code; documents go to `out`, diagnostics to `err`.
int runPipeline(const SessionConfig& config, std::ostream& out, std::ostream& err);

}  // namespace fence
