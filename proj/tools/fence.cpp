#include <iostream>
#include <limits>
#include <string>

#include "CLI11.hpp"

#include "fence/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fence: ambiguity-preserving chart parser with constraint enforcement"};
  app.require_subcommand(1);

  fence::SessionConfig config;
  auto* parse = app.add_subcommand("parse", "Parse one input and emit its parse forest");
  parse->add_option("--grammar", config.grammarPath, "Grammar file")->required();
  auto* input = parse->add_option("--input", config.inputPath, "Input file");
  auto* text = parse->add_option("--text", config.text, "Inline input text");
  input->excludes(text);
  text->excludes(input);
  parse->add_flag("--count", config.countOnly, "Print the number of surviving parse trees");
  parse->add_option("--enumerate", config.enumerateLimit, "Emit up to N parse trees")
      ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()))
      ->type_name("N");
  std::string format = "json";
  parse->add_option("--format", format, "Output format (default json)")
      ->check(CLI::IsMember({"json", "dot"}))
      ->type_name("json|dot");
  parse->add_flag("--dump-la", config.dumpLA, "Emit the lexical analysis graph");
  parse->add_flag("--dump-ela", config.dumpELA, "Emit the extended lexical analysis graph");
  parse->add_flag("--dump-ig", config.dumpIG, "Emit the implicit parse graph");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return fence::kExitUsage;
  }
  config.format = format == "dot" ? fence::OutputFormat::dot : fence::OutputFormat::json;
  return fence::runPipeline(config, std::cout, std::cerr);
}
