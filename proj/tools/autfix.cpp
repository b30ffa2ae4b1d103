// autfix: fixed subgroups of free group automorphisms.
//
//   autfix fix pair.aut -L 8
//   autfix witness pair.aut
//   autfix verify pair.aut --witness chi
//   autfix render --text 'autfix-format 1;subgroup K rank 1:;  x^2'

#include <iostream>

#include "CLI11.hpp"
#include "autfix/cli.hpp"

int main(int argc, char** argv) {
  autfix::cli::Invocation inv;
  CLI::App app{"Fixed subgroups of free group automorphisms"};
  app.add_option("command", inv.command, "fix | intersect | witness | normalize | npaths | verify | render")
      ->required()
      ->check(CLI::IsMember(autfix::cli::commands()));
  app.add_option("input", inv.input, "input document");
  app.add_option("--text", inv.text, "inline document; ';' separates lines");
  app.add_option("-L,--depth", inv.depth, "oracle word length")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--bound", inv.bound, "length bound for Nielsen path searches")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--loops", inv.loops, "loop length for fixed-loop cross-checks")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--format", inv.format, "text or dot")->capture_default_str()->check(CLI::IsMember({"text", "dot"}));
  app.add_option("-o,--output", inv.output, "write the report here instead of stdout");
  app.add_option("--witness", inv.witness, "automorphism to check (verify)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return autfix::cli::kExitError;
  }
  return autfix::cli::run(inv, std::cout, std::cerr);
}
