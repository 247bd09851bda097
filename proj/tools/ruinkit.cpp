#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ruinkit/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Ruin transforms for sequential phase-type claim streams"};
  app.require_subcommand(1, 1);

  std::string config;
  std::string out;
  std::uint64_t seed = 0;

  for (const char* name : {"describe", "ruin", "transform", "bounds", "simulate"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "CSV output path (default: stdout)");
    sub->add_option("--seed", seed, "Random seed, overrides command.seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ruinkit::kExitConfig;
  }

  const CLI::App* sub = app.get_subcommands().front();
  std::optional<std::string> out_path;
  if (sub->count("--out")) out_path = out;
  std::optional<std::uint64_t> seed_override;
  if (sub->count("--seed")) seed_override = seed;
  return ruinkit::execute(sub->get_name(), config, out_path, seed_override, std::cout, std::cerr);
}
