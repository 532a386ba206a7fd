#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "indiga/errors.hpp"
#include "indiga/fixtures.hpp"
#include "indiga/session.hpp"
#include "indiga/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"indiga: truncated towers of quotient algebras, topologically integrable "
               "derivations, and restricted exponentials"};
  app.require_subcommand(1);
  app.set_version_flag("--version", indiga::kVersion);

  std::string script;
  indiga::SessionConfig config;
  std::string format = "json";

  CLI::App* run = app.add_subcommand("run", "Execute a session script");
  run->add_option("script", script, "Path to a .session file, or a bundled example name")
      ->required();
  run->add_option("--depth", config.depth, "Default audit depth (tower levels)");
  run->add_option("--power", config.power, "Default nilpotency power bound");
  run->add_option("--deg", config.deg, "Default degree bound for kernel searches");
  run->add_option("--seed", config.seed, "Sampling seed");
  run->add_option("--groebner-cap", config.groebner_cap, "Pair/step cap for basis completion");
  run->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"json", "text"}));
  run->add_flag("--fail-fast", config.fail_fast, "Stop at the first failed record");

  CLI::App* examples = app.add_subcommand("examples", "List bundled example sessions");

  CLI11_PARSE(app, argc, argv);

  if (examples->parsed()) {
    for (const indiga::Fixture& f : indiga::bundled_fixtures()) std::cout << f.name << "\n";
    return 0;
  }

  std::string name, text;
  std::error_code ec;
  if (std::filesystem::is_regular_file(script, ec)) {
    std::ifstream in(script);
    if (!in) {
      std::cerr << "cannot read " << script << "\n";
      return 1;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
    name = std::filesystem::path(script).stem().string();
  } else if (const indiga::Fixture* f = indiga::find_fixture(script)) {
    name = f->name;
    text = f->text;
  } else {
    std::cerr << "no such script or bundled example: " << script << "\n";
    return 1;
  }

  try {
    indiga::SessionScript parsed = indiga::parse_session(name, text);
    indiga::Report report = indiga::execute(parsed, config);
    std::cout << (format == "json" ? indiga::emit_json(report) : indiga::emit_text(report));
    return report.failed == 0 ? 0 : 1;
  } catch (const indiga::Error& e) {
    std::cerr << e.kind() << ": " << e.what() << "\n";
    return 1;
  }
}
