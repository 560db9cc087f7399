#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "confgeo/errors.hpp"
#include "json_writer.hpp"
#include "run.hpp"

namespace {

using namespace confgeo::cli;

int emit(const RunResult& result, const std::string& out_path) {
  const std::string text = to_text(result.record);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "confgeo: cannot write " << out_path << "\n";
      return kError;
    }
    out << text;
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conformal invariants and equivalence of hypersurfaces"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::uint64_t seed = 0;
  bool no_timestamp = false;

  const char* names[] = {"invariant", "frame", "mobius-apply", "equivalence", "lemma-check"};
  const char* help[] = {"fundamental forms and the invariant I on a parameter grid",
                        "conformal frames, connection forms and structure residuals",
                        "apply a composition of generators to a surface",
                        "decide conformal equivalence of two surfaces (n >= 4)",
                        "residual of the quartic identity on a grid"};
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--config", config_path, "JSON configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "result file (default: standard output)");
    sub->add_option("--seed", seed, "seed for sampled directions");
    sub->add_flag("--no-timestamp", no_timestamp, "omit the timestamp field");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kError;
  }

  const Command command = *command_from_name(app.get_subcommands().front()->get_name());
  const RunOptions options{seed, !no_timestamp};

  std::ifstream in(config_path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();

  RunConfig config;
  try {
    config = parse_config(buffer.str());
  } catch (const ConfigError& e) {
    std::cerr << "confgeo: " << e.what() << " (field: " << (e.field().empty() ? "<root>" : e.field()) << ")\n";
    return emit(config_failure(command, e, options), out_path);
  }

  try {
    const RunResult result = run(command, config, options);
    if (result.exit_code == kRefusal) std::cerr << "confgeo: refused: " << result.record["refusal"]["message"].get<std::string>() << "\n";
    if (result.exit_code == kError) std::cerr << "confgeo: " << result.record["errors"].size() << " error(s), see the result record\n";
    return emit(result, out_path);
  } catch (const confgeo::Error& e) {
    std::cerr << "confgeo: " << e.kind() << ": " << e.what() << "\n";
    return kError;
  }
}
