#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fhelm/config.hpp"
#include "fhelm/errors.hpp"
#include "fhelm/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral experiments for the fractional Helmholtz operator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool verbose = false;
  for (const auto& name : fhelm::experiment_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "seed override");
    sub->add_flag("--verbose", verbose, "print status and timing to stderr");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  const std::string experiment = app.get_subcommands().front()->get_name();

  fhelm::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = fhelm::RunConfig::load(config_path);
  } catch (const fhelm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (cfg.experiment.empty()) cfg.experiment = experiment;
  if (cfg.experiment != experiment) {
    std::cerr << "error: config names experiment '" << cfg.experiment << "' but the subcommand is '"
              << experiment << "'\n";
    return 2;
  }

  fhelm::RunOptions opts;
  if (!out_dir.empty()) opts.out_dir = out_dir;
  opts.seed = seed;
  opts.verbose = verbose;
  const fhelm::RunOutcome r = fhelm::run(cfg, opts);
  if (r.exit_code != 0) std::cerr << (r.exit_code == 2 ? "error: " : "fail: ") << r.message << "\n";
  if (verbose)
    for (const auto& a : r.artifacts) std::cerr << "wrote " << a.string() << "\n";
  return r.exit_code;
}
