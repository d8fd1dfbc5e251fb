#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "inhomstat/error.hpp"

namespace {

using inhomstat::cli::CommandArgs;

// Values given on the command line; applied on top of the config file.
struct Overrides {
  std::optional<std::size_t> nsim;
  std::optional<std::uint64_t> seed;
  std::optional<int> census_id;
  std::optional<int> reference_census;
  std::optional<double> bandwidth;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, CommandArgs& a, Overrides& o, std::string& config_path) {
  cmd->add_option("--config", config_path, "key = value configuration file");
  cmd->add_option("--out-dir", a.out_dir, "directory for output files");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)");
}

void add_data(CLI::App* cmd, CommandArgs& a, Overrides& o) {
  cmd->add_option("--census", a.census, "census CSV file")->required();
  cmd->add_option("--census-id", o.census_id, "census analysed");
  cmd->add_option("--reference-census", o.reference_census, "earlier census for the null intensity");
  cmd->add_option("--bandwidth", o.bandwidth, "fixed kernel bandwidth in metres");
}

int report(const std::string& what, int code) {
  std::string msg = what;
  for (char& c : msg) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  std::cerr << "error: " << msg << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inhomogeneous point pattern analysis"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  CommandArgs args;
  Overrides o;
  std::string config_path;

  auto* intensity = app.add_subcommand("intensity", "kernel intensity surface for one species");
  add_common(intensity, args, o, config_path);
  add_data(intensity, args, o);
  intensity->add_option("--species", args.species, "species code")->required();

  auto* stats = app.add_subcommand("stats", "summary functions for a species or a pair");
  add_common(stats, args, o, config_path);
  add_data(stats, args, o);
  stats->add_option("--species", args.species, "species code");
  stats->add_option("--pair", args.pair, "two species codes A,B");

  auto* test = app.add_subcommand("test", "Monte Carlo test for a species or a pair");
  add_common(test, args, o, config_path);
  add_data(test, args, o);
  test->add_option("--species", args.species, "species code");
  test->add_option("--pair", args.pair, "two species codes A,B");
  test->add_option("--stat", args.stat, "K, J, Kcross or Jcross")
      ->check(CLI::IsMember({"K", "J", "Kcross", "Jcross"}));
  test->add_option("--kind", args.kind, "deviation: mad, dclf, stud or dq")
      ->check(CLI::IsMember({"mad", "dclf", "stud", "dq"}));
  test->add_option("--sided", args.sided, "two, greater or less")->check(CLI::IsMember({"two", "greater", "less"}));
  test->add_option("--nsim", o.nsim, "number of simulations");

  auto* screen = app.add_subcommand("screen", "screen all species or random species pairs");
  add_common(screen, args, o, config_path);
  add_data(screen, args, o);
  screen->add_option("--mode", args.mode, "species or pairs")->check(CLI::IsMember({"species", "pairs"}));
  screen->add_option("--nsim", o.nsim, "number of simulations");

  auto* simulate = app.add_subcommand("simulate", "write a synthetic census");
  add_common(simulate, args, o, config_path);
  simulate->add_option("--model", args.model, "poisson, thomas or mixed")
      ->check(CLI::IsMember({"poisson", "thomas", "mixed"}));
  simulate->add_option("--species-count", args.species_count, "number of species");
  simulate->add_option("--rate", args.rate, "Poisson intensity per m^2");
  simulate->add_option("--parent-rate", args.parent_rate, "Thomas parent intensity per m^2");
  simulate->add_option("--offspring", args.offspring, "mean offspring per parent");
  simulate->add_option("--sigma", args.sigma, "offspring spread in metres");
  simulate->add_option("--output", args.output, "file name inside --out-dir");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report(e.what(), static_cast<int>(inhomstat::ErrorKind::Usage));
  }

  try {
    if (!config_path.empty()) args.config = inhomstat::cli::load_config(config_path);
    if (o.nsim) args.config.nsim = *o.nsim;
    if (o.seed) args.config.seed = *o.seed;
    if (o.census_id) args.config.census_id = *o.census_id;
    if (o.reference_census) args.config.reference_census = *o.reference_census;
    if (o.bandwidth) args.config.bandwidth = *o.bandwidth;
    if (o.threads) args.config.threads = *o.threads;

    if (*intensity) inhomstat::cli::cmd_intensity(args, std::cout);
    if (*stats) inhomstat::cli::cmd_stats(args, std::cout);
    if (*test) inhomstat::cli::cmd_test(args, std::cout);
    if (*screen) inhomstat::cli::cmd_screen(args, std::cout);
    if (*simulate) inhomstat::cli::cmd_simulate(args, std::cout);
  } catch (const inhomstat::Error& e) {
    return report(e.what(), e.exit_code());
  } catch (const std::exception& e) {
    return report(e.what(), static_cast<int>(inhomstat::ErrorKind::Numeric));
  }
  return 0;
}
