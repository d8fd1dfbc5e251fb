#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>

#include "config.hpp"

namespace inhomstat::cli {

struct CommandArgs {
  RunConfig config;
  std::string census;
  std::string species;
  std::string pair;  // "A,B"
  std::string stat;
  std::string kind = "mad";
  std::optional<std::string> sided;  // default depends on the statistic
  std::string mode = "species";      // screen: species | pairs
  std::string out_dir = ".";

  // simulate
  std::string model = "mixed";  // poisson | thomas | mixed
  std::size_t species_count = 4;
  double rate = 0.002;           // Poisson points per m^2
  double parent_rate = 1e-4;     // Thomas parents per m^2
  double offspring = 10.0;
  double sigma = 3.0;
  std::string output = "census.csv";
};

// Each command writes its files into out_dir and lists them on `log`.
// Failures are reported by throwing inhomstat::Error.
void cmd_intensity(const CommandArgs& args, std::ostream& log);
void cmd_stats(const CommandArgs& args, std::ostream& log);
void cmd_test(const CommandArgs& args, std::ostream& log);
void cmd_screen(const CommandArgs& args, std::ostream& log);
void cmd_simulate(const CommandArgs& args, std::ostream& log);

}  // namespace inhomstat::cli
