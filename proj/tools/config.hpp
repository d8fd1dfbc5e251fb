#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "inhomstat/geometry.hpp"
#include "inhomstat/mctest.hpp"
#include "inhomstat/pattern.hpp"

namespace inhomstat::cli {

/// Run configuration. Loaded from a `key = value` file; command-line flags
/// override individual fields afterwards.
struct RunConfig {
  RectWindow window{0.0, 0.0, 1000.0, 500.0};
  std::size_t nx = 256;
  std::size_t ny = 128;
  std::optional<double> bandwidth;  // unset: criterion over the candidate grid
  std::size_t bandwidth_candidates = 20;
  bool leave_one_out = false;
  double r_max = 25.0;
  double r_max_cross = 30.0;
  std::size_t r_points = 512;
  std::size_t nsim = 99;
  std::uint64_t seed = 1;
  StatusMap statuses;
  std::size_t min_count = 50;
  int census_id = 1;
  std::optional<int> reference_census;
  ReferenceMode reference_mode = ReferenceMode::SimulationMean;
  bool reestimate_intensity = false;
  std::size_t envelope_rank = 1;
  unsigned threads = 0;
};

/// Applies `key = value` lines ('#' starts a comment). Throws Usage on unknown
/// keys or malformed values, naming the line.
void apply_config(RunConfig& config, std::istream& in);
RunConfig load_config(const std::string& path);

/// Throws Usage when ranges or sizes are inconsistent.
void validate(const RunConfig& config);

McOptions univariate_options(const RunConfig& config);
McOptions cross_options(const RunConfig& config);
ScreenConfig screen_config(const RunConfig& config);

}  // namespace inhomstat::cli
