#include "config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <vector>

#include "inhomstat/error.hpp"
#include "inhomstat/sumstats.hpp"

namespace inhomstat::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

[[noreturn]] void bad_value(std::size_t line, const std::string& key) {
  fail(ErrorKind::Usage, "config line " + std::to_string(line) + ": invalid value for " + key);
}

template <class T>
T parse_number(const std::string& text, std::size_t line, const std::string& key) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) bad_value(line, key);
  return value;
}

bool parse_bool(const std::string& text, std::size_t line, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  bad_value(line, key);
}

}  // namespace

void apply_config(RunConfig& c, std::istream& in) {
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::Usage, "config line " + std::to_string(line) + ": expected key = value");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));

    if (key == "window") {
      const auto parts = split_list(value);
      if (parts.size() != 4) bad_value(line, key);
      c.window = RectWindow(parse_number<double>(parts[0], line, key), parse_number<double>(parts[1], line, key),
                            parse_number<double>(parts[2], line, key), parse_number<double>(parts[3], line, key));
    } else if (key == "grid") {
      const auto parts = split_list(value);
      if (parts.size() != 2) bad_value(line, key);
      c.nx = parse_number<std::size_t>(parts[0], line, key);
      c.ny = parse_number<std::size_t>(parts[1], line, key);
    } else if (key == "bandwidth") {
      if (value == "auto") {
        c.bandwidth.reset();
      } else {
        c.bandwidth = parse_number<double>(value, line, key);
      }
    } else if (key == "bandwidth_candidates") {
      c.bandwidth_candidates = parse_number<std::size_t>(value, line, key);
    } else if (key == "leave_one_out") {
      c.leave_one_out = parse_bool(value, line, key);
    } else if (key == "r_max") {
      c.r_max = parse_number<double>(value, line, key);
    } else if (key == "r_max_cross") {
      c.r_max_cross = parse_number<double>(value, line, key);
    } else if (key == "r_points") {
      c.r_points = parse_number<std::size_t>(value, line, key);
    } else if (key == "nsim") {
      c.nsim = parse_number<std::size_t>(value, line, key);
    } else if (key == "seed") {
      c.seed = parse_number<std::uint64_t>(value, line, key);
    } else if (key == "min_count") {
      c.min_count = parse_number<std::size_t>(value, line, key);
    } else if (key == "census_id") {
      c.census_id = parse_number<int>(value, line, key);
    } else if (key == "reference_census") {
      if (value == "none") {
        c.reference_census.reset();
      } else {
        c.reference_census = parse_number<int>(value, line, key);
      }
    } else if (key == "reference_mode") {
      if (value == "mean") {
        c.reference_mode = ReferenceMode::SimulationMean;
      } else if (value == "theoretical") {
        c.reference_mode = ReferenceMode::Theoretical;
      } else {
        bad_value(line, key);
      }
    } else if (key == "reestimate_intensity") {
      c.reestimate_intensity = parse_bool(value, line, key);
    } else if (key == "envelope_rank") {
      c.envelope_rank = parse_number<std::size_t>(value, line, key);
    } else if (key == "threads") {
      c.threads = parse_number<unsigned>(value, line, key);
    } else if (key.rfind("status.", 0) == 0 && key.size() > 7) {
      const std::string code = key.substr(7);
      if (value == "alive") {
        c.statuses.codes[code] = Status::Alive;
      } else if (value == "dead") {
        c.statuses.codes[code] = Status::Dead;
      } else {
        bad_value(line, key);
      }
    } else {
      fail(ErrorKind::Usage, "config line " + std::to_string(line) + ": unknown key " + key);
    }
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Usage, "cannot open config " + path);
  RunConfig c;
  apply_config(c, in);
  return c;
}

void validate(const RunConfig& c) {
  if (c.nx < 2 || c.ny < 2) fail(ErrorKind::Usage, "grid needs at least 2 x 2 cells");
  if (c.nsim < 2) fail(ErrorKind::Usage, "nsim must be at least 2");
  if (c.r_points < 2) fail(ErrorKind::Usage, "r_points must be at least 2");
  if (c.census_id < 1) fail(ErrorKind::Usage, "census_id must be positive");
  if (c.bandwidth && !(*c.bandwidth > 0.0)) fail(ErrorKind::Usage, "bandwidth must be positive");
  if (c.bandwidth_candidates == 0) fail(ErrorKind::Usage, "bandwidth_candidates must be positive");
  if (c.envelope_rank < 1 || 2 * c.envelope_rank > c.nsim + 1) fail(ErrorKind::Usage, "envelope_rank too large");
  RGrid::uniform(c.r_max, c.r_points).check_window(c.window);
  RGrid::uniform(c.r_max_cross, c.r_points).check_window(c.window);
}

namespace {

McOptions base_options(const RunConfig& c, double r_max) {
  McOptions o;
  o.nsim = c.nsim;
  o.r_max = r_max;
  o.r_points = c.r_points;
  o.reference = c.reference_mode;
  o.seed = RngSeed{c.seed, 0};
  o.envelope_rank = c.envelope_rank;
  o.reestimate_intensity = c.reestimate_intensity;
  o.threads = c.threads;
  return o;
}

}  // namespace

McOptions univariate_options(const RunConfig& c) { return base_options(c, c.r_max); }
McOptions cross_options(const RunConfig& c) { return base_options(c, c.r_max_cross); }

ScreenConfig screen_config(const RunConfig& c) {
  ScreenConfig s;
  s.min_count = c.min_count;
  s.bandwidth = c.bandwidth;
  s.bandwidth_candidates = c.bandwidth_candidates;
  s.cvl.leave_one_out = c.leave_one_out;
  s.nx = c.nx;
  s.ny = c.ny;
  s.univariate = univariate_options(c);
  s.cross = cross_options(c);
  return s;
}

}  // namespace inhomstat::cli
