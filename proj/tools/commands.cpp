#include "commands.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <set>
#include <sstream>

#include "inhomstat/error.hpp"
#include "inhomstat/intensity.hpp"
#include "inhomstat/mctest.hpp"
#include "inhomstat/pattern.hpp"
#include "inhomstat/simulate.hpp"
#include "inhomstat/sumstats.hpp"
#include "report.hpp"

namespace inhomstat::cli {

namespace fs = std::filesystem;

namespace {

struct Loaded {
  Census census;
  std::set<std::string> species;  // codes present in the analysed census
};

Loaded load(const CommandArgs& a) {
  if (a.census.empty()) fail(ErrorKind::Usage, "--census is required");
  validate(a.config);
  Loaded l{read_census_file(a.census, a.config.window, a.config.statuses), {}};
  for (const auto& r : l.census.records) {
    if (r.census_id == a.config.census_id) l.species.insert(r.species);
  }
  if (l.species.empty()) {
    fail(ErrorKind::Data, "census " + std::to_string(a.config.census_id) + " has no records");
  }
  return l;
}

void require_species(const Loaded& l, const std::string& code) {
  if (!l.species.count(code)) fail(ErrorKind::Data, "unknown species " + code);
}

std::pair<std::string, std::string> parse_pair(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) fail(ErrorKind::Usage, "--pair needs two species codes A,B");
  std::string a = text.substr(0, comma), b = text.substr(comma + 1);
  if (a.empty() || b.empty() || b.find(',') != std::string::npos) {
    fail(ErrorKind::Usage, "--pair needs two species codes A,B");
  }
  if (a == b) fail(ErrorKind::Usage, "--pair needs two different species");
  return {a, b};
}

PointPattern alive_pattern(const CommandArgs& a, const Loaded& l, const std::string& code) {
  require_species(l, code);
  return extract_species(l.census.records, code, a.config.census_id, StatusFilter::Alive, a.config.window);
}

Bandwidth choose_bandwidth(const CommandArgs& a, const PointPattern& p) {
  if (a.config.bandwidth) return Bandwidth(*a.config.bandwidth);
  const auto candidates =
      default_bandwidth_candidates(p.window(), a.config.nx, a.config.ny, a.config.bandwidth_candidates);
  return cvl_bandwidth(p, candidates, CvlOptions{a.config.leave_one_out});
}

struct Estimate {
  IntensitySurface surface;
  double h;
};

// Kernel estimate from the pattern itself, or the null intensity built from a
// reference census when one is configured.
Estimate estimate(const CommandArgs& a, const Loaded& l, const std::string& code, const PointPattern& p) {
  const RunConfig& c = a.config;
  if (c.reference_census) {
    const auto& recs = l.census.records;
    const PointPattern ref = null_reference_pattern(recs, recs, code, *c.reference_census, c.census_id, c.window);
    const Bandwidth h = choose_bandwidth(a, ref);
    return {null_intensity(recs, recs, code, *c.reference_census, c.census_id, h, c.nx, c.ny, c.window), h.value()};
  }
  if (p.empty()) fail(ErrorKind::Data, "species " + code + " has no alive trees");
  const Bandwidth h = choose_bandwidth(a, p);
  return {kernel_intensity(p, h, c.nx, c.ny), h.value()};
}

fs::path out_path(const CommandArgs& a, const std::string& name) {
  std::error_code ec;
  fs::create_directories(a.out_dir, ec);
  if (ec) fail(ErrorKind::Data, "cannot create " + a.out_dir);
  return fs::path(a.out_dir) / name;
}

void emit(const CommandArgs& a, std::ostream& log, const std::string& name, const std::string& content) {
  const fs::path path = out_path(a, name);
  write_file_atomic(path, content);
  log << path.string() << '\n';
}

// File-name friendly form of a species code.
std::string slug(std::string s) {
  for (char& c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
  }
  return s;
}

DeviationKind deviation_kind(const CommandArgs& a, Sidedness fallback) {
  DeviationKind k;
  k.type = parse_deviation_type(a.kind);
  if (a.sided) {
    k.sided = parse_sidedness(*a.sided);
  } else {
    const bool plain = k.type == DeviationType::Mad || k.type == DeviationType::Dclf;
    k.sided = plain ? fallback : Sidedness::TwoSided;
  }
  validate(k);
  return k;
}

}  // namespace

void cmd_intensity(const CommandArgs& a, std::ostream& log) {
  if (a.species.empty()) fail(ErrorKind::Usage, "--species is required");
  const Loaded l = load(a);
  const PointPattern p = alive_pattern(a, l, a.species);
  const Estimate e = estimate(a, l, a.species, p);
  const std::string base = "intensity_" + slug(a.species);
  emit(a, log, base + ".csv", surface_csv(e.surface));
  std::ostringstream title;
  title << "Intensity of " << a.species << " (h = " << e.h << " m)";
  emit(a, log, base + ".svg", heatmap_svg(e.surface, title.str()));
}

void cmd_stats(const CommandArgs& a, std::ostream& log) {
  const Loaded l = load(a);
  const RunConfig& c = a.config;
  if (!a.pair.empty()) {
    const auto [s1, s2] = parse_pair(a.pair);
    const PointPattern p1 = alive_pattern(a, l, s1);
    const PointPattern p2 = alive_pattern(a, l, s2);
    const Estimate e1 = estimate(a, l, s1, p1);
    const Estimate e2 = estimate(a, l, s2, p2);
    const RGrid r = RGrid::uniform(c.r_max_cross, c.r_points);
    const auto lattice = LatticePoints::for_surface(e2.surface);
    const std::string base = slug(s1) + "_" + slug(s2);
    emit(a, log, "kcross_" + base + ".csv", summary_csv(k_cross_inhom(p1, p2, e1.surface, e2.surface, r)));
    emit(a, log, "jcross_" + base + ".csv", summary_csv(j_cross_inhom(p1, p2, e2.surface, lattice, r)));
    return;
  }
  if (a.species.empty()) fail(ErrorKind::Usage, "--species or --pair is required");
  const PointPattern p = alive_pattern(a, l, a.species);
  const Estimate e = estimate(a, l, a.species, p);
  const RGrid r = RGrid::uniform(c.r_max, c.r_points);
  const auto lattice = LatticePoints::for_surface(e.surface);
  const std::string base = slug(a.species);
  const auto f = f_inhom(p, e.surface, lattice, r);
  const auto g = g_inhom(p, e.surface, r);
  emit(a, log, "k_" + base + ".csv", summary_csv(k_inhom(p, e.surface, r)));
  emit(a, log, "f_" + base + ".csv", summary_csv(f));
  emit(a, log, "g_" + base + ".csv", summary_csv(g));
  emit(a, log, "j_" + base + ".csv", summary_csv(j_ratio(g, f, SummaryKind::J)));
}

void cmd_test(const CommandArgs& a, std::ostream& log) {
  const bool pair_mode = !a.pair.empty();
  std::string stat = a.stat.empty() ? (pair_mode ? "Kcross" : "K") : a.stat;
  const bool cross_stat = stat == "Kcross" || stat == "Jcross";
  if (stat != "K" && stat != "J" && !cross_stat) fail(ErrorKind::Usage, "unknown --stat " + stat);
  if (pair_mode != cross_stat) {
    fail(ErrorKind::Usage, pair_mode ? "--pair needs --stat Kcross or Jcross" : "--stat " + stat + " needs --pair");
  }
  // Parse the pair before touching the data so usage errors win.
  std::pair<std::string, std::string> codes;
  if (pair_mode) {
    codes = parse_pair(a.pair);
  } else if (a.species.empty()) {
    fail(ErrorKind::Usage, "--species or --pair is required");
  }

  const Loaded l = load(a);
  const RunConfig& c = a.config;
  ResultContext ctx;
  ctx.seed = c.seed;
  ctx.nsim = c.nsim;

  std::optional<McOutcome> out;
  std::string base;
  if (pair_mode) {
    const auto& [s1, s2] = codes;
    const PointPattern p1 = alive_pattern(a, l, s1);
    const PointPattern p2 = alive_pattern(a, l, s2);
    const Estimate e1 = estimate(a, l, s1, p1);
    const Estimate e2 = estimate(a, l, s2, p2);
    McOptions o = cross_options(c);
    o.kind = deviation_kind(a, Sidedness::TwoSided);
    out = lotwick_silverman_test(p1, p2, e1.surface, e2.surface,
                                 stat == "Kcross" ? CrossStat::KCross : CrossStat::JCross, o);
    ctx.subject = s1 + "/" + s2;
    base = slug(stat) + "_" + slug(s1) + "_" + slug(s2);
  } else {
    const PointPattern p = alive_pattern(a, l, a.species);
    const Estimate e = estimate(a, l, a.species, p);
    McOptions o = univariate_options(c);
    o.kind = deviation_kind(a, stat == "K" ? Sidedness::Greater : Sidedness::Less);
    if (o.reestimate_intensity) o.reestimate_bandwidth = e.h;
    out = goodness_of_fit_test(p, e.surface, stat == "K" ? UnivariateStat::K : UnivariateStat::J, o);
    ctx.subject = a.species;
    ctx.bandwidth = e.h;
    base = slug(stat) + "_" + slug(a.species);
  }

  emit(a, log, "test_" + base + ".json", result_json(out->result, ctx));
  emit(a, log, "envelope_" + base + ".csv", envelope_csv(out->envelope));
  std::ostringstream title;
  title << stat << " for " << ctx.subject << ": " << to_string(out->result.kind.type) << " p = " << out->result.p_value;
  emit(a, log, "envelope_" + base + ".svg", envelope_svg(out->envelope, title.str()));
}

void cmd_screen(const CommandArgs& a, std::ostream& log) {
  if (a.mode != "species" && a.mode != "pairs") fail(ErrorKind::Usage, "--mode must be species or pairs");
  const Loaded l = load(a);
  const RunConfig& c = a.config;
  const MultiTypePattern m = build_multitype(l.census.records, c.census_id, StatusFilter::Alive, c.window);
  const ScreenConfig sc = screen_config(c);

  std::vector<ScreenRow> rows;
  if (a.mode == "species") {
    rows = screen_species(m, sc);
  } else {
    rows = screen_pairs(m, sc, RngSeed{c.seed, 0});
  }
  emit(a, log, "screen_" + a.mode + ".csv", screen_csv(rows));
  emit(a, log, "screen_" + a.mode + ".svg",
       pvalue_histogram_svg(rows, "Distribution of MAD test p-values (" + a.mode + ")"));
}

void cmd_simulate(const CommandArgs& a, std::ostream& log) {
  if (a.model != "poisson" && a.model != "thomas" && a.model != "mixed") {
    fail(ErrorKind::Usage, "--model must be poisson, thomas or mixed");
  }
  if (a.species_count == 0) fail(ErrorKind::Usage, "--species-count must be positive");
  if (!(a.rate > 0.0) || !(a.parent_rate > 0.0) || !(a.offspring > 0.0) || !(a.sigma > 0.0)) {
    fail(ErrorKind::Usage, "simulation rates must be positive");
  }
  const RunConfig& c = a.config;
  std::vector<CensusRecord> records;
  const std::size_t width = std::to_string(a.species_count).size();
  for (std::size_t s = 0; s < a.species_count; ++s) {
    std::string code = std::to_string(s + 1);
    code = "SP" + std::string(width - code.size(), '0') + code;
    const RngSeed seed{c.seed, s};
    const bool thomas = a.model == "thomas" || (a.model == "mixed" && s % 2 == 0);
    const PointPattern p = thomas ? sample_thomas({a.parent_rate, a.offspring, a.sigma}, c.window, seed)
                                  : sample_homogeneous_poisson(c.window, a.rate, seed);
    for (std::size_t i = 0; i < p.size(); ++i) {
      records.push_back({code + "-" + std::to_string(i + 1), code, p[i].x, p[i].y, Status::Alive, c.census_id});
    }
  }
  std::ostringstream out;
  write_census(out, records);
  emit(a, log, a.output, out.str());
}

}  // namespace inhomstat::cli
