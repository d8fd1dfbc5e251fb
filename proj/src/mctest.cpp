#include "inhomstat/mctest.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "inhomstat/error.hpp"
#include "inhomstat/format.hpp"
#include "inhomstat/parallel.hpp"
#include "inhomstat/simulate.hpp"

namespace inhomstat {

void validate(const DeviationKind& kind) {
  const bool spread_scaled =
      kind.type == DeviationType::StudentizedMad || kind.type == DeviationType::DirectionalQuantileMad;
  if (spread_scaled && kind.sided != Sidedness::TwoSided) {
    fail(ErrorKind::Usage, std::string(to_string(kind.type)) + " test is two-sided only");
  }
}

const char* to_string(DeviationType t) noexcept {
  switch (t) {
    case DeviationType::Mad: return "mad";
    case DeviationType::Dclf: return "dclf";
    case DeviationType::StudentizedMad: return "stud";
    case DeviationType::DirectionalQuantileMad: return "dq";
  }
  return "?";
}

const char* to_string(Sidedness s) noexcept {
  switch (s) {
    case Sidedness::TwoSided: return "two";
    case Sidedness::Greater: return "greater";
    case Sidedness::Less: return "less";
  }
  return "?";
}

DeviationType parse_deviation_type(const std::string& s) {
  if (s == "mad") return DeviationType::Mad;
  if (s == "dclf") return DeviationType::Dclf;
  if (s == "stud") return DeviationType::StudentizedMad;
  if (s == "dq") return DeviationType::DirectionalQuantileMad;
  fail(ErrorKind::Usage, "unknown test kind " + s);
}

Sidedness parse_sidedness(const std::string& s) {
  if (s == "two") return Sidedness::TwoSided;
  if (s == "greater") return Sidedness::Greater;
  if (s == "less") return Sidedness::Less;
  fail(ErrorKind::Usage, "unknown sidedness " + s);
}

const char* to_string(UnivariateStat s) noexcept { return s == UnivariateStat::K ? "K" : "J"; }
const char* to_string(CrossStat s) noexcept { return s == CrossStat::KCross ? "Kcross" : "Jcross"; }

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_grids(const SummaryFunction& observed, std::span<const SummaryFunction> sims) {
  for (const SummaryFunction& s : sims) {
    if (!(s.r == observed.r)) fail(ErrorKind::Usage, "incompatible grids");
  }
}

}  // namespace

Envelope pointwise_envelopes(const SummaryFunction& observed, std::span<const SummaryFunction> sims,
                             std::size_t rank) {
  check_grids(observed, sims);
  const std::size_t m = sims.size();
  if (m == 0 || rank < 1 || 2 * rank > m + 1) fail(ErrorKind::Usage, "envelope rank incompatible with nsim");
  const std::size_t nr = observed.r.size();
  Envelope env{observed.r,
               std::vector<double>(nr, kNaN),
               std::vector<double>(nr, kNaN),
               observed.value,
               observed.reference,
               std::vector<bool>(nr, false),
               m,
               rank};
  std::vector<double> column(m);
  for (std::size_t k = 0; k < nr; ++k) {
    bool ok = observed.defined[k];
    for (std::size_t j = 0; j < m && ok; ++j) ok = sims[j].defined[k];
    if (!ok) continue;
    for (std::size_t j = 0; j < m; ++j) column[j] = sims[j].value[k];
    std::sort(column.begin(), column.end());
    env.lower[k] = column[rank - 1];
    env.upper[k] = column[m - rank];
    env.defined[k] = true;
  }
  return env;
}

double rank_p_value(double t_obs, std::span<const double> t_sims) {
  std::size_t at_least = 0;
  for (double t : t_sims) {
    if (t >= t_obs) ++at_least;
  }
  return static_cast<double>(1 + at_least) / static_cast<double>(t_sims.size() + 1);
}

namespace {

/// Type-7 quantile of the sorted column with position `skip` removed
/// (skip == size means nothing removed).
double held_out_quantile(const std::vector<double>& sorted, std::size_t skip, double prob) {
  const std::size_t n = sorted.size() - (skip < sorted.size() ? 1 : 0);
  auto at = [&](std::size_t t) { return sorted[(skip < sorted.size() && t >= skip) ? t + 1 : t]; };
  const double h = static_cast<double>(n - 1) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, n - 1);
  return at(lo) + (h - static_cast<double>(lo)) * (at(hi) - at(lo));
}

struct EnsembleStats {
  std::vector<double> mean, sd, q_plus, q_minus;
  double floor = 0.0;
};

}  // namespace

TestResult deviation_test(const SummaryFunction& observed, std::span<const SummaryFunction> sims,
                          const DeviationKind& kind, double r_min, double r_max, ReferenceMode mode) {
  validate(kind);
  if (sims.size() < 2) fail(ErrorKind::Usage, "deviation test needs at least 2 simulations");
  check_grids(observed, sims);
  const std::size_t m = sims.size();

  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < observed.r.size(); ++k) {
    const double r = observed.r[k];
    if (r < r_min || r > r_max) continue;
    bool ok = observed.defined[k];
    for (std::size_t j = 0; j < m && ok; ++j) ok = sims[j].defined[k];
    if (ok) idx.push_back(k);
  }
  if (idx.empty()) fail(ErrorKind::Numeric, "empty range");
  const std::size_t nr = idx.size();

  // DCLF quadrature weights from the full grid spacing.
  std::vector<double> dr(nr, 1.0);
  const std::size_t ng = observed.r.size();
  if (ng > 1) {
    for (std::size_t a = 0; a < nr; ++a) {
      const std::size_t k = idx[a];
      dr[a] = k + 1 < ng ? observed.r[k + 1] - observed.r[k] : observed.r[k] - observed.r[k - 1];
    }
  }

  // Column-major copy of the simulated values over the retained r.
  std::vector<std::vector<double>> col(nr, std::vector<double>(m));
  std::vector<std::vector<double>> sorted(nr);
  std::vector<std::vector<std::size_t>> sorted_pos(nr, std::vector<std::size_t>(m));
  for (std::size_t a = 0; a < nr; ++a) {
    for (std::size_t j = 0; j < m; ++j) col[a][j] = sims[j].value[idx[a]];
    std::vector<std::size_t> order(m);
    for (std::size_t j = 0; j < m; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return col[a][x] < col[a][y]; });
    sorted[a].resize(m);
    for (std::size_t t = 0; t < m; ++t) {
      sorted[a][t] = col[a][order[t]];
      sorted_pos[a][order[t]] = t;
    }
  }

  const bool need_sd = kind.type == DeviationType::StudentizedMad;
  const bool need_quartiles = kind.type == DeviationType::DirectionalQuantileMad;

  // Ensemble statistics with simulation `skip` held out (skip == m: full ensemble).
  auto ensemble = [&](std::size_t skip) {
    EnsembleStats e;
    e.mean.resize(nr);
    if (need_sd) e.sd.resize(nr);
    if (need_quartiles) {
      e.q_plus.resize(nr);
      e.q_minus.resize(nr);
    }
    const double count = static_cast<double>(skip < m ? m - 1 : m);
    double max_abs_mean = 0.0;
    for (std::size_t a = 0; a < nr; ++a) {
      // Sums run over the sorted column so the result ignores simulation order.
      const std::size_t pos = skip < m ? sorted_pos[a][skip] : m;
      const std::vector<double>& v = sorted[a];
      double sum = 0.0;
      for (std::size_t t = 0; t < m; ++t) {
        if (t != pos) sum += v[t];
      }
      const double mean = sum / count;
      e.mean[a] = mean;
      max_abs_mean = std::max(max_abs_mean, std::fabs(mean));
      if (need_sd) {
        double ss = 0.0;
        for (std::size_t t = 0; t < m; ++t) {
          if (t != pos) ss += (v[t] - mean) * (v[t] - mean);
        }
        e.sd[a] = count > 1.0 ? std::sqrt(ss / (count - 1.0)) : 0.0;
      }
      if (need_quartiles) {
        const double med = held_out_quantile(sorted[a], pos, 0.5);
        e.q_plus[a] = held_out_quantile(sorted[a], pos, 0.75) - med;
        e.q_minus[a] = med - held_out_quantile(sorted[a], pos, 0.25);
      }
    }
    e.floor = 1e-10 + 1e-6 * max_abs_mean;
    return e;
  };

  auto score = [&](const SummaryFunction& curve, std::size_t sim_index) {
    const EnsembleStats e = ensemble(sim_index);
    double t = kind.type == DeviationType::Dclf ? 0.0 : -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < nr; ++a) {
      const std::size_t k = idx[a];
      const double centre = mode == ReferenceMode::SimulationMean ? e.mean[a] : curve.reference[k];
      const double d = curve.value[k] - centre;
      switch (kind.type) {
        case DeviationType::Mad: {
          const double v = kind.sided == Sidedness::TwoSided ? std::fabs(d) : kind.sided == Sidedness::Greater ? d : -d;
          t = std::max(t, v);
          break;
        }
        case DeviationType::Dclf: {
          double v = d;
          if (kind.sided == Sidedness::Greater) v = std::max(d, 0.0);
          if (kind.sided == Sidedness::Less) v = std::max(-d, 0.0);
          t += v * v * dr[a];
          break;
        }
        case DeviationType::StudentizedMad:
          t = std::max(t, std::fabs(d) / std::max(e.sd[a], e.floor));
          break;
        case DeviationType::DirectionalQuantileMad: {
          const double v = d >= 0.0 ? d / std::max(e.q_plus[a], e.floor) : -d / std::max(e.q_minus[a], e.floor);
          t = std::max(t, v);
          break;
        }
      }
    }
    return t;
  };

  TestResult res;
  res.kind = kind;
  res.reference = mode;
  res.statistic = to_string(observed.kind);
  res.observed_t = score(observed, m);
  res.simulated_t.resize(m);
  for (std::size_t j = 0; j < m; ++j) res.simulated_t[j] = score(sims[j], j);
  res.p_value = rank_p_value(res.observed_t, res.simulated_t);
  res.r_min = observed.r[idx.front()];
  res.r_max = observed.r[idx.back()];
  res.r_used = nr;
  return res;
}

// --- goodness of fit -------------------------------------------------------

namespace {

struct NullModel {
  RectWindow window;
  std::function<double(Point)> evaluate;  // floored intensity
  std::function<PointPattern(RngSeed)> sample;
  std::size_t grid_nx;
  std::size_t grid_ny;
};

SummaryFunction zero_curve(SummaryKind kind, const RGrid& r) {
  SummaryFunction f{kind, r, std::vector<double>(r.size(), 0.0), std::vector<double>(r.size(), 0.0),
                    std::vector<bool>(r.size(), true)};
  for (std::size_t k = 0; k < r.size(); ++k) f.reference[k] = std::numbers::pi * r[k] * r[k];
  return f;
}

// An empty simulated pattern has no nearest-neighbour distances; its J is
// taken as the Poisson value 1 so the r range is not lost.
SummaryFunction unit_curve(const RGrid& r) {
  return SummaryFunction{SummaryKind::J, r, std::vector<double>(r.size(), 1.0), std::vector<double>(r.size(), 1.0),
                         std::vector<bool>(r.size(), true)};
}

McOutcome assemble(SummaryFunction observed, std::vector<std::optional<SummaryFunction>>& sims,
                   const McOptions& opt) {
  std::vector<SummaryFunction> simulated;
  simulated.reserve(sims.size());
  for (auto& s : sims) simulated.push_back(std::move(*s));
  TestResult result = deviation_test(observed, simulated, opt.kind, opt.r_min, opt.r_max, opt.reference);
  Envelope envelope = pointwise_envelopes(observed, simulated, opt.envelope_rank);
  return McOutcome{std::move(result), std::move(observed), std::move(simulated), std::move(envelope)};
}

std::vector<double> evaluate_all(const std::function<double(Point)>& f, std::span<const Point> pts) {
  std::vector<double> v;
  v.reserve(pts.size());
  for (const Point& q : pts) v.push_back(f(q));
  return v;
}

McOutcome run_gof(const PointPattern& p, const NullModel& null, UnivariateStat stat, const McOptions& opt) {
  validate(opt.kind);
  if (opt.nsim < 2) fail(ErrorKind::Usage, "nsim must be at least 2");
  if (!(p.window() == null.window)) fail(ErrorKind::Usage, "pattern and intensity windows differ");
  if (p.empty()) fail(ErrorKind::Data, "insufficient points");
  const RGrid r = RGrid::uniform(opt.r_max, opt.r_points);
  r.check_window(p.window());
  const std::size_t lnx = opt.lattice_nx ? opt.lattice_nx : null.grid_nx;
  const std::size_t lny = opt.lattice_ny ? opt.lattice_ny : null.grid_ny;
  const LatticePoints lattice = LatticePoints::regular(p.window(), lnx, lny);

  auto statistic = [&](const PointPattern& pat, const std::vector<double>& lambda, bool simulated) {
    if (stat == UnivariateStat::K) {
      if (simulated && pat.empty()) return zero_curve(SummaryKind::K, r);
      return k_inhom(pat, lambda, r);
    }
    if (simulated && pat.empty()) return unit_curve(r);
    return j_inhom(pat, lambda, lattice, r);
  };

  auto sim_lambda = [&](const PointPattern& pat) {
    if (opt.reestimate_intensity && !pat.empty()) {
      if (!opt.reestimate_bandwidth) fail(ErrorKind::Usage, "re-estimation needs a bandwidth");
      const IntensitySurface s = kernel_intensity(pat, Bandwidth(*opt.reestimate_bandwidth), null.grid_nx, null.grid_ny);
      return s.evaluate(pat.points());
    }
    return evaluate_all(null.evaluate, pat.points());
  };

  SummaryFunction observed = statistic(p, evaluate_all(null.evaluate, p.points()), false);
  std::vector<std::optional<SummaryFunction>> sims(opt.nsim);
  parallel_for(opt.nsim, opt.threads, [&](std::size_t j) {
    const PointPattern sim = null.sample(RngSeed{opt.seed.seed, opt.seed.stream + 1 + j});
    sims[j] = statistic(sim, sim_lambda(sim), true);
  });
  return assemble(std::move(observed), sims, opt);
}

}  // namespace

McOutcome goodness_of_fit_test(const PointPattern& p, const IntensitySurface& null_lambda, UnivariateStat stat,
                               const McOptions& options) {
  const NullModel null{null_lambda.window(),
                       [&null_lambda](Point q) { return null_lambda.evaluate(q); },
                       [&null_lambda](RngSeed s) { return sample_inhom_poisson(null_lambda, s); },
                       null_lambda.nx(), null_lambda.ny()};
  return run_gof(p, null, stat, options);
}

McOutcome goodness_of_fit_test(const PointPattern& p, const AnalyticIntensity& null_lambda, UnivariateStat stat,
                               const McOptions& options) {
  const RectWindow& w = null_lambda.window;
  const std::size_t nx = 128;
  const auto ny = static_cast<std::size_t>(std::max(1.0, std::round(128.0 * w.height() / w.width())));
  const NullModel null{
      w,
      [&null_lambda](Point q) { return std::max(null_lambda.lambda(q), IntensitySurface::kFloor); },
      [&null_lambda](RngSeed s) {
        return sample_inhom_poisson(null_lambda.window, null_lambda.lambda, null_lambda.lambda_max, s);
      },
      nx, ny};
  return run_gof(p, null, stat, options);
}

// --- Lotwick-Silverman -----------------------------------------------------

std::pair<long, long> torus_shift_cells(const IntensitySurface& lambda1, RngSeed seed, std::size_t index) {
  Rng rng(RngSeed{seed.seed, seed.stream + 1 + index});
  const auto i = static_cast<long>(rng.below(lambda1.nx()));
  const auto j = static_cast<long>(rng.below(lambda1.ny()));
  return {i, j};
}

McOutcome lotwick_silverman_test(const PointPattern& p1, const PointPattern& p2, const IntensitySurface& lambda1,
                                 const IntensitySurface& lambda2, CrossStat stat, const McOptions& opt) {
  validate(opt.kind);
  if (opt.nsim < 2) fail(ErrorKind::Usage, "nsim must be at least 2");
  if (p1.empty() || p2.empty()) fail(ErrorKind::Data, "insufficient points");
  const RectWindow& w = p1.window();
  if (!(p2.window() == w) || !(lambda1.window() == w) || !(lambda2.window() == w)) {
    fail(ErrorKind::Usage, "patterns and intensities must share the window");
  }
  const RGrid r = RGrid::uniform(opt.r_max, opt.r_points);
  r.check_window(w);
  const std::size_t lnx = opt.lattice_nx ? opt.lattice_nx : lambda2.nx();
  const std::size_t lny = opt.lattice_ny ? opt.lattice_ny : lambda2.ny();
  const LatticePoints lattice = LatticePoints::regular(w, lnx, lny);

  const std::vector<double> lam2 = lambda2.evaluate(p2.points());
  // The type-2 empty-space function does not change under shifts of type 1.
  std::optional<SummaryFunction> f2;
  if (stat == CrossStat::JCross) f2 = f_inhom(p2, lam2, lattice, r);

  auto statistic = [&](const PointPattern& q1, const std::vector<double>& lam1) {
    if (stat == CrossStat::KCross) return k_cross_inhom(q1, p2, lam1, lam2, r);
    return j_ratio(g_cross_inhom(q1, p2, lam2, r), *f2, SummaryKind::JCross);
  };

  const std::vector<double> lam1 = lambda1.evaluate(p1.points());
  SummaryFunction observed = statistic(p1, lam1);
  std::vector<std::optional<SummaryFunction>> sims(opt.nsim);
  parallel_for(opt.nsim, opt.threads, [&](std::size_t j) {
    const auto [ci, cj] = torus_shift_cells(lambda1, opt.seed, j);
    const ShiftedSurface shifted(lambda1, ci, cj);
    PointPattern q1(w, torus_shift(p1.points(), shifted.shift(), w));
    // The shifted surface at a shifted point is the original surface at the
    // original point; carrying the values avoids re-rounding the coordinates.
    sims[j] = statistic(q1, lam1);
  });
  return assemble(std::move(observed), sims, opt);
}

// --- screening -------------------------------------------------------------

Bandwidth species_bandwidth(const PointPattern& p, const ScreenConfig& config) {
  if (config.bandwidth) return Bandwidth(*config.bandwidth);
  const auto candidates =
      default_bandwidth_candidates(p.window(), config.nx, config.ny, config.bandwidth_candidates);
  return cvl_bandwidth(p, candidates, config.cvl);
}

IntensitySurface species_intensity(const PointPattern& p, const ScreenConfig& config) {
  return kernel_intensity(p, species_bandwidth(p, config), config.nx, config.ny);
}

namespace {

RngSeed derived_seed(const RngSeed& base, const std::string& label) {
  return {mix64(base.seed ^ hash_string(label.data(), label.size())), base.stream};
}

}  // namespace

std::vector<ScreenRow> screen_species(const MultiTypePattern& m, const ScreenConfig& config) {
  std::vector<ScreenRow> rows;
  for (const std::string& code : species_over_threshold(m, config.min_count)) {
    const PointPattern& p = m.at(code);
    std::optional<IntensitySurface> lambda;
    std::optional<double> h;
    std::string surface_error;
    try {
      h = species_bandwidth(p, config).value();
      lambda = kernel_intensity(p, Bandwidth(*h), config.nx, config.ny);
    } catch (const Error& e) {
      surface_error = e.what();
    }
    for (const UnivariateStat stat : {UnivariateStat::K, UnivariateStat::J}) {
      McOptions opt = config.univariate;
      opt.kind = {DeviationType::Mad, stat == UnivariateStat::K ? config.k_sided : config.j_sided};
      opt.seed = derived_seed(config.univariate.seed, code + "|" + to_string(stat));
      if (opt.reestimate_intensity && !opt.reestimate_bandwidth) opt.reestimate_bandwidth = h;
      ScreenRow row{code, to_string(stat), opt.kind, std::nullopt, surface_error};
      if (lambda) {
        try {
          row.p_value = goodness_of_fit_test(p, *lambda, stat, opt).result.p_value;
        } catch (const Error& e) {
          row.note = e.what();
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<ScreenRow> screen_pairs(const MultiTypePattern& m, const ScreenConfig& config, RngSeed seed) {
  const auto qualifying = species_over_threshold(m, config.min_count);
  if (qualifying.size() < 2) fail(ErrorKind::Data, "fewer than 2 qualifying species");
  const Pairing pairing = random_pairing(qualifying, seed);

  std::map<std::string, IntensitySurface> surfaces;
  std::map<std::string, std::string> surface_errors;
  for (const SpeciesPair& pair : pairing.pairs) {
    for (const std::string& code : {pair.first, pair.second}) {
      try {
        surfaces.emplace(code, species_intensity(m.at(code), config));
      } catch (const Error& e) {
        surface_errors.emplace(code, e.what());
      }
    }
  }

  std::vector<ScreenRow> rows;
  for (const SpeciesPair& pair : pairing.pairs) {
    const std::string subject = pair.first + "/" + pair.second;
    for (const CrossStat stat : {CrossStat::KCross, CrossStat::JCross}) {
      McOptions opt = config.cross;
      opt.kind = {DeviationType::Mad, config.cross_sided};
      opt.seed = derived_seed(config.cross.seed, subject + "|" + to_string(stat));
      ScreenRow row{subject, to_string(stat), opt.kind, std::nullopt, {}};
      const auto e1 = surface_errors.find(pair.first);
      const auto e2 = surface_errors.find(pair.second);
      if (e1 != surface_errors.end() || e2 != surface_errors.end()) {
        row.note = e1 != surface_errors.end() ? e1->second : e2->second;
      } else {
        try {
          row.p_value = lotwick_silverman_test(m.at(pair.first), m.at(pair.second), surfaces.at(pair.first),
                                               surfaces.at(pair.second), stat, opt)
                            .result.p_value;
        } catch (const Error& e) {
          row.note = e.what();
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_screen_csv(std::ostream& out, std::span<const ScreenRow> rows) {
  std::ostringstream buf;
  buf << "species,stat,kind,sided,p_value,note\n";
  for (const ScreenRow& row : rows) {
    buf << row.subject << ',' << row.stat << ',' << to_string(row.kind.type) << ',' << to_string(row.kind.sided)
        << ',';
    if (row.p_value) {
      buf << format_double(*row.p_value);
    } else {
      buf << "NA";
    }
    std::string note = row.note;
    std::replace(note.begin(), note.end(), ',', ';');
    buf << ',' << note << '\n';
  }
  out << buf.str();
}

}  // namespace inhomstat
