#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "inhomstat/intensity.hpp"
#include "inhomstat/pattern.hpp"
#include "inhomstat/rng.hpp"
#include "inhomstat/sumstats.hpp"

namespace inhomstat {

enum class DeviationType { Mad, Dclf, StudentizedMad, DirectionalQuantileMad };
enum class Sidedness { TwoSided, Greater, Less };
/// Deviations are measured from the (held-out) simulation mean or from the
/// curve's theoretical Poisson reference.
enum class ReferenceMode { SimulationMean, Theoretical };

struct DeviationKind {
  DeviationType type = DeviationType::Mad;
  Sidedness sided = Sidedness::TwoSided;
  friend bool operator==(const DeviationKind&, const DeviationKind&) = default;
};

/// Throws Usage for one-sided studentized or directional-quantile tests.
void validate(const DeviationKind& kind);

const char* to_string(DeviationType t) noexcept;
const char* to_string(Sidedness s) noexcept;
/// Accepts mad|dclf|stud|dq.
DeviationType parse_deviation_type(const std::string& s);
/// Accepts two|greater|less.
Sidedness parse_sidedness(const std::string& s);

struct Envelope {
  RGrid r;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> observed;
  std::vector<double> reference;
  std::vector<bool> defined;
  std::size_t nsim;
  std::size_t rank;
};

/// k-th smallest / k-th largest simulated value at each r.
/// Throws Usage "incompatible grids" or on an invalid rank.
Envelope pointwise_envelopes(const SummaryFunction& observed, std::span<const SummaryFunction> sims,
                             std::size_t rank = 1);

struct TestResult {
  std::string statistic;
  DeviationKind kind;
  ReferenceMode reference = ReferenceMode::SimulationMean;
  double observed_t = 0.0;
  std::vector<double> simulated_t;
  double p_value = 1.0;
  double r_min = 0.0;
  double r_max = 0.0;
  std::size_t r_used = 0;
};

/// (1 + #{t_sim >= t_obs}) / (nsim + 1).
double rank_p_value(double t_obs, std::span<const double> t_sims);

/// Global deviation test. Each simulated curve is scored against the ensemble
/// with itself held out; r values where any curve is undefined are dropped.
/// Throws Usage with fewer than 2 simulations, Numeric "empty range".
TestResult deviation_test(const SummaryFunction& observed, std::span<const SummaryFunction> sims,
                          const DeviationKind& kind, double r_min, double r_max,
                          ReferenceMode mode = ReferenceMode::SimulationMean);

enum class UnivariateStat { K, J };
enum class CrossStat { KCross, JCross };

const char* to_string(UnivariateStat s) noexcept;
const char* to_string(CrossStat s) noexcept;

struct McOptions {
  std::size_t nsim = 99;
  double r_min = 0.0;
  double r_max = 25.0;
  std::size_t r_points = 512;
  DeviationKind kind{};
  ReferenceMode reference = ReferenceMode::SimulationMean;
  /// Simulation j uses stream seed.stream + 1 + j.
  RngSeed seed{1, 0};
  std::size_t envelope_rank = 1;
  /// Re-estimate a kernel intensity for every simulated pattern instead of
  /// reusing the null surface.
  bool reestimate_intensity = false;
  std::optional<double> reestimate_bandwidth;
  /// Empty-space lattice; 0 uses the intensity grid (or 128 columns for analytic intensities).
  std::size_t lattice_nx = 0;
  std::size_t lattice_ny = 0;
  unsigned threads = 0;
};

struct McOutcome {
  TestResult result;
  SummaryFunction observed;
  std::vector<SummaryFunction> simulated;
  Envelope envelope;
};

/// Intensity given as a function with a known upper bound.
struct AnalyticIntensity {
  RectWindow window;
  std::function<double(Point)> lambda;
  double lambda_max;
};

/// Monte Carlo test of an inhomogeneous Poisson null with the given intensity.
/// Simulated patterns are evaluated with the null intensity unless
/// reestimate_intensity is set.
McOutcome goodness_of_fit_test(const PointPattern& p, const IntensitySurface& null_lambda, UnivariateStat stat,
                               const McOptions& options);
McOutcome goodness_of_fit_test(const PointPattern& p, const AnalyticIntensity& null_lambda, UnivariateStat stat,
                               const McOptions& options);

/// Torus-shift independence test. Pattern 1 and its intensity surface are
/// shifted together by whole grid cells of lambda1.
McOutcome lotwick_silverman_test(const PointPattern& p1, const PointPattern& p2, const IntensitySurface& lambda1,
                                 const IntensitySurface& lambda2, CrossStat stat, const McOptions& options);

/// Grid-cell shift drawn for simulation `index` of lotwick_silverman_test.
std::pair<long, long> torus_shift_cells(const IntensitySurface& lambda1, RngSeed seed, std::size_t index);

// --- screening -------------------------------------------------------------

struct ScreenConfig {
  std::size_t min_count = 50;
  std::optional<double> bandwidth;
  std::size_t bandwidth_candidates = 20;
  CvlOptions cvl{};
  std::size_t nx = 256;
  std::size_t ny = 128;
  McOptions univariate{};
  McOptions cross{};
  Sidedness k_sided = Sidedness::Greater;
  Sidedness j_sided = Sidedness::Less;
  Sidedness cross_sided = Sidedness::TwoSided;
};

struct ScreenRow {
  std::string subject;  ///< species code, or "A/B" for a pair
  std::string stat;
  DeviationKind kind;
  std::optional<double> p_value;
  std::string note;
};

/// Fixed bandwidth, or the criterion choice over the default candidate grid.
Bandwidth species_bandwidth(const PointPattern& p, const ScreenConfig& config);
/// Kernel intensity of one species at species_bandwidth().
IntensitySurface species_intensity(const PointPattern& p, const ScreenConfig& config);

/// MAD tests with K and J for every species above the count threshold.
std::vector<ScreenRow> screen_species(const MultiTypePattern& m, const ScreenConfig& config);

/// Random pairing of qualifying species, then Lotwick-Silverman MAD tests with
/// cross K and cross J per pair.
std::vector<ScreenRow> screen_pairs(const MultiTypePattern& m, const ScreenConfig& config, RngSeed seed);

/// CSV `species,stat,kind,sided,p_value,note`; p_value NA for failed rows.
void write_screen_csv(std::ostream& out, std::span<const ScreenRow> rows);

}  // namespace inhomstat
