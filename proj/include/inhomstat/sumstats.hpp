#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "inhomstat/geometry.hpp"
#include "inhomstat/intensity.hpp"
#include "inhomstat/pattern.hpp"

namespace inhomstat {

/// Increasing distances starting at 0.
class RGrid {
 public:
  /// Throws Usage unless r[0] == 0 and the values strictly increase.
  explicit RGrid(std::vector<double> r);
  /// `count` equally spaced values on [0, r_max], count >= 2.
  static RGrid uniform(double r_max, std::size_t count);

  /// Throws Usage unless max r < half the shorter window side.
  void check_window(const RectWindow& w) const;

  std::size_t size() const noexcept { return r_.size(); }
  double operator[](std::size_t k) const { return r_[k]; }
  double max() const noexcept { return r_.back(); }
  std::span<const double> values() const noexcept { return r_; }
  friend bool operator==(const RGrid&, const RGrid&) = default;

 private:
  std::vector<double> r_;
};

enum class SummaryKind { K, F, G, J, KCross, GCross, JCross };

const char* to_string(SummaryKind kind) noexcept;
bool is_j_kind(SummaryKind kind) noexcept;

/// A summary curve on an r grid. Undefined entries hold NaN with defined[k] false.
struct SummaryFunction {
  SummaryKind kind;
  RGrid r;
  std::vector<double> value;
  std::vector<double> reference;
  std::vector<bool> defined;
};

/// Test locations for the empty-space function.
struct LatticePoints {
  std::vector<Point> points;
  double spacing_x = 0.0;
  double spacing_y = 0.0;

  /// Cell centres of an nx x ny partition of the window.
  static LatticePoints regular(const RectWindow& w, std::size_t nx, std::size_t ny);
  /// Cell centres of the surface grid.
  static LatticePoints for_surface(const IntensitySurface& s);
};

/// Translation correction, or unit weights with periodic distances.
enum class EdgeCorrection { Translation, Torus };

// Estimators take the intensity at each data point (one value per point, all > 0).
// The IntensitySurface overloads evaluate the (floored) surface first.

/// Inhomogeneous K. A pattern with one point yields zeros; an empty pattern
/// throws Data "insufficient points".
SummaryFunction k_inhom(const PointPattern& p, std::span<const double> lambda, const RGrid& r,
                        EdgeCorrection edge = EdgeCorrection::Translation);
SummaryFunction k_inhom(const PointPattern& p, const IntensitySurface& lambda, const RGrid& r);

/// Classical stationary K with the scalar intensity n/|W|.
SummaryFunction k_stationary(const PointPattern& p, const RGrid& r);

/// Inhomogeneous nearest-neighbour distribution with minus sampling.
SummaryFunction g_inhom(const PointPattern& p, std::span<const double> lambda, const RGrid& r);
SummaryFunction g_inhom(const PointPattern& p, const IntensitySurface& lambda, const RGrid& r);

/// Inhomogeneous empty-space function over the lattice with minus sampling.
SummaryFunction f_inhom(const PointPattern& p, std::span<const double> lambda, const LatticePoints& lattice,
                        const RGrid& r);
SummaryFunction f_inhom(const PointPattern& p, const IntensitySurface& lambda, const LatticePoints& lattice,
                        const RGrid& r);

/// Cutoff on 1 - F below which J is reported undefined.
inline constexpr double kJCutoff = 0.05;

/// (1 - G) / (1 - F), undefined where either input is undefined or 1 - F <= kJCutoff.
SummaryFunction j_ratio(const SummaryFunction& g, const SummaryFunction& f, SummaryKind kind);

SummaryFunction j_inhom(const PointPattern& p, std::span<const double> lambda, const LatticePoints& lattice,
                        const RGrid& r);
SummaryFunction j_inhom(const PointPattern& p, const IntensitySurface& lambda, const LatticePoints& lattice,
                        const RGrid& r);

SummaryFunction k_cross_inhom(const PointPattern& p1, const PointPattern& p2, std::span<const double> lambda1,
                              std::span<const double> lambda2, const RGrid& r);
SummaryFunction k_cross_inhom(const PointPattern& p1, const PointPattern& p2, const IntensitySurface& lambda1,
                              const IntensitySurface& lambda2, const RGrid& r);

/// Cross nearest-neighbour function from type 1 to type 2.
SummaryFunction g_cross_inhom(const PointPattern& p1, const PointPattern& p2, std::span<const double> lambda2,
                              const RGrid& r);

SummaryFunction j_cross_inhom(const PointPattern& p1, const PointPattern& p2, std::span<const double> lambda2,
                              const LatticePoints& lattice, const RGrid& r);
SummaryFunction j_cross_inhom(const PointPattern& p1, const PointPattern& p2, const IntensitySurface& lambda2,
                              const LatticePoints& lattice, const RGrid& r);

/// CSV with `r,value,reference` plus `defined` for J-kind curves.
void write_summary_csv(std::ostream& out, const SummaryFunction& f);

}  // namespace inhomstat
