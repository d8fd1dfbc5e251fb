#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "inhomstat/geometry.hpp"
#include "inhomstat/pattern.hpp"

namespace inhomstat {

/// Isotropic Gaussian kernel standard deviation in metres.
class Bandwidth {
 public:
  /// Throws Numeric "invalid bandwidth" unless h > 0 and finite.
  explicit Bandwidth(double h);
  double value() const noexcept { return h_; }
  friend bool operator==(const Bandwidth&, const Bandwidth&) = default;

 private:
  double h_;
};

/// Intensity (points per m^2) on a regular nx x ny grid over the window.
///
/// Values are attached to cell centres and interpolated bilinearly. Outside the
/// hull of the centres (the outer half cell) the nearest edge value is held.
class IntensitySurface {
 public:
  /// Floor applied by evaluate(), so estimator denominators never vanish.
  static constexpr double kFloor = 1e-8;

  /// `values` is row-major with x varying fastest. Throws Numeric on size
  /// mismatch or negative/non-finite values.
  IntensitySurface(RectWindow window, std::size_t nx, std::size_t ny, std::vector<double> values);

  static IntensitySurface constant(RectWindow window, std::size_t nx, std::size_t ny, double value);
  /// Samples `f` at cell centres.
  static IntensitySurface from_function(RectWindow window, std::size_t nx, std::size_t ny,
                                        const std::function<double(Point)>& f);

  const RectWindow& window() const noexcept { return window_; }
  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  double dx() const noexcept { return window_.width() / static_cast<double>(nx_); }
  double dy() const noexcept { return window_.height() / static_cast<double>(ny_); }
  std::span<const double> values() const noexcept { return values_; }
  double at(std::size_t i, std::size_t j) const { return values_[j * nx_ + i]; }
  Point cell_centre(std::size_t i, std::size_t j) const noexcept;

  double total_mass() const noexcept;
  double max_value() const noexcept;

  /// Bilinear interpolation without the floor. Caller guarantees q in window.
  double interpolate(Point q) const noexcept;
  /// Floored interpolation. Throws Data "out of window".
  double evaluate(Point q) const;
  std::vector<double> evaluate(std::span<const Point> qs) const;

 private:
  RectWindow window_;
  std::size_t nx_;
  std::size_t ny_;
  std::vector<double> values_;
};

/// Mass of the isotropic Gaussian kernel centred at `centre` that falls inside `w`.
double kernel_edge_mass(const RectWindow& w, Point centre, Bandwidth h);

/// Edge-corrected Gaussian kernel estimate on an nx x ny grid.
///
/// Each point contributes a kernel divided by its in-window mass, so the
/// estimate integrates to n over the window. Grid values are the exact cell
/// averages of that estimate, which keeps total_mass() equal to n for every
/// bandwidth. Throws Data "no points" on an empty pattern.
IntensitySurface kernel_intensity(const PointPattern& p, Bandwidth h, std::size_t nx, std::size_t ny);

/// The same estimator evaluated exactly (no grid) at arbitrary locations.
/// With `leave_one_out`, location i excludes data point i (requires where == p).
std::vector<double> kernel_intensity_at(const PointPattern& p, Bandwidth h, std::span<const Point> where,
                                        bool leave_one_out = false);

struct CvlOptions {
  bool leave_one_out = false;
};

struct CvlScore {
  double h;
  double t;      ///< sum of 1/lambda_h over the data points
  double score;  ///< |t - |W||, +inf when any lambda_h vanishes
};

/// Scores for each candidate, returned sorted by bandwidth.
std::vector<CvlScore> cvl_scores(const PointPattern& p, std::span<const Bandwidth> candidates,
                                 const CvlOptions& options = {});

/// Bandwidth minimising |sum_i 1/lambda_h(x_i) - |W||; ties go to the smaller h.
Bandwidth cvl_bandwidth(const PointPattern& p, std::span<const Bandwidth> candidates,
                        const CvlOptions& options = {});

/// `count` log-spaced values from one grid cell to a quarter of the shorter side.
std::vector<Bandwidth> default_bandwidth_candidates(const RectWindow& w, std::size_t nx, std::size_t ny,
                                                    std::size_t count = 20);

/// Scales a surface so its total mass equals `n_target`. Throws Numeric "cannot rescale".
IntensitySurface rescale_to_count(const IntensitySurface& s, double n_target);

/// Null intensity for one species: reference-census trees of the species,
/// minus every tree alive in the latest census, kernel smoothed and rescaled to
/// the latest-census alive count.
IntensitySurface null_intensity(std::span<const CensusRecord> reference, std::span<const CensusRecord> latest,
                                const std::string& species, int reference_census, int latest_census, Bandwidth h,
                                std::size_t nx, std::size_t ny, const RectWindow& window);

/// Trimmed reference pattern used by null_intensity (exposed for bandwidth selection).
PointPattern null_reference_pattern(std::span<const CensusRecord> reference, std::span<const CensusRecord> latest,
                                    const std::string& species, int reference_census, int latest_census,
                                    const RectWindow& window);

/// A surface translated cyclically by whole grid cells on the window torus.
class ShiftedSurface {
 public:
  ShiftedSurface(const IntensitySurface& base, long shift_x_cells, long shift_y_cells);

  Point shift() const noexcept;
  double evaluate(Point q) const;
  /// The rolled grid as a standalone surface.
  IntensitySurface materialize() const;

 private:
  const IntensitySurface* base_;
  long sx_;
  long sy_;
};

/// CSV grid file with `x,y,lambda` rows at cell centres.
void write_surface_csv(std::ostream& out, const IntensitySurface& s);
/// Reads a grid written by write_surface_csv (at least 2 x 2 cells).
IntensitySurface read_surface_csv(std::istream& in);

}  // namespace inhomstat
