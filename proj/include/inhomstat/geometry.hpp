#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace inhomstat {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned rectangular observation window, coordinates in metres.
class RectWindow {
 public:
  /// Throws Numeric "invalid window" unless x_max > x_min and y_max > y_min.
  RectWindow(double x_min, double y_min, double x_max, double y_max);

  double x_min() const noexcept { return x_min_; }
  double y_min() const noexcept { return y_min_; }
  double x_max() const noexcept { return x_max_; }
  double y_max() const noexcept { return y_max_; }
  double width() const noexcept { return x_max_ - x_min_; }
  double height() const noexcept { return y_max_ - y_min_; }
  double area() const noexcept { return width() * height(); }
  double shorter_side() const noexcept { return width() < height() ? width() : height(); }

  /// Closed-set membership.
  bool contains(Point p) const noexcept;

  /// Distance from an interior point to the nearest edge.
  double border_distance(Point p) const noexcept;

  /// Minus-sampling erosion [x_min+r, x_max-r] x [y_min+r, y_max-r].
  /// Throws Numeric "erosion empty" when 2r >= shorter side, Usage on r < 0.
  RectWindow erode(double r) const;

  friend bool operator==(const RectWindow&, const RectWindow&) = default;

 private:
  double x_min_;
  double y_min_;
  double x_max_;
  double y_max_;
};

double distance(Point p, Point q) noexcept;

/// Shortest distance on the torus obtained by identifying opposite window edges.
double torus_distance(const RectWindow& w, Point p, Point q) noexcept;

/// Translation edge-correction weight |W| / |W ∩ (W + (p - q))|.
double translation_weight(const RectWindow& w, Point p, Point q);

/// Wraps a single coordinate pair back into the window.
Point torus_wrap(const RectWindow& w, Point p) noexcept;

/// Translates every point by `shift` and wraps modulo the window sides.
std::vector<Point> torus_shift(std::span<const Point> points, Point shift, const RectWindow& w);

/// One neighbour of a query location: index into the indexed point set and its distance.
struct Neighbour {
  std::size_t index;
  double distance;
};

/// Bucket grid for fixed-radius neighbour queries over a static point set.
class NeighbourIndex {
 public:
  NeighbourIndex(std::span<const Point> points, const RectWindow& w, double radius);

  /// All indexed points within `r` (<= construction radius) of `q`, sorted by index.
  /// When `periodic` is set distances are measured on the window torus.
  void query(Point q, double r, std::vector<Neighbour>& out, bool periodic = false) const;

 private:
  std::span<const Point> points_;
  RectWindow window_;
  double cell_;
  std::size_t nx_;
  std::size_t ny_;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> order_;

  std::size_t cell_x(double x) const noexcept;
  std::size_t cell_y(double y) const noexcept;
};

}  // namespace inhomstat
