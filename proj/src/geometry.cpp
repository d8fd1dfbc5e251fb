#include "inhomstat/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "inhomstat/error.hpp"

namespace inhomstat {

RectWindow::RectWindow(double x_min, double y_min, double x_max, double y_max)
    : x_min_(x_min), y_min_(y_min), x_max_(x_max), y_max_(y_max) {
  if (!std::isfinite(x_min) || !std::isfinite(y_min) || !std::isfinite(x_max) ||
      !std::isfinite(y_max) || !(x_max > x_min) || !(y_max > y_min)) {
    fail(ErrorKind::Numeric, "invalid window");
  }
}

bool RectWindow::contains(Point p) const noexcept {
  return p.x >= x_min_ && p.x <= x_max_ && p.y >= y_min_ && p.y <= y_max_;
}

double RectWindow::border_distance(Point p) const noexcept {
  return std::min(std::min(p.x - x_min_, x_max_ - p.x), std::min(p.y - y_min_, y_max_ - p.y));
}

RectWindow RectWindow::erode(double r) const {
  if (!(r >= 0.0)) fail(ErrorKind::Usage, "erosion radius must be non-negative");
  if (2.0 * r >= shorter_side()) fail(ErrorKind::Numeric, "erosion empty");
  return RectWindow(x_min_ + r, y_min_ + r, x_max_ - r, y_max_ - r);
}

double distance(Point p, Point q) noexcept { return std::hypot(p.x - q.x, p.y - q.y); }

double torus_distance(const RectWindow& w, Point p, Point q) noexcept {
  double dx = std::fabs(p.x - q.x);
  double dy = std::fabs(p.y - q.y);
  dx = std::min(dx, w.width() - dx);
  dy = std::min(dy, w.height() - dy);
  return std::hypot(dx, dy);
}

double translation_weight(const RectWindow& w, Point p, Point q) {
  const double a = w.width();
  const double b = w.height();
  const double dx = std::fabs(p.x - q.x);
  const double dy = std::fabs(p.y - q.y);
  if (dx >= a || dy >= b) fail(ErrorKind::Numeric, "degenerate overlap");
  return (a * b) / ((a - dx) * (b - dy));
}

namespace {

double wrap_coordinate(double v, double lo, double hi) noexcept {
  if (v >= lo && v <= hi) return v;
  const double side = hi - lo;
  double off = std::fmod(v - lo, side);
  if (off < 0.0) off += side;
  if (off >= side) off = 0.0;
  return lo + off;
}

}  // namespace

Point torus_wrap(const RectWindow& w, Point p) noexcept {
  return {wrap_coordinate(p.x, w.x_min(), w.x_max()), wrap_coordinate(p.y, w.y_min(), w.y_max())};
}

std::vector<Point> torus_shift(std::span<const Point> points, Point shift, const RectWindow& w) {
  std::vector<Point> out;
  out.reserve(points.size());
  for (const Point& p : points) out.push_back(torus_wrap(w, {p.x + shift.x, p.y + shift.y}));
  return out;
}

// ---------------------------------------------------------------------------

NeighbourIndex::NeighbourIndex(std::span<const Point> points, const RectWindow& w, double radius)
    : points_(points), window_(w) {
  // Cells no smaller than the query radius, capped so tiny radii do not blow up memory.
  constexpr std::size_t kMaxCellsPerSide = 512;
  cell_ = std::max(radius, std::max(w.width(), w.height()) / static_cast<double>(kMaxCellsPerSide));
  nx_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(w.width() / cell_)));
  ny_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(w.height() / cell_)));

  std::vector<std::size_t> counts(nx_ * ny_ + 1, 0);
  std::vector<std::size_t> cell_of(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    cell_of[i] = cell_y(points[i].y) * nx_ + cell_x(points[i].x);
    ++counts[cell_of[i] + 1];
  }
  for (std::size_t c = 1; c < counts.size(); ++c) counts[c] += counts[c - 1];
  start_ = counts;
  order_.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) order_[counts[cell_of[i]]++] = i;
}

std::size_t NeighbourIndex::cell_x(double x) const noexcept {
  const double u = (x - window_.x_min()) / window_.width() * static_cast<double>(nx_);
  if (!(u > 0.0)) return 0;
  return std::min(nx_ - 1, static_cast<std::size_t>(u));
}

std::size_t NeighbourIndex::cell_y(double y) const noexcept {
  const double u = (y - window_.y_min()) / window_.height() * static_cast<double>(ny_);
  if (!(u > 0.0)) return 0;
  return std::min(ny_ - 1, static_cast<std::size_t>(u));
}

void NeighbourIndex::query(Point q, double r, std::vector<Neighbour>& out, bool periodic) const {
  out.clear();
  const double cw = window_.width() / static_cast<double>(nx_);
  const double ch = window_.height() / static_cast<double>(ny_);
  const long span_x = static_cast<long>(std::ceil(r / cw));
  const long span_y = static_cast<long>(std::ceil(r / ch));
  const long cx = static_cast<long>(cell_x(q.x));
  const long cy = static_cast<long>(cell_y(q.y));
  const long nx = static_cast<long>(nx_);
  const long ny = static_cast<long>(ny_);

  auto axis_range = [periodic](long centre, long span, long n, long& lo, long& hi) {
    if (periodic && 2 * span + 1 >= n) {
      lo = 0;
      hi = n - 1;
      return false;  // full sweep, no wrapping needed
    }
    lo = centre - span;
    hi = centre + span;
    if (!periodic) {
      lo = std::max(lo, 0L);
      hi = std::min(hi, n - 1);
    }
    return periodic;
  };

  long x_lo, x_hi, y_lo, y_hi;
  const bool wrap_x = axis_range(cx, span_x, nx, x_lo, x_hi);
  const bool wrap_y = axis_range(cy, span_y, ny, y_lo, y_hi);

  for (long jy = y_lo; jy <= y_hi; ++jy) {
    const long gy = wrap_y ? ((jy % ny) + ny) % ny : jy;
    for (long jx = x_lo; jx <= x_hi; ++jx) {
      const long gx = wrap_x ? ((jx % nx) + nx) % nx : jx;
      const std::size_t c = static_cast<std::size_t>(gy * nx + gx);
      for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) {
        const std::size_t i = order_[k];
        const double d = periodic ? torus_distance(window_, q, points_[i]) : distance(q, points_[i]);
        if (d <= r) out.push_back({i, d});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Neighbour& a, const Neighbour& b) { return a.index < b.index; });
}

}  // namespace inhomstat
