#include "inhomstat/intensity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "inhomstat/error.hpp"
#include "inhomstat/format.hpp"

namespace inhomstat {

Bandwidth::Bandwidth(double h) : h_(h) {
  if (!(h > 0.0) || !std::isfinite(h)) fail(ErrorKind::Numeric, "invalid bandwidth");
}

// --- IntensitySurface ------------------------------------------------------

IntensitySurface::IntensitySurface(RectWindow window, std::size_t nx, std::size_t ny, std::vector<double> values)
    : window_(window), nx_(nx), ny_(ny), values_(std::move(values)) {
  if (nx_ == 0 || ny_ == 0 || values_.size() != nx_ * ny_) fail(ErrorKind::Numeric, "surface grid size mismatch");
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorKind::Numeric, "surface values must be finite and non-negative");
  }
}

IntensitySurface IntensitySurface::constant(RectWindow window, std::size_t nx, std::size_t ny, double value) {
  return IntensitySurface(window, nx, ny, std::vector<double>(nx * ny, value));
}

IntensitySurface IntensitySurface::from_function(RectWindow window, std::size_t nx, std::size_t ny,
                                                 const std::function<double(Point)>& f) {
  IntensitySurface s = constant(window, nx, ny, 0.0);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) s.values_[j * nx + i] = f(s.cell_centre(i, j));
  }
  return IntensitySurface(window, nx, ny, std::move(s.values_));
}

Point IntensitySurface::cell_centre(std::size_t i, std::size_t j) const noexcept {
  return {window_.x_min() + (static_cast<double>(i) + 0.5) * dx(),
          window_.y_min() + (static_cast<double>(j) + 0.5) * dy()};
}

double IntensitySurface::total_mass() const noexcept {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum * dx() * dy();
}

double IntensitySurface::max_value() const noexcept { return *std::max_element(values_.begin(), values_.end()); }

namespace {

// Locates u (in cell-centre units) between centres i0 and i1 = min(i0 + 1, n - 1).
void bracket(double u, std::size_t n, std::size_t& i0, std::size_t& i1, double& t) noexcept {
  if (n == 1 || !(u > 0.0)) {
    i0 = i1 = 0;
    t = 0.0;
    return;
  }
  const double last = static_cast<double>(n - 1);
  if (u >= last) {
    i0 = i1 = n - 1;
    t = 0.0;
    return;
  }
  const double f = std::floor(u);
  i0 = static_cast<std::size_t>(f);
  i1 = i0 + 1;
  t = u - f;
}

}  // namespace

double IntensitySurface::interpolate(Point q) const noexcept {
  std::size_t i0, i1, j0, j1;
  double tx, ty;
  bracket((q.x - window_.x_min()) / dx() - 0.5, nx_, i0, i1, tx);
  bracket((q.y - window_.y_min()) / dy() - 0.5, ny_, j0, j1, ty);
  const double v00 = at(i0, j0);
  const double v10 = at(i1, j0);
  const double v01 = at(i0, j1);
  const double v11 = at(i1, j1);
  // Difference form: exact when neighbouring values coincide.
  const double lower = v00 + tx * (v10 - v00);
  const double upper = v01 + tx * (v11 - v01);
  return lower + ty * (upper - lower);
}

double IntensitySurface::evaluate(Point q) const {
  if (!window_.contains(q)) fail(ErrorKind::Data, "out of window");
  return std::max(interpolate(q), kFloor);
}

std::vector<double> IntensitySurface::evaluate(std::span<const Point> qs) const {
  std::vector<double> out;
  out.reserve(qs.size());
  for (const Point& q : qs) out.push_back(evaluate(q));
  return out;
}

// --- kernel estimation -----------------------------------------------------

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
// Kernel support cut-off in standard deviations; the neglected tail is below 1e-22.
constexpr double kSupport = 10.0;

/// P(a <= Z <= b) for standard normal Z, accurate in both tails.
double gauss_interval(double a, double b) noexcept {
  if (a >= 0.0) return 0.5 * (std::erfc(a * kInvSqrt2) - std::erfc(b * kInvSqrt2));
  if (b <= 0.0) return 0.5 * (std::erfc(-b * kInvSqrt2) - std::erfc(-a * kInvSqrt2));
  return 1.0 - 0.5 * std::erfc(-a * kInvSqrt2) - 0.5 * std::erfc(b * kInvSqrt2);
}

struct AxisWeights {
  std::size_t first = 0;
  std::vector<double> w;  // cell probabilities divided by cell width
};

AxisWeights axis_weights(double centre, double h, double lo, double side, std::size_t n) {
  const double cell = side / static_cast<double>(n);
  const double from = (centre - kSupport * h - lo) / cell;
  const double to = (centre + kSupport * h - lo) / cell;
  const auto first = static_cast<std::size_t>(std::clamp(std::floor(from), 0.0, static_cast<double>(n - 1)));
  const auto last = static_cast<std::size_t>(std::clamp(std::floor(to), 0.0, static_cast<double>(n - 1)));
  AxisWeights out;
  out.first = first;
  out.w.reserve(last - first + 1);
  for (std::size_t i = first; i <= last; ++i) {
    const double e0 = lo + side * static_cast<double>(i) / static_cast<double>(n);
    const double e1 = lo + side * static_cast<double>(i + 1) / static_cast<double>(n);
    out.w.push_back(gauss_interval((e0 - centre) / h, (e1 - centre) / h) / cell);
  }
  return out;
}

}  // namespace

double kernel_edge_mass(const RectWindow& w, Point c, Bandwidth h) {
  const double s = h.value();
  return gauss_interval((w.x_min() - c.x) / s, (w.x_max() - c.x) / s) *
         gauss_interval((w.y_min() - c.y) / s, (w.y_max() - c.y) / s);
}

IntensitySurface kernel_intensity(const PointPattern& p, Bandwidth h, std::size_t nx, std::size_t ny) {
  if (p.empty()) fail(ErrorKind::Data, "no points");
  if (nx == 0 || ny == 0) fail(ErrorKind::Usage, "grid sizes must be positive");
  const RectWindow& w = p.window();
  std::vector<double> values(nx * ny, 0.0);
  for (const Point& x : p.points()) {
    const double mass = kernel_edge_mass(w, x, h);
    if (!(mass > 0.0)) fail(ErrorKind::Numeric, "kernel mass underflow");
    const AxisWeights ax = axis_weights(x.x, h.value(), w.x_min(), w.width(), nx);
    const AxisWeights ay = axis_weights(x.y, h.value(), w.y_min(), w.height(), ny);
    const double scale = 1.0 / mass;
    for (std::size_t b = 0; b < ay.w.size(); ++b) {
      const double wy = ay.w[b] * scale;
      if (wy == 0.0) continue;
      double* row = values.data() + (ay.first + b) * nx + ax.first;
      for (std::size_t a = 0; a < ax.w.size(); ++a) row[a] += ax.w[a] * wy;
    }
  }
  return IntensitySurface(w, nx, ny, std::move(values));
}

std::vector<double> kernel_intensity_at(const PointPattern& p, Bandwidth h, std::span<const Point> where,
                                        bool leave_one_out) {
  if (p.empty()) fail(ErrorKind::Data, "no points");
  if (leave_one_out && where.size() != p.size()) {
    fail(ErrorKind::Usage, "leave-one-out evaluation requires the data points as locations");
  }
  const RectWindow& w = p.window();
  const double s = h.value();
  const double norm = 1.0 / (2.0 * std::numbers::pi * s * s);
  std::vector<double> inv_mass(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double mass = kernel_edge_mass(w, p[i], h);
    if (!(mass > 0.0)) fail(ErrorKind::Numeric, "kernel mass underflow");
    inv_mass[i] = 1.0 / mass;
  }
  const double radius = kSupport * s;
  const NeighbourIndex index(p.points(), w, radius);
  std::vector<Neighbour> nb;
  std::vector<double> out(where.size(), 0.0);
  for (std::size_t k = 0; k < where.size(); ++k) {
    index.query(where[k], radius, nb);
    double sum = 0.0;
    for (const Neighbour& n : nb) {
      if (leave_one_out && n.index == k) continue;
      const double z = n.distance / s;
      sum += std::exp(-0.5 * z * z) * inv_mass[n.index];
    }
    out[k] = sum * norm;
  }
  return out;
}

std::vector<CvlScore> cvl_scores(const PointPattern& p, std::span<const Bandwidth> candidates,
                                 const CvlOptions& options) {
  if (candidates.empty()) fail(ErrorKind::Usage, "no bandwidth candidates");
  if (p.empty()) fail(ErrorKind::Data, "no points");
  std::vector<double> hs;
  hs.reserve(candidates.size());
  for (const Bandwidth& b : candidates) hs.push_back(b.value());
  std::sort(hs.begin(), hs.end());

  const double area = p.window().area();
  std::vector<CvlScore> out;
  out.reserve(hs.size());
  for (double h : hs) {
    const auto lam = kernel_intensity_at(p, Bandwidth(h), p.points(), options.leave_one_out);
    double t = 0.0;
    bool degenerate = false;
    for (double v : lam) {
      if (!(v > 0.0)) {
        degenerate = true;
        break;
      }
      t += 1.0 / v;
    }
    const double inf = std::numeric_limits<double>::infinity();
    out.push_back({h, degenerate ? inf : t, degenerate ? inf : std::fabs(t - area)});
  }
  return out;
}

Bandwidth cvl_bandwidth(const PointPattern& p, std::span<const Bandwidth> candidates, const CvlOptions& options) {
  const auto scores = cvl_scores(p, candidates, options);
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k].score < scores[best].score) best = k;
  }
  return Bandwidth(scores[best].h);
}

std::vector<Bandwidth> default_bandwidth_candidates(const RectWindow& w, std::size_t nx, std::size_t ny,
                                                    std::size_t count) {
  if (count == 0 || nx == 0 || ny == 0) fail(ErrorKind::Usage, "bandwidth grid needs positive sizes");
  const double lo = std::max(w.width() / static_cast<double>(nx), w.height() / static_cast<double>(ny));
  const double hi = std::max(lo, w.shorter_side() / 4.0);
  std::vector<Bandwidth> out;
  out.reserve(count);
  if (count == 1) {
    out.emplace_back(lo);
    return out;
  }
  const double ratio = std::log(hi / lo);
  for (std::size_t k = 0; k < count; ++k) {
    out.emplace_back(lo * std::exp(ratio * static_cast<double>(k) / static_cast<double>(count - 1)));
  }
  return out;
}

IntensitySurface rescale_to_count(const IntensitySurface& s, double n_target) {
  const double mass = s.total_mass();
  if (!(mass > 0.0) || !std::isfinite(mass)) fail(ErrorKind::Numeric, "cannot rescale");
  if (!(n_target > 0.0)) fail(ErrorKind::Usage, "rescale target must be positive");
  const double factor = n_target / mass;
  std::vector<double> v(s.values().begin(), s.values().end());
  for (double& x : v) x *= factor;
  return IntensitySurface(s.window(), s.nx(), s.ny(), std::move(v));
}

PointPattern null_reference_pattern(std::span<const CensusRecord> reference, std::span<const CensusRecord> latest,
                                    const std::string& species, int reference_census, int latest_census,
                                    const RectWindow& window) {
  std::unordered_set<std::string> alive_latest;
  for (const CensusRecord& r : latest) {
    if (r.census_id == latest_census && r.status == Status::Alive) alive_latest.insert(r.tree_id);
  }
  std::vector<Point> kept;
  for (const CensusRecord& r : reference) {
    if (r.census_id != reference_census || r.species != species || r.status != Status::Alive) continue;
    if (alive_latest.count(r.tree_id)) continue;
    kept.push_back({r.x, r.y});
  }
  if (kept.empty()) fail(ErrorKind::Data, "null intensity undefined for species " + species);
  return PointPattern(window, std::move(kept));
}

IntensitySurface null_intensity(std::span<const CensusRecord> reference, std::span<const CensusRecord> latest,
                                const std::string& species, int reference_census, int latest_census, Bandwidth h,
                                std::size_t nx, std::size_t ny, const RectWindow& window) {
  const PointPattern trimmed =
      null_reference_pattern(reference, latest, species, reference_census, latest_census, window);
  std::size_t target = 0;
  for (const CensusRecord& r : latest) {
    if (r.census_id == latest_census && r.species == species && r.status == Status::Alive) ++target;
  }
  if (target == 0) {
    fail(ErrorKind::Data, "species " + species + " has no alive trees in census " + std::to_string(latest_census));
  }
  return rescale_to_count(kernel_intensity(trimmed, h, nx, ny), static_cast<double>(target));
}

// --- cyclic shift ----------------------------------------------------------

ShiftedSurface::ShiftedSurface(const IntensitySurface& base, long shift_x_cells, long shift_y_cells)
    : base_(&base), sx_(shift_x_cells), sy_(shift_y_cells) {}

Point ShiftedSurface::shift() const noexcept {
  return {static_cast<double>(sx_) * base_->dx(), static_cast<double>(sy_) * base_->dy()};
}

double ShiftedSurface::evaluate(Point q) const {
  const RectWindow& w = base_->window();
  if (!w.contains(q)) fail(ErrorKind::Data, "out of window");
  const Point s = shift();
  return base_->evaluate(torus_wrap(w, {q.x - s.x, q.y - s.y}));
}

IntensitySurface ShiftedSurface::materialize() const {
  const auto nx = static_cast<long>(base_->nx());
  const auto ny = static_cast<long>(base_->ny());
  std::vector<double> v(base_->values().size());
  for (long j = 0; j < ny; ++j) {
    const long sj = (((j - sy_) % ny) + ny) % ny;
    for (long i = 0; i < nx; ++i) {
      const long si = (((i - sx_) % nx) + nx) % nx;
      v[static_cast<std::size_t>(j * nx + i)] = base_->at(static_cast<std::size_t>(si), static_cast<std::size_t>(sj));
    }
  }
  return IntensitySurface(base_->window(), base_->nx(), base_->ny(), std::move(v));
}

// --- CSV -------------------------------------------------------------------

void write_surface_csv(std::ostream& out, const IntensitySurface& s) {
  std::ostringstream buf;
  buf << "x,y,lambda\n";
  for (std::size_t j = 0; j < s.ny(); ++j) {
    for (std::size_t i = 0; i < s.nx(); ++i) {
      const Point c = s.cell_centre(i, j);
      buf << format_double(c.x) << ',' << format_double(c.y) << ',' << format_double(s.at(i, j)) << '\n';
    }
  }
  out << buf.str();
}

IntensitySurface read_surface_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Data, "schema error: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,y,lambda") fail(ErrorKind::Data, "schema error: expected header x,y,lambda");
  struct Row {
    double x, y, v;
  };
  std::vector<Row> rows;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row;
    Row r{};
    std::istringstream ls(line);
    char c1 = 0, c2 = 0;
    if (!(ls >> r.x >> c1 >> r.y >> c2 >> r.v) || c1 != ',' || c2 != ',') {
      fail(ErrorKind::Data, "malformed surface row " + std::to_string(row));
    }
    rows.push_back(r);
  }
  std::vector<double> xs, ys;
  for (const Row& r : rows) {
    xs.push_back(r.x);
    ys.push_back(r.y);
  }
  auto unique_sorted = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  unique_sorted(xs);
  unique_sorted(ys);
  if (xs.size() < 2 || ys.size() < 2 || rows.size() != xs.size() * ys.size()) {
    fail(ErrorKind::Data, "surface file is not a complete grid of at least 2 x 2 cells");
  }
  const double dx = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  const double dy = (ys.back() - ys.front()) / static_cast<double>(ys.size() - 1);
  const RectWindow w(xs.front() - 0.5 * dx, ys.front() - 0.5 * dy, xs.back() + 0.5 * dx, ys.back() + 0.5 * dy);
  const std::size_t nx = xs.size();
  const std::size_t ny = ys.size();
  std::vector<double> v(nx * ny, 0.0);
  for (const Row& r : rows) {
    const auto i = static_cast<std::size_t>(std::lround((r.x - xs.front()) / dx));
    const auto j = static_cast<std::size_t>(std::lround((r.y - ys.front()) / dy));
    v[j * nx + i] = r.v;
  }
  return IntensitySurface(w, nx, ny, std::move(v));
}

}  // namespace inhomstat
