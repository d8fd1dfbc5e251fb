#include "inhomstat/sumstats.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <utility>

#include "inhomstat/error.hpp"
#include "inhomstat/format.hpp"

namespace inhomstat {

RGrid::RGrid(std::vector<double> r) : r_(std::move(r)) {
  if (r_.empty() || r_.front() != 0.0) fail(ErrorKind::Usage, "r grid must start at 0");
  for (std::size_t k = 1; k < r_.size(); ++k) {
    if (!(r_[k] > r_[k - 1]) || !std::isfinite(r_[k])) fail(ErrorKind::Usage, "r grid must be strictly increasing");
  }
}

RGrid RGrid::uniform(double r_max, std::size_t count) {
  if (count < 2 || !(r_max > 0.0)) fail(ErrorKind::Usage, "r grid needs r_max > 0 and at least 2 values");
  std::vector<double> r(count);
  for (std::size_t k = 0; k < count; ++k) r[k] = r_max * static_cast<double>(k) / static_cast<double>(count - 1);
  r.back() = r_max;
  return RGrid(std::move(r));
}

void RGrid::check_window(const RectWindow& w) const {
  if (!(2.0 * max() < w.shorter_side())) fail(ErrorKind::Usage, "r grid too large for window");
}

const char* to_string(SummaryKind kind) noexcept {
  switch (kind) {
    case SummaryKind::K: return "K";
    case SummaryKind::F: return "F";
    case SummaryKind::G: return "G";
    case SummaryKind::J: return "J";
    case SummaryKind::KCross: return "Kcross";
    case SummaryKind::GCross: return "Gcross";
    case SummaryKind::JCross: return "Jcross";
  }
  return "?";
}

bool is_j_kind(SummaryKind kind) noexcept { return kind == SummaryKind::J || kind == SummaryKind::JCross; }

LatticePoints LatticePoints::regular(const RectWindow& w, std::size_t nx, std::size_t ny) {
  if (nx == 0 || ny == 0) fail(ErrorKind::Usage, "lattice sizes must be positive");
  LatticePoints l;
  l.spacing_x = w.width() / static_cast<double>(nx);
  l.spacing_y = w.height() / static_cast<double>(ny);
  l.points.reserve(nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      l.points.push_back({w.x_min() + (static_cast<double>(i) + 0.5) * l.spacing_x,
                          w.y_min() + (static_cast<double>(j) + 0.5) * l.spacing_y});
    }
  }
  return l;
}

LatticePoints LatticePoints::for_surface(const IntensitySurface& s) {
  return regular(s.window(), s.nx(), s.ny());
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_lambda(const PointPattern& p, std::span<const double> lambda) {
  if (lambda.size() != p.size()) fail(ErrorKind::Usage, "one intensity value per point required");
  for (double v : lambda) {
    if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorKind::Numeric, "intensity must be positive at data points");
  }
}

void check_same_window(const PointPattern& a, const PointPattern& b) {
  if (!(a.window() == b.window())) fail(ErrorKind::Usage, "patterns must share the window");
}

std::size_t bin_of(const RGrid& r, double d) {
  const auto vals = r.values();
  return static_cast<std::size_t>(std::lower_bound(vals.begin(), vals.end(), d) - vals.begin());
}

/// Cumulative per-bin sums. Each bin is summed in ascending value order, so the
/// result depends only on the multiset of contributions, not on visiting order.
std::vector<double> cumulative_sorted(std::vector<std::pair<std::size_t, double>>& contrib, std::size_t bins) {
  std::sort(contrib.begin(), contrib.end());
  std::vector<double> out(bins, 0.0);
  for (const auto& [bin, v] : contrib) out[bin] += v;
  for (std::size_t k = 1; k < bins; ++k) out[k] += out[k - 1];
  return out;
}

std::vector<double> poisson_k_reference(const RGrid& r) {
  std::vector<double> ref(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) ref[k] = std::numbers::pi * r[k] * r[k];
  return ref;
}

SummaryFunction make_curve(SummaryKind kind, const RGrid& r) {
  return {kind, r, std::vector<double>(r.size(), 0.0), std::vector<double>(r.size(), 0.0),
          std::vector<bool>(r.size(), true)};
}

double min_value(std::span<const double> v) {
  return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
}

struct TailSums {
  std::vector<double> sum;
  std::vector<std::size_t> count;
};

/// For every reference location with border distance >= r, accumulates the
/// product of `factor[y]` over source points y within r. Products at r = 0 are
/// empty by convention. `exclude_self` skips source index == reference index.
TailSums product_tails(std::span<const Point> refs, std::span<const Point> source, std::span<const double> factor,
                       const RectWindow& w, const RGrid& r, bool exclude_self) {
  TailSums out{std::vector<double>(r.size(), 0.0), std::vector<std::size_t>(r.size(), 0)};
  const NeighbourIndex index(source, w, r.max());
  std::vector<Neighbour> nb;
  for (std::size_t a = 0; a < refs.size(); ++a) {
    const double border = w.border_distance(refs[a]);
    index.query(refs[a], r.max(), nb);
    if (exclude_self) {
      nb.erase(std::remove_if(nb.begin(), nb.end(), [a](const Neighbour& n) { return n.index == a; }), nb.end());
    }
    std::sort(nb.begin(), nb.end(), [](const Neighbour& x, const Neighbour& y) {
      return x.distance < y.distance || (x.distance == y.distance && x.index < y.index);
    });
    double product = 1.0;
    std::size_t next = 0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (r[k] > border) break;
      if (r[k] > 0.0) {
        while (next < nb.size() && nb[next].distance <= r[k]) product *= factor[nb[next++].index];
      }
      out.sum[k] += product;
      ++out.count[k];
    }
  }
  return out;
}

/// Writes 1 - tail into a distribution-function curve; no reference location => undefined.
void fill_distribution(SummaryFunction& f, const TailSums& t, double lambda_bar) {
  for (std::size_t k = 0; k < f.r.size(); ++k) {
    const double r = f.r[k];
    f.reference[k] = 1.0 - std::exp(-lambda_bar * std::numbers::pi * r * r);
    if (t.count[k] == 0) {
      f.value[k] = kNaN;
      f.defined[k] = false;
    } else {
      f.value[k] = 1.0 - t.sum[k] / static_cast<double>(t.count[k]);
    }
  }
}

std::vector<double> thinning_factors(std::span<const double> lambda) {
  const double bar = min_value(lambda);
  std::vector<double> f(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) f[i] = 1.0 - bar / lambda[i];
  return f;
}

}  // namespace

SummaryFunction k_inhom(const PointPattern& p, std::span<const double> lambda, const RGrid& r, EdgeCorrection edge) {
  if (p.empty()) fail(ErrorKind::Data, "insufficient points");
  check_lambda(p, lambda);
  r.check_window(p.window());
  const RectWindow& w = p.window();
  const bool torus = edge == EdgeCorrection::Torus;
  const double inv_area = 1.0 / w.area();

  std::vector<std::pair<std::size_t, double>> contrib;
  const NeighbourIndex index(p.points(), w, r.max());
  std::vector<Neighbour> nb;
  for (std::size_t i = 0; i < p.size(); ++i) {
    index.query(p[i], r.max(), nb, torus);
    for (const Neighbour& n : nb) {
      if (n.index <= i) continue;
      const double weight = torus ? 1.0 : translation_weight(w, p[i], p[n.index]);
      const double v = weight / (lambda[i] * lambda[n.index]) * inv_area;
      const std::size_t bin = bin_of(r, n.distance);
      contrib.emplace_back(bin, v);  // (i, j)
      contrib.emplace_back(bin, v);  // (j, i)
    }
  }
  SummaryFunction f = make_curve(SummaryKind::K, r);
  f.value = cumulative_sorted(contrib, r.size());
  f.reference = poisson_k_reference(r);
  return f;
}

SummaryFunction k_inhom(const PointPattern& p, const IntensitySurface& lambda, const RGrid& r) {
  return k_inhom(p, lambda.evaluate(p.points()), r);
}

SummaryFunction k_stationary(const PointPattern& p, const RGrid& r) {
  const std::vector<double> lambda(p.size(), static_cast<double>(p.size()) / p.window().area());
  return k_inhom(p, lambda, r);
}

SummaryFunction g_inhom(const PointPattern& p, std::span<const double> lambda, const RGrid& r) {
  check_lambda(p, lambda);
  r.check_window(p.window());
  const auto factor = thinning_factors(lambda);
  const TailSums t = product_tails(p.points(), p.points(), factor, p.window(), r, true);
  SummaryFunction g = make_curve(SummaryKind::G, r);
  fill_distribution(g, t, min_value(lambda));
  return g;
}

SummaryFunction g_inhom(const PointPattern& p, const IntensitySurface& lambda, const RGrid& r) {
  return g_inhom(p, lambda.evaluate(p.points()), r);
}

SummaryFunction f_inhom(const PointPattern& p, std::span<const double> lambda, const LatticePoints& lattice,
                        const RGrid& r) {
  check_lambda(p, lambda);
  r.check_window(p.window());
  if (lattice.points.empty()) fail(ErrorKind::Usage, "empty lattice");
  for (const Point& l : lattice.points) {
    if (!p.window().contains(l)) fail(ErrorKind::Usage, "lattice point outside window");
  }
  const auto factor = thinning_factors(lambda);
  const TailSums t = product_tails(lattice.points, p.points(), factor, p.window(), r, false);
  SummaryFunction f = make_curve(SummaryKind::F, r);
  fill_distribution(f, t, min_value(lambda));
  return f;
}

SummaryFunction f_inhom(const PointPattern& p, const IntensitySurface& lambda, const LatticePoints& lattice,
                        const RGrid& r) {
  return f_inhom(p, lambda.evaluate(p.points()), lattice, r);
}

SummaryFunction j_ratio(const SummaryFunction& g, const SummaryFunction& f, SummaryKind kind) {
  if (!(g.r == f.r)) fail(ErrorKind::Usage, "incompatible grids");
  SummaryFunction j = make_curve(kind, g.r);
  for (std::size_t k = 0; k < j.r.size(); ++k) {
    j.reference[k] = 1.0;
    const double tail_f = 1.0 - f.value[k];
    if (!g.defined[k] || !f.defined[k] || !(tail_f > kJCutoff)) {
      j.value[k] = kNaN;
      j.defined[k] = false;
    } else {
      j.value[k] = (1.0 - g.value[k]) / tail_f;
    }
  }
  return j;
}

SummaryFunction j_inhom(const PointPattern& p, std::span<const double> lambda, const LatticePoints& lattice,
                        const RGrid& r) {
  return j_ratio(g_inhom(p, lambda, r), f_inhom(p, lambda, lattice, r), SummaryKind::J);
}

SummaryFunction j_inhom(const PointPattern& p, const IntensitySurface& lambda, const LatticePoints& lattice,
                        const RGrid& r) {
  return j_inhom(p, lambda.evaluate(p.points()), lattice, r);
}

SummaryFunction k_cross_inhom(const PointPattern& p1, const PointPattern& p2, std::span<const double> lambda1,
                              std::span<const double> lambda2, const RGrid& r) {
  if (p1.empty() || p2.empty()) fail(ErrorKind::Data, "insufficient points");
  check_same_window(p1, p2);
  check_lambda(p1, lambda1);
  check_lambda(p2, lambda2);
  const RectWindow& w = p1.window();
  r.check_window(w);
  const double inv_area = 1.0 / w.area();

  std::vector<std::pair<std::size_t, double>> contrib;
  const NeighbourIndex index(p2.points(), w, r.max());
  std::vector<Neighbour> nb;
  for (std::size_t i = 0; i < p1.size(); ++i) {
    index.query(p1[i], r.max(), nb);
    for (const Neighbour& n : nb) {
      const double v = translation_weight(w, p1[i], p2[n.index]) / (lambda1[i] * lambda2[n.index]) * inv_area;
      contrib.emplace_back(bin_of(r, n.distance), v);
    }
  }
  SummaryFunction f = make_curve(SummaryKind::KCross, r);
  f.value = cumulative_sorted(contrib, r.size());
  f.reference = poisson_k_reference(r);
  return f;
}

SummaryFunction k_cross_inhom(const PointPattern& p1, const PointPattern& p2, const IntensitySurface& lambda1,
                              const IntensitySurface& lambda2, const RGrid& r) {
  return k_cross_inhom(p1, p2, lambda1.evaluate(p1.points()), lambda2.evaluate(p2.points()), r);
}

SummaryFunction g_cross_inhom(const PointPattern& p1, const PointPattern& p2, std::span<const double> lambda2,
                              const RGrid& r) {
  if (p1.empty() || p2.empty()) fail(ErrorKind::Data, "insufficient points");
  check_same_window(p1, p2);
  check_lambda(p2, lambda2);
  r.check_window(p1.window());
  const auto factor = thinning_factors(lambda2);
  const TailSums t = product_tails(p1.points(), p2.points(), factor, p1.window(), r, false);
  SummaryFunction g = make_curve(SummaryKind::GCross, r);
  fill_distribution(g, t, min_value(lambda2));
  return g;
}

SummaryFunction j_cross_inhom(const PointPattern& p1, const PointPattern& p2, std::span<const double> lambda2,
                              const LatticePoints& lattice, const RGrid& r) {
  return j_ratio(g_cross_inhom(p1, p2, lambda2, r), f_inhom(p2, lambda2, lattice, r), SummaryKind::JCross);
}

SummaryFunction j_cross_inhom(const PointPattern& p1, const PointPattern& p2, const IntensitySurface& lambda2,
                              const LatticePoints& lattice, const RGrid& r) {
  return j_cross_inhom(p1, p2, lambda2.evaluate(p2.points()), lattice, r);
}

void write_summary_csv(std::ostream& out, const SummaryFunction& f) {
  const bool j_kind = is_j_kind(f.kind);
  std::ostringstream buf;
  buf << (j_kind ? "r,value,reference,defined\n" : "r,value,reference\n");
  for (std::size_t k = 0; k < f.r.size(); ++k) {
    buf << format_double(f.r[k]) << ',';
    if (f.defined[k]) {
      buf << format_double(f.value[k]);
    } else {
      buf << "NA";
    }
    buf << ',' << format_double(f.reference[k]);
    if (j_kind) buf << ',' << (f.defined[k] ? 1 : 0);
    buf << '\n';
  }
  out << buf.str();
}

}  // namespace inhomstat
