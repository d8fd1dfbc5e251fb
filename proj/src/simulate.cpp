#include "inhomstat/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "inhomstat/error.hpp"

namespace inhomstat {

namespace {

Point uniform_point(Rng& rng, const RectWindow& w) {
  const double x = rng.uniform(w.x_min(), w.x_max());
  const double y = rng.uniform(w.y_min(), w.y_max());
  return {x, y};
}

}  // namespace

PointPattern sample_inhom_poisson(const IntensitySurface& lambda, RngSeed seed) {
  const double lambda_max = lambda.max_value();
  return sample_inhom_poisson(
      lambda.window(), [&lambda](Point q) { return lambda.interpolate(q); }, lambda_max, seed);
}

PointPattern sample_inhom_poisson(const RectWindow& w, const std::function<double(Point)>& lambda, double lambda_max,
                                  RngSeed seed) {
  if (!(lambda_max > 0.0)) return PointPattern(w);
  Rng rng(seed);
  const auto n = rng.poisson(lambda_max * w.area());
  std::vector<Point> kept;
  kept.reserve(static_cast<std::size_t>(n));
  for (std::uint64_t k = 0; k < n; ++k) {
    const Point q = uniform_point(rng, w);
    const double u = rng.uniform();
    if (u * lambda_max < lambda(q)) kept.push_back(q);
  }
  return PointPattern(w, std::move(kept));
}

PointPattern sample_homogeneous_poisson(const RectWindow& w, double rate, RngSeed seed) {
  if (!(rate > 0.0)) return PointPattern(w);
  Rng rng(seed);
  const auto n = rng.poisson(rate * w.area());
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (std::uint64_t k = 0; k < n; ++k) pts.push_back(uniform_point(rng, w));
  return PointPattern(w, std::move(pts));
}

PointPattern sample_thomas(const ThomasParams& params, const RectWindow& w, RngSeed seed) {
  if (!(params.parent_intensity > 0.0) || !(params.mean_offspring >= 0.0) || !(params.sigma > 0.0)) {
    fail(ErrorKind::Usage, "Thomas parameters must be positive");
  }
  const double pad = 4.0 * params.sigma;
  const RectWindow dilated(w.x_min() - pad, w.y_min() - pad, w.x_max() + pad, w.y_max() + pad);
  Rng rng(seed);
  const auto parents = rng.poisson(params.parent_intensity * dilated.area());
  std::vector<Point> pts;
  for (std::uint64_t k = 0; k < parents; ++k) {
    const Point parent = uniform_point(rng, dilated);
    const auto children = rng.poisson(params.mean_offspring);
    for (std::uint64_t c = 0; c < children; ++c) {
      const Point child{parent.x + params.sigma * rng.normal(), parent.y + params.sigma * rng.normal()};
      if (w.contains(child)) pts.push_back(child);
    }
  }
  return PointPattern(w, std::move(pts));
}

Pairing random_pairing(std::span<const std::string> species, RngSeed seed) {
  if (species.size() < 2) fail(ErrorKind::Usage, "nothing to pair");
  std::vector<std::string> order(species.begin(), species.end());
  Rng rng(seed);
  // Fisher-Yates; consecutive entries of a uniform permutation form a uniform matching.
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(order[i], order[j]);
  }
  Pairing out;
  for (std::size_t i = 0; i + 1 < order.size(); i += 2) out.pairs.push_back({order[i], order[i + 1]});
  if (order.size() % 2 == 1) out.unpaired = order.back();
  return out;
}

}  // namespace inhomstat
