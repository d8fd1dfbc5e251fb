#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "inhomstat/geometry.hpp"
#include "inhomstat/pattern.hpp"
#include "inhomstat/rng.hpp"
#include "oracles.hpp"

namespace testing {

inline std::vector<inhomstat::Point> uniform_points(const inhomstat::RectWindow& w, std::size_t n,
                                                    inhomstat::Rng& rng) {
  std::vector<inhomstat::Point> pts(n);
  for (auto& p : pts) p = {rng.uniform(w.x_min(), w.x_max()), rng.uniform(w.y_min(), w.y_max())};
  return pts;
}

inline oracle::Win to_oracle(const inhomstat::RectWindow& w) { return {w.x_min(), w.y_min(), w.x_max(), w.y_max()}; }

inline std::vector<oracle::Pt> to_oracle(std::span<const inhomstat::Point> pts) {
  std::vector<oracle::Pt> out;
  for (const auto& p : pts) out.push_back({p.x, p.y});
  return out;
}

// |a - b| <= tol * max(|a|, |b|), or both NaN.
inline bool close_rel(double a, double b, double tol) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return std::fabs(a - b) <= tol * std::max({std::fabs(a), std::fabs(b), 1e-300});
}

// Relative tolerance for large values, absolute near zero (for F, G, J in [0, 1]-ish ranges).
inline bool close_mixed(double a, double b, double tol) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return std::fabs(a - b) <= tol * std::max({std::fabs(a), std::fabs(b), 1.0});
}

}  // namespace testing
