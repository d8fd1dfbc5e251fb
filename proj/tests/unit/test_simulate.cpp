#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "doctest.h"
#include "inhomstat/error.hpp"
#include "inhomstat/simulate.hpp"
#include "inhomstat/sumstats.hpp"

using namespace inhomstat;

namespace {

// Upper quantile of the chi-square distribution (Wilson-Hilferty).
double chi2_quantile(double df, double z) {
  const double a = 2.0 / (9.0 * df);
  return df * std::pow(1.0 - a + z * std::sqrt(a), 3);
}

constexpr double kZ99 = 2.3263478740408408;  // standard normal 0.99 quantile

double poisson_pmf(std::uint64_t k, double mu) {
  return std::exp(static_cast<double>(k) * std::log(mu) - mu - std::lgamma(static_cast<double>(k) + 1.0));
}

}  // namespace

TEST_CASE("zero-mass surface gives an empty pattern") {
  const auto zero = IntensitySurface::constant(RectWindow(0, 0, 100, 50), 20, 10, 0.0);
  for (std::uint64_t s = 0; s < 20; ++s) CHECK(sample_inhom_poisson(zero, {s, 0}).empty());
  CHECK(sample_homogeneous_poisson(RectWindow(0, 0, 10, 10), 0.0, {1, 0}).empty());
}

TEST_CASE("constant surface: mean count and Poisson count distribution") {
  const RectWindow w(0, 0, 100, 50);
  const auto lam = IntensitySurface::constant(w, 25, 10, 0.04);
  double sum = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) sum += static_cast<double>(sample_inhom_poisson(lam, {3, s}).size());
  CHECK(std::abs(sum / 1000 - 200.0) <= 3 * std::sqrt(200.0) / std::sqrt(1000.0));

  const auto small = IntensitySurface::constant(w, 25, 10, 0.004);
  const double mu = small.total_mass();
  CHECK(mu == doctest::Approx(20.0));
  const int draws = 2000;
  std::map<std::uint64_t, int> counts;
  for (int s = 0; s < draws; ++s) ++counts[sample_inhom_poisson(small, {4, static_cast<std::uint64_t>(s)}).size()];
  // Bins [0,12], 13..28 individually, [29, inf): every expected count is at least 5.
  std::vector<double> observed, expected;
  double lo_obs = 0, lo_p = 0;
  for (std::uint64_t k = 0; k <= 12; ++k) lo_obs += counts[k], lo_p += poisson_pmf(k, mu);
  observed.push_back(lo_obs);
  expected.push_back(lo_p * draws);
  double tail_p = 1.0 - lo_p, tail_obs = draws - lo_obs;
  for (std::uint64_t k = 13; k <= 28; ++k) {
    observed.push_back(counts[k]);
    expected.push_back(poisson_pmf(k, mu) * draws);
    tail_obs -= counts[k];
    tail_p -= poisson_pmf(k, mu);
  }
  observed.push_back(tail_obs);
  expected.push_back(tail_p * draws);
  double chi2 = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    CHECK(expected[i] >= 5.0);
    chi2 += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
  }
  CHECK(chi2 < chi2_quantile(static_cast<double>(observed.size() - 1), kZ99));
}

TEST_CASE("thinning reproduces the surface mass on an 8 x 4 super-grid") {
  const RectWindow w(0, 0, 100, 50);
  const auto lam = IntensitySurface::from_function(w, 40, 20, [](Point q) {
    return 0.002 + 0.03 * std::exp(-((q.x - 70) * (q.x - 70) + (q.y - 20) * (q.y - 20)) / 400.0) + 0.0002 * q.x;
  });
  // Expected counts by midpoint integration of the interpolated surface.
  constexpr int sx = 8, sy = 4, fine = 200;
  std::vector<double> mass(sx * sy, 0.0);
  const double dx = w.width() / (sx * fine), dy = w.height() / (sy * fine);
  for (int i = 0; i < sx * fine; ++i) {
    for (int j = 0; j < sy * fine; ++j) {
      const Point q{(i + 0.5) * dx, (j + 0.5) * dy};
      mass[(j / fine) * sx + i / fine] += lam.interpolate(q) * dx * dy;
    }
  }
  const int draws = 2000;
  std::vector<double> count(sx * sy, 0.0);
  for (int s = 0; s < draws; ++s) {
    const PointPattern p = sample_inhom_poisson(lam, {5, static_cast<std::uint64_t>(s)});
    for (const Point& q : p.points()) {
      const int i = std::min(sx - 1, static_cast<int>(q.x / (w.width() / sx)));
      const int j = std::min(sy - 1, static_cast<int>(q.y / (w.height() / sy)));
      count[j * sx + i] += 1;
    }
  }
  double chi2 = 0;
  for (int c = 0; c < sx * sy; ++c) {
    const double e = mass[c] * draws;
    CHECK(std::abs(count[c] - e) <= 4 * std::sqrt(e));
    chi2 += (count[c] - e) * (count[c] - e) / e;
  }
  CHECK(chi2 < chi2_quantile(sx * sy, kZ99));
}

TEST_CASE("analytic thinning matches the integrated intensity") {
  const RectWindow w(0, 0, 100, 50);
  auto lambda = [](Point q) { return 0.02 * (1.0 + q.x / 100.0); };
  double sum = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) sum += static_cast<double>(sample_inhom_poisson(w, lambda, 0.04, {6, s}).size());
  CHECK(std::abs(sum / 1000 - 150.0) <= 3 * std::sqrt(150.0 / 1000.0));
}

TEST_CASE("Thomas process: mean count, degenerate offspring and clustering") {
  const RectWindow w(0, 0, 100, 50);
  const ThomasParams tp{1e-3, 5.0, 2.0};
  const int draws = 1000;
  double sum = 0, sum2 = 0;
  for (int s = 0; s < draws; ++s) {
    const double n = static_cast<double>(sample_thomas(tp, w, {7, static_cast<std::uint64_t>(s)}).size());
    sum += n;
    sum2 += n * n;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum2 / draws - mean * mean) / draws);
  CHECK(std::abs(mean - tp.parent_intensity * w.area() * tp.mean_offspring) <= 3 * se);

  int empty = 0;
  for (std::uint64_t s = 0; s < 100; ++s) empty += sample_thomas({1e-3, 1e-9, 2.0}, w, {8, s}).empty();
  CHECK(empty == 100);
  CHECK_THROWS_AS((void)sample_thomas({0.0, 5.0, 2.0}, w, {1, 0}), Error);

  const RectWindow sq(0, 0, 100, 100);
  const PointPattern tight = sample_thomas({5e-4, 10.0, 0.01}, sq, {9, 0});
  REQUIRE(tight.size() > 10);
  const auto k = k_stationary(tight, RGrid({0.0, 1.0}));
  CHECK(k.value[1] > 20 * std::numbers::pi);
}

TEST_CASE("samplers are deterministic in seed and stream") {
  const RectWindow w(0, 0, 100, 50);
  const auto lam = IntensitySurface::constant(w, 10, 5, 0.01);
  const auto a = sample_inhom_poisson(lam, {11, 3});
  const auto b = sample_inhom_poisson(lam, {11, 3});
  const auto c = sample_inhom_poisson(lam, {11, 4});
  REQUIRE(a.size() == b.size());
  CHECK(std::equal(a.points().begin(), a.points().end(), b.points().begin(),
                   [](Point p, Point q) { return p.x == q.x && p.y == q.y; }));
  CHECK_FALSE((a.size() == c.size() && std::equal(a.points().begin(), a.points().end(), c.points().begin(),
                                                  [](Point p, Point q) { return p.x == q.x && p.y == q.y; })));
  const auto t1 = sample_thomas({1e-3, 5, 2}, w, {12, 0});
  const auto t2 = sample_thomas({1e-3, 5, 2}, w, {12, 0});
  CHECK(t1.size() == t2.size());
}

TEST_CASE("random pairing") {
  const std::vector<std::string> two{"A", "B"};
  const auto p2 = random_pairing(two, {1, 0});
  REQUIRE(p2.pairs.size() == 1);
  CHECK_FALSE(p2.unpaired.has_value());
  CHECK(std::set<std::string>{p2.pairs[0].first, p2.pairs[0].second} == std::set<std::string>{"A", "B"});

  const std::vector<std::string> five{"A", "B", "C", "D", "E"};
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto p = random_pairing(five, {s, 0});
    REQUIRE(p.pairs.size() == 2);
    REQUIRE(p.unpaired.has_value());
    std::set<std::string> used{*p.unpaired};
    for (const auto& pr : p.pairs) {
      CHECK(used.insert(pr.first).second);
      CHECK(used.insert(pr.second).second);
    }
    CHECK(used.size() == 5);
  }

  const std::vector<std::string> one{"A"};
  try {
    (void)random_pairing(one, {1, 0});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("nothing to pair") != std::string::npos);
  }
}

TEST_CASE("random pairing is a uniform perfect matching of four species") {
  const std::vector<std::string> four{"A", "B", "C", "D"};
  std::map<std::string, int> freq;  // keyed by A's partner
  const int seeds = 10000;
  for (int s = 0; s < seeds; ++s) {
    const auto p = random_pairing(four, {static_cast<std::uint64_t>(s), 0});
    REQUIRE(p.pairs.size() == 2);
    for (const auto& pr : p.pairs) {
      if (pr.first == "A") ++freq[pr.second];
      if (pr.second == "A") ++freq[pr.first];
    }
  }
  REQUIRE(freq.size() == 3);
  for (const auto& [partner, n] : freq) CHECK(std::abs(n / static_cast<double>(seeds) - 1.0 / 3.0) <= 0.02);
}
