#include <cmath>

#include "doctest.h"
#include "inhomstat/error.hpp"
#include "inhomstat/geometry.hpp"
#include "support.hpp"

using namespace inhomstat;

namespace {

// Fraction of uniform samples u in W with u + (q - p) also in W, i.e. |W ∩ W_{p-q}| / |W|.
double mc_overlap_weight(const RectWindow& w, Point p, Point q, std::size_t samples, Rng& rng) {
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Point u{rng.uniform(w.x_min(), w.x_max()), rng.uniform(w.y_min(), w.y_max())};
    if (w.contains({u.x + (q.x - p.x), u.y + (q.y - p.y)})) ++hits;
  }
  return static_cast<double>(samples) / static_cast<double>(hits);
}

}  // namespace

TEST_CASE("window validation and basic measures") {
  const RectWindow w(0, 0, 1000, 500);
  CHECK(w.area() == 500000.0);
  CHECK(w.shorter_side() == 500.0);
  CHECK_THROWS_AS(RectWindow(1, 0, 1, 5), Error);
  CHECK_THROWS_AS(RectWindow(0, 3, 5, 2), Error);
  CHECK(w.contains({0, 0}));
  CHECK(w.contains({1000, 500}));
  CHECK_FALSE(w.contains({1000.0001, 10}));
  CHECK(w.border_distance({10, 250}) == 10.0);
  CHECK(w.border_distance({500, 499}) == doctest::Approx(1.0));
}

TEST_CASE("translation weight worked examples") {
  const RectWindow w(0, 0, 10, 10);
  CHECK(translation_weight(w, {4, 5}, {6, 5}) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(translation_weight(w, {3, 3}, {3, 3}) == 1.0);
  CHECK(translation_weight(w, {1, 1}, {9, 9}) == doctest::Approx(25.0).epsilon(1e-15));
}

TEST_CASE("translation weight is symmetric, at least one, and one only for coincident points") {
  Rng rng({17, 0});
  const RectWindow w(-5, 2, 45, 32);
  const auto o = testing::to_oracle(w);
  for (int t = 0; t < 500; ++t) {
    const Point p{rng.uniform(w.x_min(), w.x_max()), rng.uniform(w.y_min(), w.y_max())};
    const Point q{rng.uniform(w.x_min(), w.x_max()), rng.uniform(w.y_min(), w.y_max())};
    const double a = translation_weight(w, p, q);
    CHECK(a == translation_weight(w, q, p));
    CHECK(a > 1.0);
    CHECK(testing::close_rel(a, oracle::translation_weight(o, {p.x, p.y}, {q.x, q.y}), 1e-13));
    CHECK(translation_weight(w, p, p) == 1.0);
  }
}

TEST_CASE("translation weight agrees with Monte Carlo overlap") {
  Rng rng({23, 0});
  const RectWindow w(0, 0, 100, 50);
  for (int t = 0; t < 5; ++t) {
    const Point p{rng.uniform(0, 100), rng.uniform(0, 50)};
    const Point q{rng.uniform(0, 100), rng.uniform(0, 50)};
    const double exact = translation_weight(w, p, q);
    const double mc = mc_overlap_weight(w, p, q, 1000000, rng);
    CHECK(std::fabs(mc - exact) / exact < 0.01);
  }
}

TEST_CASE("erode") {
  const RectWindow w(0, 0, 10, 10);
  CHECK(w.erode(0) == w);
  CHECK(w.erode(2) == RectWindow(2, 2, 8, 8));
  try {
    (void)w.erode(5);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()) == "erosion empty");
  }
  CHECK_THROWS_AS((void)w.erode(-1), Error);

  const RectWindow rect(0, 0, 30, 12);
  double last = rect.area();
  for (double r = 0; r < 6; r += 0.25) {
    const double a = rect.erode(r).area();
    CHECK(a <= last);
    last = a;
  }
}

TEST_CASE("torus shift examples") {
  const RectWindow w(0, 0, 10, 10);
  const std::vector<Point> one{{9, 9}};
  CHECK(torus_shift(one, {2, 3}, w)[0] == Point{1, 2});

  Rng rng({5, 0});
  const auto pts = testing::uniform_points(w, 50, rng);
  CHECK(torus_shift(pts, {0, 0}, w) == pts);
  const auto full = torus_shift(pts, {10, 10}, w);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(full[i].x == doctest::Approx(pts[i].x).epsilon(1e-12));
    CHECK(full[i].y == doctest::Approx(pts[i].y).epsilon(1e-12));
  }
}

TEST_CASE("torus shift is a bijection undone by the opposite shift") {
  Rng rng({6, 0});
  const RectWindow w(-20, 5, 80, 55);
  const auto pts = testing::uniform_points(w, 300, rng);
  for (int t = 0; t < 20; ++t) {
    const Point s{rng.uniform(-250, 250), rng.uniform(-250, 250)};
    const auto there = torus_shift(pts, s, w);
    REQUIRE(there.size() == pts.size());
    for (const auto& p : there) CHECK(w.contains(p));
    const auto back = torus_shift(there, {-s.x, -s.y}, w);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      // Points may land on the opposite edge of the torus; compare on the torus.
      CHECK(torus_distance(w, back[i], pts[i]) < 1e-9);
    }
  }
}

TEST_CASE("torus distance") {
  const RectWindow w(0, 0, 10, 10);
  CHECK(torus_distance(w, {1, 1}, {9, 9}) == doctest::Approx(std::sqrt(8.0)));
  CHECK(torus_distance(w, {1, 5}, {4, 5}) == doctest::Approx(3.0));
  CHECK(torus_distance(w, {0, 0}, {10, 10}) == doctest::Approx(0.0));
}

TEST_CASE("neighbour index matches brute force") {
  Rng rng({31, 0});
  const RectWindow w(0, 0, 60, 40);
  const auto pts = testing::uniform_points(w, 400, rng);
  const double radius = 7.5;
  const NeighbourIndex index(pts, w, radius);
  std::vector<Neighbour> got;
  for (int periodic = 0; periodic < 2; ++periodic) {
    for (int t = 0; t < 200; ++t) {
      const Point q{rng.uniform(0, 60), rng.uniform(0, 40)};
      const double r = rng.uniform(0, radius);
      index.query(q, r, got, periodic == 1);
      std::vector<std::size_t> want;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = periodic ? torus_distance(w, q, pts[i]) : distance(q, pts[i]);
        if (d <= r) want.push_back(i);
      }
      REQUIRE(got.size() == want.size());
      for (std::size_t k = 0; k < want.size(); ++k) {
        CHECK(got[k].index == want[k]);
        const double d = periodic ? torus_distance(w, q, pts[want[k]]) : distance(q, pts[want[k]]);
        CHECK(got[k].distance == d);
      }
    }
  }
}
