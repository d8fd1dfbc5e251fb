#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "inhomstat/error.hpp"
#include "inhomstat/simulate.hpp"
#include "inhomstat/sumstats.hpp"
#include "support.hpp"

using namespace inhomstat;
using testing::close_mixed;
using testing::close_rel;

namespace {

const double kPi = std::numbers::pi;

std::vector<double> random_lambda(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(0.01, 0.2);
  return v;
}

}  // namespace

TEST_CASE("RGrid rules") {
  CHECK_THROWS_AS(RGrid({0.5, 1.0}), Error);
  CHECK_THROWS_AS(RGrid({0.0, 1.0, 1.0}), Error);
  const RGrid r = RGrid::uniform(25, 512);
  CHECK(r.size() == 512);
  CHECK(r[0] == 0.0);
  CHECK(r.max() == 25.0);
  CHECK_NOTHROW(r.check_window(RectWindow(0, 0, 1000, 500)));
  try {
    RGrid::uniform(5, 10).check_window(RectWindow(0, 0, 10, 10));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Usage);
  }
}

TEST_CASE("K worked examples") {
  const RectWindow w(0, 0, 10, 10);
  const RGrid r({0.0, 1.0, 1.999, 2.0, 3.0, 4.5});
  const PointPattern two(w, {{4, 5}, {6, 5}});
  const std::vector<double> lam{0.02, 0.02};
  const auto k = k_inhom(two, lam, r);
  CHECK(k.value[0] == 0.0);
  CHECK(k.value[1] == 0.0);
  CHECK(k.value[2] == 0.0);
  for (std::size_t i = 3; i < r.size(); ++i) CHECK(k.value[i] == doctest::Approx(62.5).epsilon(1e-14));
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(k.reference[i] == doctest::Approx(kPi * r[i] * r[i]));

  const PointPattern single(w, {{3, 3}});
  const std::vector<double> one{0.5};
  for (double v : k_inhom(single, one, r).value) CHECK(v == 0.0);
  CHECK_THROWS_AS((void)k_inhom(PointPattern(w), std::vector<double>{}, r), Error);
}

TEST_CASE("cross K worked example and symmetry") {
  const RectWindow w(0, 0, 10, 10);
  const RGrid r({0.0, 1.0, 2.0, 4.0});
  const PointPattern p1(w, {{4, 5}}), p2(w, {{6, 5}});
  const std::vector<double> l{0.01};
  const auto k = k_cross_inhom(p1, p2, l, l, r);
  CHECK(k.value[1] == 0.0);
  CHECK(k.value[2] == doctest::Approx(125.0).epsilon(1e-14));
  CHECK(k.value[3] == doctest::Approx(125.0).epsilon(1e-14));

  const PointPattern far1(w, {{1, 1}}), far2(w, {{9, 9}});
  for (double v : k_cross_inhom(far1, far2, l, l, r).value) CHECK(v == 0.0);

  Rng rng({40, 0});
  const RectWindow big(0, 0, 100, 50);
  const PointPattern a(big, testing::uniform_points(big, 120, rng));
  const PointPattern b(big, testing::uniform_points(big, 90, rng));
  const auto la = random_lambda(a.size(), rng), lb = random_lambda(b.size(), rng);
  const RGrid rr = RGrid::uniform(20, 200);
  const auto ab = k_cross_inhom(a, b, la, lb, rr);
  const auto ba = k_cross_inhom(b, a, lb, la, rr);
  CHECK(ab.value == ba.value);  // bit-exact
}

TEST_CASE("G, F and J worked examples") {
  const RectWindow w(0, 0, 20, 20);
  const RGrid r({0.0, 1.0, 2.0, 3.0});
  const PointPattern two(w, {{9, 10}, {11, 10}});
  const std::vector<double> lam{0.1, 0.1};
  const auto g = g_inhom(two, lam, r);
  CHECK(g.value[0] == 0.0);
  CHECK(g.value[1] == 0.0);
  CHECK(g.value[2] == 1.0);
  CHECK(g.value[3] == 1.0);

  const auto lattice = LatticePoints::regular(w, 40, 40);
  const auto empty_f = f_inhom(PointPattern(w), std::vector<double>{}, lattice, r);
  for (double v : empty_f.value) CHECK(v == 0.0);

  // One point, constant intensity: F(r) = (# lattice points within r) / (# lattice points in the eroded window).
  const PointPattern one(w, {{7.3, 12.1}});
  const std::vector<double> l1{0.05};
  const RGrid rf = RGrid::uniform(6, 25);
  const auto f = f_inhom(one, l1, lattice, rf);
  for (std::size_t k = 0; k < rf.size(); ++k) {
    int inside = 0, near = 0;
    for (const Point& q : lattice.points) {
      if (w.border_distance(q) < rf[k]) continue;
      ++inside;
      if (rf[k] > 0 && distance(q, one[0]) <= rf[k]) ++near;
    }
    CHECK(f.value[k] == doctest::Approx(static_cast<double>(near) / inside).epsilon(1e-14));
  }

  const auto j = j_inhom(two, lam, lattice, r);
  CHECK(j.value[0] == 1.0);
  CHECK(j.reference[2] == 1.0);
}

TEST_CASE("J is 1/(1-F) when all points are further apart than max r") {
  const RectWindow w(0, 0, 100, 100);
  const PointPattern p(w, {{20, 20}, {70, 30}, {40, 80}});
  const std::vector<double> lam{0.001, 0.002, 0.0015};
  const RGrid r = RGrid::uniform(10, 41);
  const auto lattice = LatticePoints::regular(w, 50, 50);
  const auto g = g_inhom(p, lam, r);
  const auto f = f_inhom(p, lam, lattice, r);
  const auto j = j_inhom(p, lam, lattice, r);
  for (std::size_t k = 0; k < r.size(); ++k) {
    CHECK(g.value[k] == 0.0);
    CHECK(j.value[k] == doctest::Approx(1.0 / (1.0 - f.value[k])));
    CHECK(j.value[k] >= 1.0);
  }
}

TEST_CASE("estimators agree with direct enumeration for small patterns") {
  Rng rng({41, 0});
  const RectWindow w(0, 0, 30, 20);
  const auto ow = testing::to_oracle(w);
  const RGrid r = RGrid::uniform(9.5, 77);
  const std::vector<double> rv(r.values().begin(), r.values().end());
  const auto lattice = LatticePoints::regular(w, 23, 17);
  const auto olat = testing::to_oracle(lattice.points);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n1 = 1 + rng.below(8), n2 = 1 + rng.below(8);
    const PointPattern p1(w, testing::uniform_points(w, n1, rng));
    const PointPattern p2(w, testing::uniform_points(w, n2, rng));
    const auto l1 = random_lambda(n1, rng), l2 = random_lambda(n2, rng);
    const auto o1 = testing::to_oracle(p1.points()), o2 = testing::to_oracle(p2.points());

    const auto k = k_inhom(p1, l1, r);
    const auto ok = oracle::k_inhom(ow, o1, l1, rv);
    const auto kc = k_cross_inhom(p1, p2, l1, l2, r);
    const auto okc = oracle::k_cross(ow, o1, o2, l1, l2, rv);
    const auto g = g_inhom(p1, l1, r);
    const auto og = oracle::product_cdf(ow, o1, o1, l1, rv, true);
    const auto f = f_inhom(p1, l1, lattice, r);
    const auto of = oracle::product_cdf(ow, olat, o1, l1, rv, false);
    const auto j = j_inhom(p1, l1, lattice, r);
    const auto oj = oracle::j_from(og, of, kJCutoff);
    const auto f2 = oracle::product_cdf(ow, olat, o2, l2, rv, false);
    const auto gc = oracle::product_cdf(ow, o1, o2, l2, rv, false);
    const auto jc = j_cross_inhom(p1, p2, l2, lattice, r);
    const auto ojc = oracle::j_from(gc, f2, kJCutoff);
    const auto gcl = g_cross_inhom(p1, p2, l2, r);

    for (std::size_t i = 0; i < r.size(); ++i) {
      CHECK(close_rel(k.value[i], ok[i], 1e-12));
      CHECK(close_rel(kc.value[i], okc[i], 1e-12));
      CHECK(close_mixed(g.value[i], og[i], 1e-12));
      CHECK(g.defined[i] == !std::isnan(og[i]));
      CHECK(close_mixed(f.value[i], of[i], 1e-12));
      CHECK(close_mixed(j.value[i], oj[i], 1e-12));
      CHECK(j.defined[i] == !std::isnan(oj[i]));
      CHECK(close_mixed(gcl.value[i], gc[i], 1e-12));
      CHECK(close_mixed(jc.value[i], ojc[i], 1e-12));
    }
  }
}

// Minus sampling changes the reference set with r, so only K is monotone.
TEST_CASE("shape properties: monotone K, F and G within [0, 1], J(0) = 1") {
  Rng rng({42, 0});
  const RectWindow w(0, 0, 100, 50);
  const RGrid r = RGrid::uniform(12, 200);
  const auto lattice = LatticePoints::regular(w, 64, 32);
  for (int t = 0; t < 10; ++t) {
    const PointPattern p(w, testing::uniform_points(w, 20 + rng.below(200), rng));
    const auto lam = random_lambda(p.size(), rng);
    const auto k = k_inhom(p, lam, r);
    const auto g = g_inhom(p, lam, r);
    const auto f = f_inhom(p, lam, lattice, r);
    const auto j = j_ratio(g, f, SummaryKind::J);
    CHECK(k.value[0] == 0.0);
    CHECK(j.value[0] == 1.0);
    for (std::size_t i = 1; i < r.size(); ++i) {
      CHECK(k.value[i] >= k.value[i - 1]);
      CHECK(f.value[i] >= 0.0);
      CHECK(f.value[i] <= 1.0);
      CHECK(g.value[i] <= 1.0);
    }
  }
}

TEST_CASE("constant intensity n/|W| reproduces the stationary K") {
  Rng rng({43, 0});
  const RectWindow w(0, 0, 100, 50);
  const PointPattern p(w, testing::uniform_points(w, 150, rng));
  const RGrid r = RGrid::uniform(20, 128);
  const double lam = 150.0 / w.area();
  const auto ki = k_inhom(p, std::vector<double>(150, lam), r);
  const auto ks = k_stationary(p, r);
  CHECK(ki.value == ks.value);
  // Classical form |W| / n^2 * sum w_ij 1(d_ij <= r).
  for (std::size_t k = 0; k < r.size(); k += 16) {
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      for (std::size_t j = 0; j < p.size(); ++j) {
        if (i != j && distance(p[i], p[j]) <= r[k]) s += translation_weight(w, p[i], p[j]);
      }
    }
    CHECK(close_rel(ks.value[k], w.area() / (150.0 * 150.0) * s, 1e-12));
  }
}

TEST_CASE("intensity scaling: K scales by 1/c^2, J is invariant") {
  Rng rng({44, 0});
  const RectWindow w(0, 0, 100, 50);
  const PointPattern p1(w, testing::uniform_points(w, 80, rng));
  const PointPattern p2(w, testing::uniform_points(w, 60, rng));
  const auto l1 = random_lambda(80, rng), l2 = random_lambda(60, rng);
  auto scaled = [](std::vector<double> v, double c) {
    for (auto& x : v) x *= c;
    return v;
  };
  const double c = 4.0;  // a power of two keeps the ratios exact
  const RGrid r = RGrid::uniform(10, 64);
  const auto lattice = LatticePoints::regular(w, 40, 20);
  const auto k = k_inhom(p1, l1, r), kc = k_inhom(p1, scaled(l1, c), r);
  const auto x = k_cross_inhom(p1, p2, l1, l2, r), xc = k_cross_inhom(p1, p2, scaled(l1, c), scaled(l2, c), r);
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(close_rel(kc.value[i], k.value[i] / (c * c), 1e-14));
    CHECK(close_rel(xc.value[i], x.value[i] / (c * c), 1e-14));
  }
  const auto j = j_inhom(p1, l1, lattice, r), jc = j_inhom(p1, scaled(l1, c), lattice, r);
  const auto jx = j_cross_inhom(p1, p2, l2, lattice, r), jxc = j_cross_inhom(p1, p2, scaled(l2, c), lattice, r);
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(close_mixed(jc.value[i], j.value[i], 0.0));
    CHECK(close_mixed(jxc.value[i], jx.value[i], 0.0));
  }
}

TEST_CASE("duplicate points give K(0) > 0") {
  const RectWindow w(0, 0, 10, 10);
  const PointPattern p(w, {{5, 5}, {5, 5}});
  const auto k = k_inhom(p, std::vector<double>{1.0, 1.0}, RGrid({0.0, 1.0}));
  CHECK(k.value[0] == doctest::Approx(2.0 / 100));
}

TEST_CASE("J is undefined where 1 - F is at or below the cutoff") {
  Rng rng({45, 0});
  const RectWindow w(0, 0, 40, 40);
  const PointPattern p(w, testing::uniform_points(w, 400, rng));
  const std::vector<double> lam(400, 0.25);
  std::vector<double> varied(400);
  for (auto& v : varied) v = rng.uniform(0.2, 0.3);
  const RGrid r = RGrid::uniform(15, 60);
  const auto lattice = LatticePoints::regular(w, 40, 40);
  const auto f = f_inhom(p, varied, lattice, r);
  const auto j = j_inhom(p, varied, lattice, r);
  bool saw_undefined = false;
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (f.defined[k] && 1.0 - f.value[k] <= kJCutoff) {
      CHECK_FALSE(j.defined[k]);
      CHECK(std::isnan(j.value[k]));
      saw_undefined = true;
    }
  }
  CHECK(saw_undefined);
}

// At r = 5 the expected 1 - F is exp(-0.04 pi 25) = 0.043, below the J cutoff:
// J is undefined in most realizations and biased low in the rest, so the
// calibration stops at r = 4.
TEST_CASE("Poisson calibration of K, J and cross J with the true intensity") {
  const RectWindow w(0, 0, 100, 100);
  const RGrid r({0.0, 1.0, 2.0, 3.0, 4.0});
  const auto lattice = LatticePoints::regular(w, 100, 100);
  std::vector<double> k_sum(r.size(), 0.0), j_sum(r.size(), 0.0), jc_sum(r.size(), 0.0);
  std::vector<int> j_n(r.size(), 0), jc_n(r.size(), 0);
  const int reps = 100;
  for (int s = 0; s < reps; ++s) {
    const PointPattern p = sample_homogeneous_poisson(w, 0.04, {77, static_cast<std::uint64_t>(2 * s)});
    const PointPattern q = sample_homogeneous_poisson(w, 0.04, {77, static_cast<std::uint64_t>(2 * s + 1)});
    const std::vector<double> lam(p.size(), 0.04), lq(q.size(), 0.04);
    const auto k = k_inhom(p, lam, r);
    const auto j = j_inhom(p, lam, lattice, r);
    const auto jc = j_cross_inhom(p, q, lq, lattice, r);
    for (std::size_t i = 0; i < r.size(); ++i) {
      k_sum[i] += k.value[i];
      if (j.defined[i]) j_sum[i] += j.value[i], ++j_n[i];
      if (jc.defined[i]) jc_sum[i] += jc.value[i], ++jc_n[i];
    }
  }
  CHECK(k_sum[1] / reps == doctest::Approx(kPi).epsilon(0.05));
  for (std::size_t i = 1; i < r.size(); ++i) {
    REQUIRE(j_n[i] == reps);
    REQUIRE(jc_n[i] == reps);
    const double jm = j_sum[i] / j_n[i], jcm = jc_sum[i] / jc_n[i];
    CHECK(jm >= 0.95);
    CHECK(jm <= 1.05);
    CHECK(jcm >= 0.95);
    CHECK(jcm <= 1.05);
  }
}

TEST_CASE("clustered patterns give J below 1 and cross J below 1 under attraction") {
  const RectWindow w(0, 0, 100, 100);
  const RGrid r = RGrid::uniform(4, 9);
  const auto lattice = LatticePoints::regular(w, 100, 100);
  int below = 0;
  for (std::uint64_t s = 0; s < 40; ++s) {
    const PointPattern p = sample_thomas({0.002, 15, 1.0}, w, {5, s});
    if (p.size() < 2) continue;
    const std::vector<double> lam(p.size(), static_cast<double>(p.size()) / w.area());
    below += j_inhom(p, lam, lattice, r).value[2] < 1.0;
  }
  CHECK(below >= 38);

  Rng rng({46, 0});
  const PointPattern p1(w, testing::uniform_points(w, 100, rng));
  std::vector<Point> planted(p1.points().begin(), p1.points().end());
  const PointPattern p2(w, planted);
  const std::vector<double> l2(100, 0.01);
  const auto jc = j_cross_inhom(p1, p2, l2, lattice, r);
  CHECK(jc.value[2] < 1.0);
}

TEST_CASE("summary CSV layout") {
  const RectWindow w(0, 0, 10, 10);
  const PointPattern two(w, {{4, 5}, {6, 5}});
  std::ostringstream k;
  write_summary_csv(k, k_inhom(two, std::vector<double>{0.02, 0.02}, RGrid({0.0, 2.0})));
  CHECK(k.str() == "r,value,reference\n0,0,0\n2,62.5,12.566370614359172\n");

  SummaryFunction j{SummaryKind::J, RGrid({0.0, 1.0}), {1.0, std::nan("")}, {1.0, 1.0}, {true, false}};
  std::ostringstream js;
  write_summary_csv(js, j);
  CHECK(js.str() == "r,value,reference,defined\n0,1,1,1\n1,NA,1,0\n");
}
