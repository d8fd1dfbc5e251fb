#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "inhomstat/error.hpp"
#include "inhomstat/geometry.hpp"
#include "inhomstat/intensity.hpp"
#include "inhomstat/mctest.hpp"
#include "inhomstat/pattern.hpp"
#include "inhomstat/simulate.hpp"
#include "inhomstat/sumstats.hpp"

namespace py = pybind11;
using namespace inhomstat;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<Point> to_points(const Array& a) {
  if (a.size() == 0) return {};
  if (a.ndim() != 2 || a.shape(1) != 2) throw py::value_error("points must be an (n, 2) array");
  auto v = a.unchecked<2>();
  std::vector<Point> pts(static_cast<std::size_t>(v.shape(0)));
  for (py::ssize_t i = 0; i < v.shape(0); ++i) pts[static_cast<std::size_t>(i)] = {v(i, 0), v(i, 1)};
  return pts;
}

Array from_points(std::span<const Point> pts) {
  Array out({static_cast<py::ssize_t>(pts.size()), py::ssize_t{2}});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    v(static_cast<py::ssize_t>(i), 0) = pts[i].x;
    v(static_cast<py::ssize_t>(i), 1) = pts[i].y;
  }
  return out;
}

PointPattern pattern(const Array& a, const RectWindow& w) { return PointPattern(w, to_points(a)); }

Array vec(std::span<const double> v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

SummaryKind parse_kind(const std::string& s) {
  for (auto k : {SummaryKind::K, SummaryKind::F, SummaryKind::G, SummaryKind::J, SummaryKind::KCross,
                 SummaryKind::GCross, SummaryKind::JCross}) {
    if (s == to_string(k)) return k;
  }
  throw py::value_error("unknown summary kind " + s);
}

ReferenceMode parse_reference(const std::string& s) {
  if (s == "mean") return ReferenceMode::SimulationMean;
  if (s == "theoretical") return ReferenceMode::Theoretical;
  throw py::value_error("reference must be 'mean' or 'theoretical'");
}

const char* reference_name(ReferenceMode m) { return m == ReferenceMode::SimulationMean ? "mean" : "theoretical"; }

UnivariateStat parse_univariate(const std::string& s) {
  if (s == "K") return UnivariateStat::K;
  if (s == "J") return UnivariateStat::J;
  throw py::value_error("stat must be 'K' or 'J'");
}

CrossStat parse_cross(const std::string& s) {
  if (s == "Kcross") return CrossStat::KCross;
  if (s == "Jcross") return CrossStat::JCross;
  throw py::value_error("stat must be 'Kcross' or 'Jcross'");
}

LatticePoints lattice_for(const IntensitySurface& s, std::size_t nx, std::size_t ny) {
  if (nx == 0 || ny == 0) return LatticePoints::for_surface(s);
  return LatticePoints::regular(s.window(), nx, ny);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Inhomogeneous spatial point pattern statistics";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  py::class_<RectWindow>(m, "RectWindow")
      .def(py::init<double, double, double, double>(), py::arg("x_min"), py::arg("y_min"), py::arg("x_max"),
           py::arg("y_max"))
      .def_property_readonly("x_min", &RectWindow::x_min)
      .def_property_readonly("y_min", &RectWindow::y_min)
      .def_property_readonly("x_max", &RectWindow::x_max)
      .def_property_readonly("y_max", &RectWindow::y_max)
      .def_property_readonly("width", &RectWindow::width)
      .def_property_readonly("height", &RectWindow::height)
      .def_property_readonly("area", &RectWindow::area)
      .def("contains", [](const RectWindow& w, double x, double y) { return w.contains({x, y}); })
      .def("__eq__", [](const RectWindow& a, const RectWindow& b) { return a == b; })
      .def("__repr__", [](const RectWindow& w) {
        return "RectWindow(" + std::to_string(w.x_min()) + ", " + std::to_string(w.y_min()) + ", " +
               std::to_string(w.x_max()) + ", " + std::to_string(w.y_max()) + ")";
      });

  m.def("erode", [](const RectWindow& w, double r) { return w.erode(r); }, py::arg("window"), py::arg("r"));
  m.def(
      "translation_weight",
      [](const RectWindow& w, std::pair<double, double> p, std::pair<double, double> q) {
        return translation_weight(w, {p.first, p.second}, {q.first, q.second});
      },
      py::arg("window"), py::arg("p"), py::arg("q"));
  m.def(
      "torus_shift",
      [](const Array& pts, std::pair<double, double> shift, const RectWindow& w) {
        const auto p = to_points(pts);
        return from_points(torus_shift(p, {shift.first, shift.second}, w));
      },
      py::arg("points"), py::arg("shift"), py::arg("window"));

  py::class_<IntensitySurface>(m, "IntensitySurface")
      .def(py::init([](const RectWindow& w, const Array& values) {
             if (values.ndim() != 2) throw py::value_error("values must be a (ny, nx) array");
             std::vector<double> v(values.data(), values.data() + values.size());
             return IntensitySurface(w, static_cast<std::size_t>(values.shape(1)),
                                     static_cast<std::size_t>(values.shape(0)), std::move(v));
           }),
           py::arg("window"), py::arg("values"))
      .def_static("constant", &IntensitySurface::constant, py::arg("window"), py::arg("nx"), py::arg("ny"),
                  py::arg("value"))
      .def_property_readonly("window", &IntensitySurface::window)
      .def_property_readonly("nx", &IntensitySurface::nx)
      .def_property_readonly("ny", &IntensitySurface::ny)
      .def_property_readonly("values",
                             [](const IntensitySurface& s) {
                               Array out({static_cast<py::ssize_t>(s.ny()), static_cast<py::ssize_t>(s.nx())});
                               std::copy(s.values().begin(), s.values().end(), out.mutable_data());
                               return out;
                             })
      .def("total_mass", &IntensitySurface::total_mass)
      .def("max_value", &IntensitySurface::max_value)
      .def("evaluate", [](const IntensitySurface& s, const Array& pts) { return vec(s.evaluate(to_points(pts))); });

  m.def(
      "kernel_intensity",
      [](const Array& pts, const RectWindow& w, double h, std::size_t nx, std::size_t ny) {
        return kernel_intensity(pattern(pts, w), Bandwidth(h), nx, ny);
      },
      py::arg("points"), py::arg("window"), py::arg("h"), py::arg("nx") = 256, py::arg("ny") = 128);
  m.def(
      "default_bandwidth_candidates",
      [](const RectWindow& w, std::size_t nx, std::size_t ny, std::size_t count) {
        std::vector<double> out;
        for (const auto& b : default_bandwidth_candidates(w, nx, ny, count)) out.push_back(b.value());
        return out;
      },
      py::arg("window"), py::arg("nx") = 256, py::arg("ny") = 128, py::arg("count") = 20);

  const auto bandwidths = [](const std::vector<double>& hs) {
    std::vector<Bandwidth> out;
    for (double h : hs) out.emplace_back(h);
    return out;
  };
  m.def(
      "cvl_scores",
      [bandwidths](const Array& pts, const RectWindow& w, const std::vector<double>& candidates, bool loo) {
        std::vector<std::tuple<double, double, double>> out;
        for (const auto& s : cvl_scores(pattern(pts, w), bandwidths(candidates), CvlOptions{loo})) {
          out.emplace_back(s.h, s.t, s.score);
        }
        return out;
      },
      py::arg("points"), py::arg("window"), py::arg("candidates"), py::arg("leave_one_out") = false);
  m.def(
      "cvl_bandwidth",
      [bandwidths](const Array& pts, const RectWindow& w, const std::vector<double>& candidates, bool loo) {
        return cvl_bandwidth(pattern(pts, w), bandwidths(candidates), CvlOptions{loo}).value();
      },
      py::arg("points"), py::arg("window"), py::arg("candidates"), py::arg("leave_one_out") = false);

  py::enum_<EdgeCorrection>(m, "EdgeCorrection")
      .value("Translation", EdgeCorrection::Translation)
      .value("Torus", EdgeCorrection::Torus);

  py::class_<SummaryFunction>(m, "SummaryFunction")
      .def(py::init([](const std::string& kind, std::vector<double> r, std::vector<double> value,
                       std::vector<double> reference) {
             if (value.size() != r.size() || reference.size() != r.size()) {
               throw py::value_error("r, value and reference must have equal length");
             }
             std::vector<bool> defined(r.size());
             for (std::size_t k = 0; k < r.size(); ++k) defined[k] = std::isfinite(value[k]);
             return SummaryFunction{parse_kind(kind), RGrid(std::move(r)), std::move(value), std::move(reference),
                                    std::move(defined)};
           }),
           py::arg("kind"), py::arg("r"), py::arg("value"), py::arg("reference"))
      .def_property_readonly("kind", [](const SummaryFunction& f) { return to_string(f.kind); })
      .def_property_readonly("r", [](const SummaryFunction& f) { return vec(f.r.values()); })
      .def_property_readonly("value", [](const SummaryFunction& f) { return vec(f.value); })
      .def_property_readonly("reference", [](const SummaryFunction& f) { return vec(f.reference); })
      .def_property_readonly("defined", [](const SummaryFunction& f) { return std::vector<bool>(f.defined); });

  m.def(
      "k_inhom",
      [](const Array& pts, const RectWindow& w, const IntensitySurface& s, std::vector<double> r) {
        return k_inhom(pattern(pts, w), s, RGrid(std::move(r)));
      },
      py::arg("points"), py::arg("window"), py::arg("intensity"), py::arg("r"));
  m.def(
      "k_inhom",
      [](const Array& pts, const RectWindow& w, const std::vector<double>& lambda, std::vector<double> r,
         EdgeCorrection edge) { return k_inhom(pattern(pts, w), lambda, RGrid(std::move(r)), edge); },
      py::arg("points"), py::arg("window"), py::arg("intensity"), py::arg("r"),
      py::arg("edge") = EdgeCorrection::Translation);
  m.def(
      "j_inhom",
      [](const Array& pts, const RectWindow& w, const IntensitySurface& s, std::vector<double> r, std::size_t nx,
         std::size_t ny) { return j_inhom(pattern(pts, w), s, lattice_for(s, nx, ny), RGrid(std::move(r))); },
      py::arg("points"), py::arg("window"), py::arg("intensity"), py::arg("r"), py::arg("lattice_nx") = 0,
      py::arg("lattice_ny") = 0);
  m.def(
      "k_cross_inhom",
      [](const Array& p1, const Array& p2, const RectWindow& w, const IntensitySurface& s1,
         const IntensitySurface& s2, std::vector<double> r) {
        return k_cross_inhom(pattern(p1, w), pattern(p2, w), s1, s2, RGrid(std::move(r)));
      },
      py::arg("points1"), py::arg("points2"), py::arg("window"), py::arg("intensity1"), py::arg("intensity2"),
      py::arg("r"));
  m.def(
      "j_cross_inhom",
      [](const Array& p1, const Array& p2, const RectWindow& w, const IntensitySurface& s2, std::vector<double> r,
         std::size_t nx, std::size_t ny) {
        return j_cross_inhom(pattern(p1, w), pattern(p2, w), s2, lattice_for(s2, nx, ny), RGrid(std::move(r)));
      },
      py::arg("points1"), py::arg("points2"), py::arg("window"), py::arg("intensity2"), py::arg("r"),
      py::arg("lattice_nx") = 0, py::arg("lattice_ny") = 0);

  m.def(
      "sample_inhom_poisson",
      [](const IntensitySurface& s, std::uint64_t seed, std::uint64_t stream) {
        return from_points(sample_inhom_poisson(s, RngSeed{seed, stream}).points());
      },
      py::arg("intensity"), py::arg("seed"), py::arg("stream") = 0);
  m.def(
      "sample_homogeneous_poisson",
      [](const RectWindow& w, double rate, std::uint64_t seed, std::uint64_t stream) {
        return from_points(sample_homogeneous_poisson(w, rate, RngSeed{seed, stream}).points());
      },
      py::arg("window"), py::arg("rate"), py::arg("seed"), py::arg("stream") = 0);
  m.def(
      "sample_thomas",
      [](const RectWindow& w, double parent_rate, double offspring, double sigma, std::uint64_t seed,
         std::uint64_t stream) {
        return from_points(sample_thomas({parent_rate, offspring, sigma}, w, RngSeed{seed, stream}).points());
      },
      py::arg("window"), py::arg("parent_rate"), py::arg("mean_offspring"), py::arg("sigma"), py::arg("seed"),
      py::arg("stream") = 0);
  m.def(
      "random_pairing",
      [](const std::vector<std::string>& species, std::uint64_t seed, std::uint64_t stream) {
        const Pairing p = random_pairing(species, RngSeed{seed, stream});
        std::vector<std::pair<std::string, std::string>> pairs;
        for (const auto& sp : p.pairs) pairs.emplace_back(sp.first, sp.second);
        return std::make_pair(pairs, p.unpaired);
      },
      py::arg("species"), py::arg("seed"), py::arg("stream") = 0);

  py::class_<TestResult>(m, "TestResult")
      .def_readonly("statistic", &TestResult::statistic)
      .def_property_readonly("deviation", [](const TestResult& r) { return to_string(r.kind.type); })
      .def_property_readonly("sided", [](const TestResult& r) { return to_string(r.kind.sided); })
      .def_property_readonly("reference", [](const TestResult& r) { return reference_name(r.reference); })
      .def_readonly("observed_t", &TestResult::observed_t)
      .def_readonly("simulated_t", &TestResult::simulated_t)
      .def_readonly("p_value", &TestResult::p_value)
      .def_readonly("r_min", &TestResult::r_min)
      .def_readonly("r_max", &TestResult::r_max)
      .def_readonly("r_used", &TestResult::r_used);

  py::class_<McOptions>(m, "McOptions")
      .def(py::init([](std::size_t nsim, double r_min, double r_max, std::size_t r_points, const std::string& deviation,
                       const std::string& sided, const std::string& reference, std::uint64_t seed,
                       std::size_t envelope_rank, bool reestimate_intensity, unsigned threads) {
             McOptions o;
             o.nsim = nsim;
             o.r_min = r_min;
             o.r_max = r_max;
             o.r_points = r_points;
             o.kind = {parse_deviation_type(deviation), parse_sidedness(sided)};
             o.reference = parse_reference(reference);
             o.seed = RngSeed{seed, 0};
             o.envelope_rank = envelope_rank;
             o.reestimate_intensity = reestimate_intensity;
             o.threads = threads;
             return o;
           }),
           py::arg("nsim") = 99, py::arg("r_min") = 0.0, py::arg("r_max") = 25.0, py::arg("r_points") = 512,
           py::arg("deviation") = "mad", py::arg("sided") = "two", py::arg("reference") = "mean",
           py::arg("seed") = 1, py::arg("envelope_rank") = 1, py::arg("reestimate_intensity") = false,
           py::arg("threads") = 0)
      .def_readwrite("nsim", &McOptions::nsim)
      .def_readwrite("r_min", &McOptions::r_min)
      .def_readwrite("r_max", &McOptions::r_max)
      .def_readwrite("r_points", &McOptions::r_points)
      .def_readwrite("envelope_rank", &McOptions::envelope_rank)
      .def_readwrite("threads", &McOptions::threads)
      .def_property(
          "seed", [](const McOptions& o) { return o.seed.seed; },
          [](McOptions& o, std::uint64_t s) { o.seed = RngSeed{s, 0}; });

  py::class_<McOutcome>(m, "McOutcome")
      .def_readonly("result", &McOutcome::result)
      .def_readonly("observed", &McOutcome::observed)
      .def_readonly("simulated", &McOutcome::simulated)
      .def_property_readonly("envelope_lower", [](const McOutcome& o) { return vec(o.envelope.lower); })
      .def_property_readonly("envelope_upper", [](const McOutcome& o) { return vec(o.envelope.upper); });

  m.def(
      "goodness_of_fit_test",
      [](const Array& pts, const RectWindow& w, const IntensitySurface& s, const std::string& stat,
         const McOptions& o) {
        const PointPattern p = pattern(pts, w);
        py::gil_scoped_release release;
        return goodness_of_fit_test(p, s, parse_univariate(stat), o);
      },
      py::arg("points"), py::arg("window"), py::arg("intensity"), py::arg("stat") = "K",
      py::arg("options") = McOptions{});
  m.def(
      "lotwick_silverman_test",
      [](const Array& p1, const Array& p2, const RectWindow& w, const IntensitySurface& s1,
         const IntensitySurface& s2, const std::string& stat, const McOptions& o) {
        const PointPattern a = pattern(p1, w);
        const PointPattern b = pattern(p2, w);
        const CrossStat cs = parse_cross(stat);
        py::gil_scoped_release release;
        return lotwick_silverman_test(a, b, s1, s2, cs, o);
      },
      py::arg("points1"), py::arg("points2"), py::arg("window"), py::arg("intensity1"), py::arg("intensity2"),
      py::arg("stat") = "Kcross", py::arg("options") = McOptions{});

  m.def(
      "deviation_test",
      [](const SummaryFunction& observed, const std::vector<SummaryFunction>& sims, const std::string& deviation,
         const std::string& sided, double r_min, double r_max, const std::string& reference) {
        return deviation_test(observed, sims, {parse_deviation_type(deviation), parse_sidedness(sided)}, r_min, r_max,
                              parse_reference(reference));
      },
      py::arg("observed"), py::arg("simulated"), py::arg("deviation") = "mad", py::arg("sided") = "two",
      py::arg("r_min") = 0.0, py::arg("r_max") = 25.0, py::arg("reference") = "mean");
  m.def(
      "pointwise_envelopes",
      [](const SummaryFunction& observed, const std::vector<SummaryFunction>& sims, std::size_t rank) {
        const Envelope e = pointwise_envelopes(observed, sims, rank);
        return std::make_pair(vec(e.lower), vec(e.upper));
      },
      py::arg("observed"), py::arg("simulated"), py::arg("rank") = 1);
  m.def(
      "rank_p_value", [](double t, const std::vector<double>& sims) { return rank_p_value(t, sims); }, py::arg("t_obs"),
      py::arg("t_sims"));
}
