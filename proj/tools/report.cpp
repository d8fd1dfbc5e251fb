#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "inhomstat/error.hpp"
#include "inhomstat/format.hpp"
#include "json.hpp"

namespace inhomstat::cli {

namespace fs = std::filesystem;

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Data, "cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) fail(ErrorKind::Data, "cannot write " + path.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorKind::Data, "cannot write " + path.string());
  }
}

namespace {

const char* reference_name(ReferenceMode m) {
  return m == ReferenceMode::SimulationMean ? "simulation_mean" : "theoretical";
}

std::string num(double v) { return format_double(v); }

// Coordinates inside SVG files only need to be stable, not exact.
std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string svg_open(double width, double height) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(width) +
         "\" height=\"" + px(height) + "\" viewBox=\"0 0 " + px(width) + " " + px(height) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string text(double x, double y, const std::string& s, const char* anchor = "middle") {
  return "<text x=\"" + px(x) + "\" y=\"" + px(y) + "\" text-anchor=\"" + anchor + "\">" + escape_xml(s) +
         "</text>\n";
}

// Viridis-like ramp through five anchor colours.
std::string colour(double t) {
  static const double stops[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int k = std::min(3, static_cast<int>(t));
  const double f = t - k;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(stops[k][0] + f * (stops[k + 1][0] - stops[k][0]))),
                static_cast<int>(std::lround(stops[k][1] + f * (stops[k + 1][1] - stops[k][1]))),
                static_cast<int>(std::lround(stops[k][2] + f * (stops[k + 1][2] - stops[k][2]))));
  return buf;
}

struct Axes {
  double left, top, width, height;
  double x0, x1, y0, y1;

  double sx(double x) const { return left + (x - x0) / (x1 - x0) * width; }
  double sy(double y) const { return top + height - (y - y0) / (y1 - y0) * height; }

  std::string frame(const std::string& xlabel, const std::string& ylabel) const {
    std::string s = "<rect x=\"" + px(left) + "\" y=\"" + px(top) + "\" width=\"" + px(width) + "\" height=\"" +
                    px(height) + "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
      const double xv = x0 + (x1 - x0) * k / 4.0;
      const double yv = y0 + (y1 - y0) * k / 4.0;
      s += text(sx(xv), top + height + 16, num(std::round(xv * 1e4) / 1e4));
      s += text(left - 6, sy(yv) + 4, num(std::round(yv * 1e4) / 1e4), "end");
    }
    s += text(left + width / 2, top + height + 34, xlabel);
    s += "<text x=\"" + px(left - 48) + "\" y=\"" + px(top + height / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 " +
         px(left - 48) + " " + px(top + height / 2) + ")\">" + escape_xml(ylabel) + "</text>\n";
    return s;
  }
};

// Polyline segments, broken wherever a value is undefined.
std::string curve(const Axes& a, std::span<const double> r, std::span<const double> v, const std::vector<bool>& ok,
                  const std::string& style) {
  std::string s;
  std::string d;
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (!ok[k] || !std::isfinite(v[k])) {
      if (!d.empty()) s += "<path d=\"" + d + "\" " + style + "/>\n";
      d.clear();
      continue;
    }
    d += (d.empty() ? "M" : " L") + px(a.sx(r[k])) + " " + px(a.sy(std::clamp(v[k], a.y0, a.y1)));
  }
  if (!d.empty()) s += "<path d=\"" + d + "\" " + style + "/>\n";
  return s;
}

}  // namespace

std::string result_json(const TestResult& r, const ResultContext& c) {
  nlohmann::json j;
  j["subject"] = c.subject;
  j["statistic"] = r.statistic;
  j["deviation"] = to_string(r.kind.type);
  j["sided"] = to_string(r.kind.sided);
  j["reference"] = reference_name(r.reference);
  j["observed_t"] = r.observed_t;
  j["simulated_t"] = r.simulated_t;
  j["p_value"] = r.p_value;
  j["r_min"] = r.r_min;
  j["r_max"] = r.r_max;
  j["r_used"] = r.r_used;
  j["nsim"] = c.nsim;
  j["seed"] = c.seed;
  if (c.bandwidth) {
    j["bandwidth"] = *c.bandwidth;
  } else {
    j["bandwidth"] = nullptr;
  }
  return j.dump(2) + "\n";
}

std::string envelope_csv(const Envelope& e) {
  std::ostringstream out;
  out << "r,lower,upper,observed,reference\n";
  for (std::size_t k = 0; k < e.r.size(); ++k) {
    out << num(e.r[k]) << ',' << num(e.lower[k]) << ',' << num(e.upper[k]) << ',' << num(e.observed[k]) << ','
        << num(e.reference[k]) << '\n';
  }
  return out.str();
}

std::string summary_csv(const SummaryFunction& f) {
  std::ostringstream out;
  write_summary_csv(out, f);
  return out.str();
}

std::string surface_csv(const IntensitySurface& s) {
  std::ostringstream out;
  write_surface_csv(out, s);
  return out.str();
}

std::string screen_csv(std::span<const ScreenRow> rows) {
  std::ostringstream out;
  write_screen_csv(out, rows);
  return out.str();
}

std::string heatmap_svg(const IntensitySurface& s, const std::string& title) {
  const double plot_w = 640.0;
  const double plot_h = plot_w * s.window().height() / s.window().width();
  const double left = 60, top = 40;
  const double total_w = left + plot_w + 100, total_h = top + plot_h + 50;
  const double cw = plot_w / static_cast<double>(s.nx());
  const double ch = plot_h / static_cast<double>(s.ny());
  const double vmax = s.max_value() > 0.0 ? s.max_value() : 1.0;

  std::string out = svg_open(total_w, total_h);
  out += text(left + plot_w / 2, 24, title);
  for (std::size_t j = 0; j < s.ny(); ++j) {
    const double y = top + plot_h - static_cast<double>(j + 1) * ch;
    for (std::size_t i = 0; i < s.nx(); ++i) {
      out += "<rect x=\"" + px(left + static_cast<double>(i) * cw) + "\" y=\"" + px(y) + "\" width=\"" +
             px(cw + 0.05) + "\" height=\"" + px(ch + 0.05) + "\" fill=\"" + colour(s.at(i, j) / vmax) + "\"/>\n";
    }
  }
  out += "<rect x=\"" + px(left) + "\" y=\"" + px(top) + "\" width=\"" + px(plot_w) + "\" height=\"" + px(plot_h) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  out += text(left, top + plot_h + 18, num(s.window().x_min()));
  out += text(left + plot_w, top + plot_h + 18, num(s.window().x_max()));
  out += text(left - 6, top + plot_h, num(s.window().y_min()), "end");
  out += text(left - 6, top + 10, num(s.window().y_max()), "end");

  // Colour bar.
  const double bx = left + plot_w + 30;
  for (int k = 0; k < 50; ++k) {
    out += "<rect x=\"" + px(bx) + "\" y=\"" + px(top + plot_h - (k + 1) * plot_h / 50) + "\" width=\"16\" height=\"" +
           px(plot_h / 50 + 0.05) + "\" fill=\"" + colour((k + 0.5) / 50) + "\"/>\n";
  }
  out += text(bx + 20, top + plot_h, "0", "start");
  out += text(bx + 20, top + 10, num(vmax), "start");
  out += "</svg>\n";
  return out;
}

std::string envelope_svg(const Envelope& e, const std::string& title) {
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (std::size_t k = 0; k < e.r.size(); ++k) {
    if (!e.defined[k]) continue;
    for (double v : {e.lower[k], e.upper[k], e.observed[k], e.reference[k]}) {
      if (!std::isfinite(v)) continue;
      lo = any ? std::min(lo, v) : v;
      hi = any ? std::max(hi, v) : v;
      any = true;
    }
  }
  if (!(hi > lo)) hi = lo + 1.0;
  const double pad = 0.05 * (hi - lo);
  const Axes a{70, 40, 560, 360, 0.0, e.r.max(), lo - pad, hi + pad};

  std::string out = svg_open(700, 460);
  out += text(a.left + a.width / 2, 24, title);

  // Band between the envelopes, one polygon per defined run.
  std::size_t k = 0;
  while (k < e.r.size()) {
    while (k < e.r.size() && !e.defined[k]) ++k;
    const std::size_t start = k;
    while (k < e.r.size() && e.defined[k]) ++k;
    if (k - start < 2) continue;
    std::string d;
    for (std::size_t m = start; m < k; ++m) d += (d.empty() ? "M" : " L") + px(a.sx(e.r[m])) + " " + px(a.sy(e.upper[m]));
    for (std::size_t m = k; m-- > start;) d += " L" + px(a.sx(e.r[m])) + " " + px(a.sy(e.lower[m]));
    out += "<path d=\"" + d + " Z\" fill=\"#cccccc\" stroke=\"none\"/>\n";
  }
  out += curve(a, e.r.values(), e.reference, e.defined, "fill=\"none\" stroke=\"#d62728\" stroke-dasharray=\"6 4\"");
  out += curve(a, e.r.values(), e.observed, e.defined, "fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"");
  out += a.frame("r (m)", "value");
  out += "</svg>\n";
  return out;
}

std::vector<std::size_t> histogram_counts(std::span<const double> values, double lo, double hi, std::size_t bins) {
  std::vector<std::size_t> counts(bins, 0);
  for (double v : values) {
    if (!(v >= lo && v <= hi)) continue;
    auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
    counts[std::min(b, bins - 1)] += 1;
  }
  return counts;
}

std::string pvalue_histogram_svg(std::span<const ScreenRow> rows, const std::string& title) {
  std::vector<double> p;
  for (const auto& r : rows) {
    if (r.p_value) p.push_back(*r.p_value);
  }

  std::string out = svg_open(1000, 420);
  out += text(500, 22, title);
  const auto panel = [&](double left, double hi, std::size_t bins, const std::string& label) {
    const auto counts = histogram_counts(p, 0.0, hi, bins);
    const std::size_t cmax = std::max<std::size_t>(1, *std::max_element(counts.begin(), counts.end()));
    const Axes a{left, 50, 380, 300, 0.0, hi, 0.0, static_cast<double>(cmax)};
    std::string s;
    for (std::size_t b = 0; b < bins; ++b) {
      const double x0 = a.sx(hi * static_cast<double>(b) / static_cast<double>(bins));
      const double x1 = a.sx(hi * static_cast<double>(b + 1) / static_cast<double>(bins));
      const double y = a.sy(static_cast<double>(counts[b]));
      s += "<rect x=\"" + px(x0) + "\" y=\"" + px(y) + "\" width=\"" + px(x1 - x0) + "\" height=\"" +
           px(a.top + a.height - y) + "\" fill=\"#4c72b0\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
    }
    s += a.frame(label, "count");
    return s;
  };
  out += panel(80, 1.0, 20, "p-value");
  out += panel(580, 0.1, 20, "p-value (zoom to [0, 0.1])");
  out += "</svg>\n";
  return out;
}

}  // namespace inhomstat::cli
