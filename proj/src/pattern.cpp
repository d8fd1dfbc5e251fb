#include "inhomstat/pattern.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "inhomstat/error.hpp"
#include "inhomstat/format.hpp"

namespace inhomstat {

PointPattern::PointPattern(RectWindow window, std::vector<Point> points)
    : window_(window), points_(std::move(points)) {
  for (const Point& p : points_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) fail(ErrorKind::Data, "non-finite coordinate");
    if (!window_.contains(p)) fail(ErrorKind::Data, "point outside window");
  }
}

namespace {

constexpr std::array<const char*, 6> kColumns{"tree_id", "species", "x", "y", "status", "census_id"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string join_rows(const std::vector<std::size_t>& rows) {
  std::string s;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(rows[i]);
  }
  return s;
}

}  // namespace

Census ingest_census(std::istream& in, const RectWindow& window, const StatusMap& statuses) {
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
    if (!trim(line).empty()) {
      have_header = true;
      break;
    }
  }
  if (!have_header) fail(ErrorKind::Data, "schema error: missing header");

  const auto header = split_fields(line);
  std::array<std::size_t, kColumns.size()> col{};
  for (std::size_t c = 0; c < kColumns.size(); ++c) {
    const auto it = std::find(header.begin(), header.end(), std::string_view(kColumns[c]));
    if (it == header.end()) fail(ErrorKind::Data, std::string("schema error: missing column ") + kColumns[c]);
    col[c] = static_cast<std::size_t>(it - header.begin());
  }

  Census census;
  std::vector<std::size_t> bad_coordinates;
  std::set<std::tuple<int, std::string, double, double>> seen;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto f = split_fields(line);
    if (f.size() != header.size()) {
      fail(ErrorKind::Data, "schema error: expected " + std::to_string(header.size()) + " fields at row " +
                                std::to_string(row));
    }
    CensusRecord rec;
    rec.tree_id = std::string(f[col[0]]);
    rec.species = std::string(f[col[1]]);
    if (!parse_double(f[col[2]], rec.x) || !parse_double(f[col[3]], rec.y)) {
      bad_coordinates.push_back(row);
      continue;
    }
    const auto status = statuses.codes.find(std::string(f[col[4]]));
    if (status == statuses.codes.end()) {
      fail(ErrorKind::Data, "unknown status '" + std::string(f[col[4]]) + "' at row " + std::to_string(row));
    }
    rec.status = status->second;
    if (!parse_int(f[col[5]], rec.census_id) || rec.census_id < 1) {
      fail(ErrorKind::Data, "invalid census_id at row " + std::to_string(row));
    }
    if (rec.species.empty()) fail(ErrorKind::Data, "empty species code at row " + std::to_string(row));
    if (!window.contains({rec.x, rec.y})) {
      fail(ErrorKind::Data, "out-of-window point at row " + std::to_string(row));
    }
    if (!seen.emplace(rec.census_id, rec.species, rec.x, rec.y).second) ++census.duplicate_coordinates;
    census.records.push_back(std::move(rec));
  }
  if (!bad_coordinates.empty()) {
    fail(ErrorKind::Data, "unparsable coordinates at row " + join_rows(bad_coordinates));
  }
  return census;
}

Census read_census_file(const std::string& path, const RectWindow& window, const StatusMap& statuses) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Data, "cannot open census file " + path);
  return ingest_census(in, window, statuses);
}

void write_census(std::ostream& out, std::span<const CensusRecord> records) {
  out << "tree_id,species,x,y,status,census_id\n";
  std::ostringstream buf;
  for (const CensusRecord& r : records) {
    buf.str("");
    buf << r.tree_id << ',' << r.species << ',' << format_double(r.x) << ',' << format_double(r.y) << ','
        << (r.status == Status::Alive ? 'A' : 'D') << ',' << r.census_id << '\n';
    out << buf.str();
  }
}

PointPattern extract_species(std::span<const CensusRecord> records, const std::string& species, int census_id,
                             StatusFilter filter, const RectWindow& window) {
  std::vector<Point> pts;
  for (const CensusRecord& r : records) {
    if (r.species != species || r.census_id != census_id) continue;
    if (filter == StatusFilter::Alive && r.status != Status::Alive) continue;
    pts.push_back({r.x, r.y});
  }
  return PointPattern(window, std::move(pts));
}

void MultiTypePattern::add(const std::string& species, PointPattern pattern) {
  if (!(pattern.window() == window_)) fail(ErrorKind::Data, "window mismatch for species " + species);
  if (!species_.emplace(species, std::move(pattern)).second) {
    fail(ErrorKind::Data, "duplicate species code " + species);
  }
}

const PointPattern& MultiTypePattern::at(const std::string& species) const {
  const auto it = species_.find(species);
  if (it == species_.end()) fail(ErrorKind::Data, "unknown species " + species);
  return it->second;
}

std::vector<std::string> MultiTypePattern::species_codes() const {
  std::vector<std::string> codes;
  codes.reserve(species_.size());
  for (const auto& [code, _] : species_) codes.push_back(code);
  return codes;
}

MultiTypePattern build_multitype(std::span<const CensusRecord> records, int census_id, StatusFilter filter,
                                 const RectWindow& window) {
  std::map<std::string, std::vector<Point>> grouped;
  for (const CensusRecord& r : records) {
    if (r.census_id != census_id) continue;
    if (filter == StatusFilter::Alive && r.status != Status::Alive) continue;
    grouped[r.species].push_back({r.x, r.y});
  }
  MultiTypePattern m(window);
  for (auto& [code, pts] : grouped) m.add(code, PointPattern(window, std::move(pts)));
  return m;
}

std::vector<std::string> species_over_threshold(const MultiTypePattern& m, std::size_t min_count) {
  std::vector<std::string> out;
  for (const std::string& code : m.species_codes()) {
    if (m.at(code).size() > min_count) out.push_back(code);
  }
  return out;  // map order is already lexicographic
}

}  // namespace inhomstat
