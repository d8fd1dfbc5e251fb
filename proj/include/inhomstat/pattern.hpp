#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "inhomstat/geometry.hpp"

namespace inhomstat {

/// Points observed in a window. Every point lies inside the window.
class PointPattern {
 public:
  explicit PointPattern(RectWindow window) : window_(window) {}
  /// Throws Data "point outside window" / "non-finite coordinate".
  PointPattern(RectWindow window, std::vector<Point> points);

  const RectWindow& window() const noexcept { return window_; }
  std::span<const Point> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }

 private:
  RectWindow window_;
  std::vector<Point> points_;
};

enum class Status { Alive, Dead };
enum class StatusFilter { Alive, Any };

struct CensusRecord {
  std::string tree_id;
  std::string species;
  double x = 0.0;
  double y = 0.0;
  Status status = Status::Alive;
  int census_id = 1;

  friend bool operator==(const CensusRecord&, const CensusRecord&) = default;
};

/// Maps raw status codes from the census file onto alive/dead.
/// The default table knows only "A" and "D".
struct StatusMap {
  std::map<std::string, Status> codes{{"A", Status::Alive}, {"D", Status::Dead}};
};

struct Census {
  std::vector<CensusRecord> records;
  /// Records sharing (census, species, x, y) with an earlier record (multi-stem trees).
  std::size_t duplicate_coordinates = 0;
};

/// Parses the census CSV (`tree_id,species,x,y,status,census_id`). Columns may appear
/// in any order. Row numbers in error messages count data rows from 1.
Census ingest_census(std::istream& in, const RectWindow& window, const StatusMap& statuses = {});
Census read_census_file(const std::string& path, const RectWindow& window, const StatusMap& statuses = {});

/// Writes records with the canonical header; status is written as A or D.
void write_census(std::ostream& out, std::span<const CensusRecord> records);

PointPattern extract_species(std::span<const CensusRecord> records, const std::string& species, int census_id,
                             StatusFilter filter, const RectWindow& window);

/// Several species observed in one window.
class MultiTypePattern {
 public:
  explicit MultiTypePattern(RectWindow window) : window_(window) {}

  const RectWindow& window() const noexcept { return window_; }
  /// Throws Data on a window mismatch or a duplicate species code.
  void add(const std::string& species, PointPattern pattern);
  bool contains(const std::string& species) const { return species_.count(species) != 0; }
  /// Throws Data "unknown species <code>".
  const PointPattern& at(const std::string& species) const;
  std::vector<std::string> species_codes() const;
  std::size_t species_count() const noexcept { return species_.size(); }

 private:
  RectWindow window_;
  std::map<std::string, PointPattern> species_;
};

MultiTypePattern build_multitype(std::span<const CensusRecord> records, int census_id, StatusFilter filter,
                                 const RectWindow& window);

/// Species with strictly more than `min_count` points, in lexicographic order.
std::vector<std::string> species_over_threshold(const MultiTypePattern& m, std::size_t min_count);

}  // namespace inhomstat
