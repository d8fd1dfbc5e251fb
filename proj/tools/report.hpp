#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "inhomstat/intensity.hpp"
#include "inhomstat/mctest.hpp"
#include "inhomstat/sumstats.hpp"

namespace inhomstat::cli {

/// Writes `content` to a sibling temporary file, then renames it over `path`.
/// Throws Data when the file cannot be written.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Context printed next to a test result.
struct ResultContext {
  std::string subject;  // species code or "A/B"
  std::uint64_t seed = 0;
  std::size_t nsim = 0;
  std::optional<double> bandwidth;
};

/// JSON document with sorted keys and shortest round-trip number formatting.
std::string result_json(const TestResult& result, const ResultContext& context);

std::string envelope_csv(const Envelope& e);
std::string summary_csv(const SummaryFunction& f);
std::string surface_csv(const IntensitySurface& s);
std::string screen_csv(std::span<const ScreenRow> rows);

std::string heatmap_svg(const IntensitySurface& s, const std::string& title);
std::string envelope_svg(const Envelope& e, const std::string& title);
/// Two panels: [0, 1] in 0.05 bins and [0, 0.1] in 0.005 bins. Missing p-values are skipped.
std::string pvalue_histogram_svg(std::span<const ScreenRow> rows, const std::string& title);

/// Bin counts used by pvalue_histogram_svg; the last bin is closed on the right.
std::vector<std::size_t> histogram_counts(std::span<const double> values, double lo, double hi, std::size_t bins);

}  // namespace inhomstat::cli
