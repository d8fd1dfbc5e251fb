#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "inhomstat/geometry.hpp"
#include "inhomstat/intensity.hpp"
#include "inhomstat/pattern.hpp"
#include "inhomstat/rng.hpp"

namespace inhomstat {

/// Inhomogeneous Poisson process by thinning a dominating homogeneous process
/// at the grid maximum. Retention uses the unfloored bilinear surface.
PointPattern sample_inhom_poisson(const IntensitySurface& lambda, RngSeed seed);

/// Same construction for an analytic intensity bounded above by `lambda_max`.
PointPattern sample_inhom_poisson(const RectWindow& w, const std::function<double(Point)>& lambda, double lambda_max,
                                  RngSeed seed);

PointPattern sample_homogeneous_poisson(const RectWindow& w, double rate, RngSeed seed);

struct ThomasParams {
  double parent_intensity;  ///< parents per m^2
  double mean_offspring;
  double sigma;             ///< offspring displacement sd in metres
};

/// Thomas cluster process. Parents are drawn on the window dilated by 4 sigma,
/// children outside the window are discarded.
PointPattern sample_thomas(const ThomasParams& params, const RectWindow& w, RngSeed seed);

struct SpeciesPair {
  std::string first;
  std::string second;
  friend bool operator==(const SpeciesPair&, const SpeciesPair&) = default;
};

struct Pairing {
  std::vector<SpeciesPair> pairs;
  std::optional<std::string> unpaired;
};

/// Uniform random perfect matching; with an odd count one species stays unpaired.
/// Throws Usage "nothing to pair" for fewer than 2 species.
Pairing random_pairing(std::span<const std::string> species, RngSeed seed);

}  // namespace inhomstat
