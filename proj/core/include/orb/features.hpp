#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "orb/geometry.hpp"
#include "orb/grid.hpp"
#include "orb/stamp.hpp"

namespace orb {

enum class OrbStatistic { DAV, RAD, SIZE, SKEW, SHAPE, ECC };

inline constexpr OrbStatistic kAllStatistics[] = {OrbStatistic::DAV,  OrbStatistic::RAD,
                                                  OrbStatistic::SIZE, OrbStatistic::SKEW,
                                                  OrbStatistic::SHAPE, OrbStatistic::ECC};

std::string statistic_name(OrbStatistic s);
OrbStatistic parse_statistic(const std::string& name);

enum class ThresholdAxis { RadiusKm, TemperatureC };

/// A densely sampled threshold-indexed curve for one stamp and one statistic.
///
/// Thresholds are strictly increasing. Entries the statistic could not define
/// (too few pixels, empty annulus) are filled by linear interpolation across
/// thresholds and carry defined == 0.
struct OrbFunction {
  OrbStatistic statistic{};
  ThresholdAxis axis{};
  std::vector<double> thresholds;
  std::vector<double> values;
  std::vector<std::uint8_t> defined;
  std::vector<double> skew_direction_deg;  // SKEW only: azimuth of the centroid
                                           // offset, clockwise from north; NaN
                                           // where undefined
};

struct StormCenter {
  double row = 0.0;
  double col = 0.0;
  enum class Source { BestTrack, EyeDetected } source = Source::BestTrack;
};

/// Knobs for the feature kernels. Defaults follow the working configuration:
/// DAV over 50-400 km, radial profile to 600 km, level sets every 1 C over
/// [-90, +30] C, eye search within +-0.5 deg of the grid center.
struct FeatureConfig {
  double dav_r_min_km = 50.0;
  double dav_r_max_km = 400.0;
  int dav_min_count = 10;

  double rad_r_max_km = 600.0;
  double max_empty_annulus_frac = 0.25;

  double level_c_min = -90.0;
  double level_c_max = 30.0;
  double level_c_step = 1.0;
  int level_min_pixels = 10;

  double eye_search_half_deg = 0.5;
  double eye_radius_km = 25.0;
  double eye_delta_c = 5.0;
  double eye_min_temp_c = -25.0;

  double grad_floor_c_per_km = 1e-6;
};

/// Deviation angle psi(s) in degrees, folded into (-90, +90] so that
/// gradients pointing directly toward or away from the center both map to 0.
/// Gradients use central differences (one-sided at edges) in C/km; a pixel is
/// undefined (NaN) where any stencil pixel is masked, where the gradient
/// magnitude falls below grad_floor_c_per_km, or at the center itself.
Grid<double> deviation_angles(const Stamp& stamp, const StormCenter& center,
                              const FeatureConfig& cfg = {});

/// DAV(r): population variance (E[x^2] - E[x]^2) of defined deviation angles
/// over pixels within distance r of the center, sampled at the native pixel
/// scale over [dav_r_min_km, dav_r_max_km].
OrbFunction dav(const Stamp& stamp, const StormCenter& center, const FeatureConfig& cfg = {});

/// Automated image centering: candidate pixels within +-eye_search_half_deg
/// of the grid center, scored by mean tb within eye_radius_km. The warmest
/// candidate wins as an eye when its inner-core mean clears eye_min_temp_c
/// and either sits at the grid center or beats the best-track candidate by
/// eye_delta_c; otherwise the best-track grid center is returned.
StormCenter find_center(const Stamp& stamp, const FeatureConfig& cfg = {});

/// Radial profile T(r): mean of non-masked tb over the annulus
/// [r, r + dr), dr = native pixel scale, r = 0 .. rad_r_max_km. Empty annuli
/// are interpolated from neighbors and flagged; more than
/// max_empty_annulus_frac empty annuli is an error.
OrbFunction radial_profile(const Stamp& stamp, const StormCenter& center,
                           const FeatureConfig& cfg = {});

/// L(c) = {non-masked s : tb(s) <= c}, as row-major (row, col) pairs.
std::vector<std::pair<int, int>> level_set(const Stamp& stamp, double c);

struct LevelSetFunctions {
  OrbFunction size;   // km^2 covered by L(c)
  OrbFunction skew;   // |centroid offset| / mean pixel distance, in [0, 1]
  OrbFunction shape;  // mean boundary-pixel distance / mean pixel distance
  OrbFunction ecc;    // 1 - lambda2/lambda1 of the coordinate covariance
};

/// All four level-set morphology curves in one sweep over the temperature
/// grid. Boundary pixels are members of L(c) with at least one four-neighbor
/// outside L(c); off-grid and masked neighbors count as outside. SKEW, SHAPE
/// and ECC are undefined below level_min_pixels member pixels.
LevelSetFunctions level_set_functions(const Stamp& stamp, const StormCenter& center,
                                      const FeatureConfig& cfg = {});

OrbFunction size_fn(const Stamp& stamp, const StormCenter& center, const FeatureConfig& cfg = {});
OrbFunction skew_fn(const Stamp& stamp, const StormCenter& center, const FeatureConfig& cfg = {});
OrbFunction shape_fn(const Stamp& stamp, const StormCenter& center, const FeatureConfig& cfg = {});
OrbFunction ecc_fn(const Stamp& stamp, const StormCenter& center, const FeatureConfig& cfg = {});

struct StampFeatures {
  StormCenter center;
  OrbFunction dav;
  OrbFunction rad;
  OrbFunction size;
  OrbFunction skew;
  OrbFunction shape;
  OrbFunction ecc;

  const OrbFunction& get(OrbStatistic s) const;
};

/// find_center + all six ORB functions for one stamp.
StampFeatures extract_features(const Stamp& stamp, const FeatureConfig& cfg = {});

/// Feature CSV: threshold,value,defined[,direction].
void write_orb_csv(const OrbFunction& f, const std::filesystem::path& path);
OrbFunction read_orb_csv(const std::filesystem::path& path, OrbStatistic statistic);

}  // namespace orb
