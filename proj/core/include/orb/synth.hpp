#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orb/dataset.hpp"
#include "orb/stamp.hpp"
#include "orb/track.hpp"

namespace orb {

enum class SceneKind { Uniform, AxisymCdo, EyeEyewall, OffsetBlob, HalfCold, Ramp };

/// Geometric brightness-temperature scene with known analytic structure.
/// Scenes are radial piecewise quadratics (plus a Gaussian blob, a half-plane
/// and a linear ramp), so level-set areas, centroids and radial profiles have
/// closed forms before rasterization.
struct SceneSpec {
  SceneKind scene = SceneKind::Uniform;

  double base_temp_c = -10.0;   // far-field temperature
  double cdo_temp_c = -65.0;    // cold-core vertex temperature
  double cdo_radius_km = 350.0; // radius at which the core recovers to base

  double eye_radius_km = 25.0;
  double eye_temp_c = 0.0;
  double eyewall_temp_c = -75.0;

  double offset_km = 0.0;  // displacement of the scene center from the grid center
  double offset_azimuth_deg = 0.0;

  double blob_sigma_km = 120.0;
  double blob_depth_c = 50.0;

  double cold_azimuth_deg = 270.0;  // half_cold: direction of the cold half

  double ramp_gradient_c_per_km = 0.05;

  double noise_sd_c = 0.0;
  double quantize_c = 0.0;  // > 0: round temperatures to this step after noise

  double diurnal_amplitude = 0.0;  // fractional modulation of cdo_radius_km
  double diurnal_phase_hr = 0.0;

  std::uint64_t seed = 0;

  // Raster geometry
  double grid_step_deg = 0.04;
  int half_width_px = 180;
  double center_lat = 20.0;
  double center_lon = -50.0;
  double missing_frac = 0.0;
};

void validate_scene(const SceneSpec& spec);

/// Continuous scene temperature (deg C, before noise/quantization) at an
/// east/north offset in km from the grid center, at a given absolute hour.
double scene_temperature(const SceneSpec& spec, double east_km, double north_km, double hour = 0.0);

/// Analytic facts about a generated stamp, computed from the continuous scene.
struct SynthTruth {
  std::optional<double> dav_deg2;           // 0 for noise-free axisymmetric scenes
  std::optional<double> skew_azimuth_deg;   // direction the cold-set centroid points
  std::optional<double> size_km2_at_mid;    // half_cold: exact raster area at mid_threshold
  std::optional<double> mid_threshold_c;
  std::optional<double> profile_max_r_km;   // eye scenes: warm peak radius (0)
  std::optional<double> profile_min_r_km;   // eye scenes: coldest ring radius
  double scene_center_row = 0.0;            // continuous truth, fractional pixels
  double scene_center_col = 0.0;
};

/// Deterministic rasterization of a scene; the truth record is derived from
/// the continuous scene before rasterization. Scene math uses IEEE sqrt/exp,
/// so cross-platform agreement is within ~1e-6 C; reruns are bit-identical.
std::pair<Stamp, SynthTruth> make_stamp(const SceneSpec& spec, const std::string& storm_id,
                                        UtcHour time);

/// Quadratic bowl tb = -110 + (dr^2 + dc^2) * 2^-9 at center_lat = 0, where
/// every pixel value is an exact float; its central-difference gradients are
/// exactly radial, giving deviation angles that vanish to rounding.
Stamp make_paraboloid_stamp(int half_width_px, double grid_step_deg = 0.04);

enum class Scenario { Null, SparseSignal, StructureDriven };

Scenario parse_scenario(const std::string& name);
std::string scenario_name(Scenario s);

struct SynthGeometry {
  double grid_step_deg = 0.04;
  int half_width_px = 180;
};

/// Full pipeline inputs with known ground truth.
///  - null: scenes and environment independent of intensity; any downstream
///    classifier should sit near AUC 0.5.
///  - sparse_signal: labeled observations drawn from a logistic model with a
///    known 5-sparse beta (emitted directly at the assembled-predictor level).
///  - structure_driven: RI episodes coincide with injected eye formation, so
///    ORB features carry real signal and environment variables a weaker one.
struct SynthDataset {
  std::vector<TrackPoint> track;
  std::vector<Stamp> stamps;
  SourceTable ships;
  Dataset observations;                    // sparse_signal only
  std::map<std::string, double> true_beta; // sparse_signal only
};

SynthDataset make_dataset(int n_storms, Scenario scenario, std::uint64_t seed,
                          const SynthGeometry& geometry = {}, int points_per_storm = 36);

/// One storm observed hourly whose CDO radius pulses with a 24-h period;
/// drives the phase-space trajectory checks.
SynthDataset make_diurnal_storm(std::uint64_t seed, const SynthGeometry& geometry = {},
                                int n_hours = 240, double amplitude = 0.35);

/// Tabular sources where a latent episode state drives intensity (hence the
/// RI labels), drives ORB-named coefficients strongly, and drives a few
/// environment columns weakly. Exercises assemble/fit/test end to end with
/// complementary structure + environment signal. signal_scale = 0 removes
/// every predictor-label dependence (a no-signal construction).
struct ComplementarySources {
  std::vector<TrackPoint> track;
  SourceTable orb;
  SourceTable ships;
};
ComplementarySources make_complementary_sources(int n_storms, std::uint64_t seed,
                                                int points_per_storm = 48,
                                                double signal_scale = 1.0);

/// Canonical on-disk layout for generated inputs: one stamp file per
/// (storm, time) plus the track and SHIPS CSVs.
std::string stamp_filename(const Stamp& stamp);
void write_dataset_inputs(const SynthDataset& data, const std::filesystem::path& stamps_dir,
                          const std::filesystem::path& track_csv,
                          const std::filesystem::path& ships_csv);

}  // namespace orb
