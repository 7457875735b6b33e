#include "orb/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "orb/errors.hpp"
#include "orb/geometry.hpp"
#include "orb/rng.hpp"

namespace orb {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;

double pulsed_radius(const SceneSpec& spec, double hour) {
  return spec.cdo_radius_km *
         (1.0 + spec.diurnal_amplitude * std::sin(kTwoPi * (hour - spec.diurnal_phase_hr) / 24.0));
}

// Unit vector for an azimuth, snapped at cardinal directions so half-plane
// scenes split the grid exactly along a row or column.
void azimuth_unit(double azimuth_deg, double& east, double& north) {
  double a = azimuth_deg * kPi / 180.0;
  east = std::sin(a);
  north = std::cos(a);
  if (std::abs(east) < 1e-12) east = 0.0;
  if (std::abs(north) < 1e-12) north = 0.0;
  if (std::abs(east) > 1.0 - 1e-12) east = east > 0 ? 1.0 : -1.0;
  if (std::abs(north) > 1.0 - 1e-12) north = north > 0 ? 1.0 : -1.0;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError("SceneSpec: " + what);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

void validate_scene(const SceneSpec& spec) {
  require(spec.grid_step_deg > 0, "grid_step_deg must be positive");
  require(spec.half_width_px >= 4, "half_width_px must be >= 4");
  require(std::abs(spec.center_lat) < 85.0, "center_lat must satisfy |lat| < 85");
  require(spec.noise_sd_c >= 0, "noise_sd_c must be >= 0");
  require(spec.quantize_c >= 0, "quantize_c must be >= 0");
  require(spec.missing_frac >= 0 && spec.missing_frac < 1, "missing_frac must be in [0, 1)");
  require(spec.diurnal_amplitude >= 0 && spec.diurnal_amplitude < 1,
          "diurnal_amplitude must be in [0, 1)");
  require(spec.cdo_radius_km > 0, "cdo_radius_km must be positive");
  require(spec.eye_radius_km > 0, "eye_radius_km must be positive");
  require(spec.eye_radius_km < spec.cdo_radius_km, "eye_radius_km must be < cdo_radius_km");
  require(spec.blob_sigma_km > 0, "blob_sigma_km must be positive");
  require(spec.offset_km >= 0, "offset_km must be >= 0");
  for (double t : {spec.base_temp_c, spec.cdo_temp_c, spec.eye_temp_c, spec.eyewall_temp_c})
    require(t >= kTbMinC && t <= kTbMaxC, "temperature parameter outside valid range");
}

double scene_temperature(const SceneSpec& spec, double east_km, double north_km, double hour) {
  const double az = spec.offset_azimuth_deg * kPi / 180.0;
  const double oe = spec.offset_km * std::sin(az);
  const double on = spec.offset_km * std::cos(az);
  const double de = east_km - oe;
  const double dn = north_km - on;
  const double rr = std::sqrt(de * de + dn * dn);

  switch (spec.scene) {
    case SceneKind::Uniform:
      return spec.base_temp_c;
    case SceneKind::AxisymCdo: {
      const double radius = pulsed_radius(spec, hour);
      if (rr >= radius) return spec.base_temp_c;
      const double t = rr / radius;
      return spec.cdo_temp_c + (spec.base_temp_c - spec.cdo_temp_c) * t * t;
    }
    case SceneKind::EyeEyewall: {
      const double radius = pulsed_radius(spec, hour);
      if (rr <= spec.eye_radius_km) {
        const double t = rr / spec.eye_radius_km;
        return spec.eye_temp_c + (spec.eyewall_temp_c - spec.eye_temp_c) * t * t;
      }
      if (rr >= radius) return spec.base_temp_c;
      const double t = (rr - spec.eye_radius_km) / (radius - spec.eye_radius_km);
      return spec.eyewall_temp_c + (spec.base_temp_c - spec.eyewall_temp_c) * t * t;
    }
    case SceneKind::OffsetBlob:
      return spec.base_temp_c -
             spec.blob_depth_c * std::exp(-rr * rr / (2.0 * spec.blob_sigma_km * spec.blob_sigma_km));
    case SceneKind::HalfCold: {
      double ue, un;
      azimuth_unit(spec.cold_azimuth_deg, ue, un);
      return (east_km * ue + north_km * un) > 0 ? spec.cdo_temp_c : spec.base_temp_c;
    }
    case SceneKind::Ramp:
      return spec.base_temp_c + spec.ramp_gradient_c_per_km * east_km;
  }
  throw ValidationError("bad SceneKind");
}

std::pair<Stamp, SynthTruth> make_stamp(const SceneSpec& spec, const std::string& storm_id,
                                        UtcHour time) {
  validate_scene(spec);
  Stamp s;
  s.storm_id = storm_id;
  s.time = time;
  s.center_lat = spec.center_lat;
  s.center_lon = spec.center_lon;
  s.grid_step = spec.grid_step_deg;
  s.half_width = spec.half_width_px;
  const int n = s.size();
  s.tb = Grid<float>(n, n);
  s.mask = Grid<std::uint8_t>(n, n, 0);

  const double dy = kKmPerDegree * spec.grid_step_deg;
  const double dx = dy * std::cos(spec.center_lat * kPi / 180.0);
  const double hour = static_cast<double>(time.hours);
  Rng rng(spec.seed);

  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      bool miss = spec.missing_frac > 0 && rng.bernoulli(spec.missing_frac);
      double e = (c - spec.half_width_px) * dx;
      double no = (spec.half_width_px - r) * dy;
      double t = scene_temperature(spec, e, no, hour);
      if (spec.noise_sd_c > 0) t += rng.normal(0.0, spec.noise_sd_c);
      if (spec.quantize_c > 0) t = std::round(t / spec.quantize_c) * spec.quantize_c;
      t = std::clamp(t, static_cast<double>(kTbMinC), static_cast<double>(kTbMaxC));
      if (miss) {
        s.mask(r, c) = 1;
        s.tb(r, c) = std::numeric_limits<float>::quiet_NaN();
      } else {
        s.tb(r, c) = static_cast<float>(t);
      }
    }
  }

  SynthTruth truth;
  const double az = spec.offset_azimuth_deg * kPi / 180.0;
  truth.scene_center_col = spec.half_width_px + spec.offset_km * std::sin(az) / dx;
  truth.scene_center_row = spec.half_width_px - spec.offset_km * std::cos(az) / dy;
  const bool clean = spec.noise_sd_c == 0 && spec.quantize_c == 0 && spec.missing_frac == 0;
  switch (spec.scene) {
    case SceneKind::AxisymCdo:
      if (clean) truth.dav_deg2 = 0.0;
      break;
    case SceneKind::EyeEyewall:
      if (clean) truth.dav_deg2 = 0.0;
      truth.profile_max_r_km = 0.0;
      truth.profile_min_r_km = spec.eye_radius_km;
      break;
    case SceneKind::OffsetBlob:
      if (spec.offset_km > 0) truth.skew_azimuth_deg = spec.offset_azimuth_deg;
      break;
    case SceneKind::HalfCold: {
      truth.skew_azimuth_deg = spec.cold_azimuth_deg;
      truth.mid_threshold_c = 0.5 * (spec.cdo_temp_c + spec.base_temp_c);
      if (clean) {
        double ue, un;
        azimuth_unit(spec.cold_azimuth_deg, ue, un);
        std::int64_t count = 0;
        for (int r = 0; r < n; ++r)
          for (int c = 0; c < n; ++c) {
            double e = (c - spec.half_width_px) * dx;
            double no = (spec.half_width_px - r) * dy;
            if (e * ue + no * un > 0) ++count;
          }
        truth.size_km2_at_mid = static_cast<double>(count) * (dx * dy);
      }
      break;
    }
    default:
      break;
  }
  return {std::move(s), truth};
}

Stamp make_paraboloid_stamp(int half_width_px, double grid_step_deg) {
  Stamp s;
  s.storm_id = "PARAB";
  s.time = UtcHour{0};
  s.center_lat = 0.0;
  s.center_lon = -50.0;
  s.grid_step = grid_step_deg;
  s.half_width = half_width_px;
  const int n = s.size();
  s.tb = Grid<float>(n, n);
  s.mask = Grid<std::uint8_t>(n, n, 0);

  int shift = -9;
  while (2.0 * half_width_px * half_width_px * std::ldexp(1.0, shift) > 165.0) --shift;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const std::int64_t dr = r - half_width_px;
      const std::int64_t dc = c - half_width_px;
      s.tb(r, c) =
          static_cast<float>(-110.0 + std::ldexp(static_cast<double>(dr * dr + dc * dc), shift));
    }
  }
  return s;
}

Scenario parse_scenario(const std::string& name) {
  if (name == "null") return Scenario::Null;
  if (name == "sparse_signal") return Scenario::SparseSignal;
  if (name == "structure_driven") return Scenario::StructureDriven;
  throw ValidationError("unknown scenario '" + name + "'");
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::Null: return "null";
    case Scenario::SparseSignal: return "sparse_signal";
    case Scenario::StructureDriven: return "structure_driven";
  }
  throw ValidationError("bad Scenario");
}

namespace {

std::string synth_storm_id(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "SYN%03d", index);
  return buf;
}

UtcHour storm_start(int index, int n_storms) {
  const int n_train = (n_storms * 3 + 4) / 5;  // 60% of storms train
  int year = index < n_train ? 1999 + (index % 11) : 2010 + (index % 7);
  unsigned month = 6 + static_cast<unsigned>(index % 4);
  unsigned day = 1 + static_cast<unsigned>((index * 7) % 25);
  return UtcHour{hours_from_civil(year, month, day, 0)};
}

TrackPoint track_point(const std::string& storm, UtcHour t, int step, double intensity,
                       int storm_index) {
  TrackPoint p;
  p.storm_id = storm;
  p.time = t;
  p.lat = 14.0 + (storm_index % 6) + 0.12 * step;
  p.lon = -45.0 - (storm_index % 15) - 0.2 * step;
  p.intensity_kt = intensity;
  p.dist_to_land_km = 1000.0;
  p.basin = Basin::NAL;
  return p;
}

/// Latent episode state and intensity for one storm: quiet phases, one or two
/// +7 kt/6h intensification episodes, each followed by a -7 kt/6h decay.
struct StormScript {
  std::vector<double> intensity;
  std::vector<double> state;  // eye clarity in [0, 1]
};

StormScript make_script(int n_points, Rng& rng) {
  StormScript s;
  s.intensity.resize(n_points);
  s.state.assign(n_points, 0.0);
  s.intensity[0] = 55.0 + rng.uniform(0.0, 12.0);

  const int ep_len = 8, decay_len = 6;
  std::vector<int> starts;
  starts.push_back(4 + static_cast<int>(rng.below(4)));
  if (n_points >= 34 && rng.bernoulli(0.6))
    starts.push_back(20 + static_cast<int>(rng.below(4)));

  std::vector<double> drift(n_points, 0.0);
  for (int start : starts) {
    for (int k = 0; k < ep_len && start + k < n_points; ++k) {
      drift[start + k] = 7.0;
      s.state[start + k] = std::min(1.0, (k + 1) / 5.0);
    }
    for (int k = 0; k < decay_len && start + ep_len + k < n_points; ++k) {
      drift[start + ep_len + k] = -7.0;
      s.state[start + ep_len + k] = std::max(0.0, 1.0 - (k + 1) / 3.0);
    }
  }
  for (int i = 1; i < n_points; ++i) {
    double step = drift[i] != 0.0 ? drift[i] : rng.normal(0.0, 2.0);
    s.intensity[i] = std::clamp(s.intensity[i - 1] + step, 50.0, 145.0);
  }
  return s;
}

const double kShipsQuiet[10] = {18.0, 14.0, 10.0, 60.0, 27.5, 60.0, 55.0, 50.0, 120.0, -5.0};
const double kShipsSlope[10] = {-10.0, -8.0, -4.0, 30.0, 1.5, 8.0, 10.0, 8.0, 25.0, -6.0};
const double kShipsNoise[10] = {4.0, 4.0, 3.0, 20.0, 1.0, 6.0, 6.0, 6.0, 12.0, 5.0};

}  // namespace

SynthDataset make_dataset(int n_storms, Scenario scenario, std::uint64_t seed,
                          const SynthGeometry& geometry, int points_per_storm) {
  if (n_storms < 10) throw ValidationError("make_dataset: n_storms must be >= 10");
  if (points_per_storm < 10) throw ValidationError("make_dataset: points_per_storm must be >= 10");

  SynthDataset out;
  out.ships.columns = ships_base_columns();
  out.ships.columns.resize(10);  // the 10 environmental variables, no LAT/LON

  if (scenario == Scenario::SparseSignal) {
    const int d = 50;
    const int k_true = 5;
    out.observations.columns.resize(d);
    for (int j = 0; j < d; ++j) {
      char buf[8];
      std::snprintf(buf, sizeof(buf), "P%02d", j + 1);
      out.observations.columns[j] = buf;
    }
    for (int j = 0; j < k_true; ++j)
      out.true_beta[out.observations.columns[static_cast<std::size_t>(10 * j)]] =
          (j % 2 == 0) ? 2.0 : -2.0;
    const double intercept = -1.0;

    for (int i = 0; i < n_storms; ++i) {
      Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
      std::string storm = synth_storm_id(i);
      UtcHour start = storm_start(i, n_storms);
      for (int t = 0; t < points_per_storm; ++t) {
        LabeledObservation obs;
        obs.storm_id = storm;
        obs.time = start.plus_hours(6 * t);
        obs.basin = Basin::NAL;
        obs.split = Split::Train;  // the generative-oracle scenario trains on everything
        obs.values.resize(d);
        double eta = intercept;
        for (int j = 0; j < d; ++j) {
          obs.values[static_cast<std::size_t>(j)] = rng.normal();
          auto it = out.true_beta.find(out.observations.columns[static_cast<std::size_t>(j)]);
          if (it != out.true_beta.end()) eta += it->second * obs.values[static_cast<std::size_t>(j)];
        }
        obs.y_ri = rng.bernoulli(1.0 / (1.0 + std::exp(-eta))) ? 1 : 0;
        obs.y_rw = rng.bernoulli(1.0 / (1.0 + std::exp(eta))) ? 1 : 0;
        out.observations.rows.push_back(std::move(obs));
      }
    }
    return out;
  }

  for (int i = 0; i < n_storms; ++i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    const std::string storm = synth_storm_id(i);
    const UtcHour start = storm_start(i, n_storms);
    StormScript script = make_script(points_per_storm, rng);

    const double storm_cdo = -72.0 + rng.uniform(0.0, 18.0);
    const double storm_base = -16.0 + rng.uniform(0.0, 10.0);
    const double storm_radius = 240.0 + rng.uniform(0.0, 160.0);

    for (int t = 0; t < points_per_storm; ++t) {
      UtcHour when = start.plus_hours(6 * t);
      out.track.push_back(track_point(storm, when, t, script.intensity[t], i));

      SceneSpec spec;
      spec.grid_step_deg = geometry.grid_step_deg;
      spec.half_width_px = geometry.half_width_px;
      spec.center_lat = out.track.back().lat;
      spec.center_lon = out.track.back().lon;
      spec.seed = mix(seed, static_cast<std::uint64_t>(i * 100000 + t));
      spec.noise_sd_c = 2.0;

      std::vector<double> ships_row(10);
      if (scenario == Scenario::Null) {
        spec.scene = SceneKind::AxisymCdo;
        spec.cdo_temp_c = storm_cdo;
        spec.base_temp_c = storm_base;
        spec.cdo_radius_km = std::clamp(storm_radius + 25.0 * rng.normal(), 150.0, 480.0);
        for (int j = 0; j < 10; ++j) ships_row[j] = kShipsQuiet[j] + kShipsNoise[j] * rng.normal();
      } else {
        const double s = script.state[t];
        spec.scene = SceneKind::EyeEyewall;
        spec.base_temp_c = -10.0;
        spec.eye_temp_c = -55.0 + 55.0 * s;
        spec.eyewall_temp_c = -55.0 - 20.0 * s;
        spec.eye_radius_km = 45.0;
        spec.cdo_radius_km = 320.0 + 120.0 * s;
        for (int j = 0; j < 10; ++j)
          ships_row[j] = kShipsQuiet[j] + kShipsSlope[j] * s + kShipsNoise[j] * rng.normal();
      }
      out.stamps.push_back(make_stamp(spec, storm, when).first);
      out.ships.insert(ObservationKey{storm, when.hours}, std::move(ships_row));
    }
  }
  return out;
}

SynthDataset make_diurnal_storm(std::uint64_t seed, const SynthGeometry& geometry, int n_hours,
                                double amplitude) {
  if (n_hours < 72) throw ValidationError("make_diurnal_storm: need >= 72 hours");
  SynthDataset out;
  out.ships.columns = ships_base_columns();
  out.ships.columns.resize(10);
  const std::string storm = "DIURN";
  const UtcHour start{hours_from_civil(2005, 7, 1, 0)};

  for (int h = 0; h < n_hours; ++h) {
    UtcHour when = start.plus_hours(h);
    if (when.hours % 6 == 0) out.track.push_back(track_point(storm, when, h / 6, 80.0, 0));

    SceneSpec spec;
    spec.scene = SceneKind::AxisymCdo;
    spec.grid_step_deg = geometry.grid_step_deg;
    spec.half_width_px = geometry.half_width_px;
    spec.center_lat = 18.0;
    spec.center_lon = -55.0;
    spec.cdo_temp_c = -70.0;
    spec.base_temp_c = -8.0;
    spec.cdo_radius_km = 300.0;
    spec.diurnal_amplitude = amplitude;
    spec.diurnal_phase_hr = 0.0;
    spec.noise_sd_c = 1.0;
    spec.seed = mix(seed, static_cast<std::uint64_t>(h));
    out.stamps.push_back(make_stamp(spec, storm, when).first);
  }
  return out;
}

ComplementarySources make_complementary_sources(int n_storms, std::uint64_t seed,
                                                int points_per_storm, double signal_scale) {
  if (n_storms < 10) throw ValidationError("make_complementary_sources: n_storms must be >= 10");
  if (signal_scale < 0) throw ValidationError("make_complementary_sources: signal_scale must be >= 0");
  ComplementarySources out;
  out.orb.columns = orb_base_columns();
  out.ships.columns = ships_base_columns();
  out.ships.columns.resize(10);

  for (int i = 0; i < n_storms; ++i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    const std::string storm = synth_storm_id(i);
    const UtcHour start = storm_start(i, n_storms);
    StormScript script = make_script(points_per_storm, rng);

    for (int t = 0; t < points_per_storm; ++t) {
      UtcHour when = start.plus_hours(6 * t);
      out.track.push_back(track_point(storm, when, t, script.intensity[t], i));
      const double s = script.state[t];

      const double g = signal_scale;
      std::vector<double> orb_row(out.orb.columns.size());
      for (std::size_t j = 0; j < orb_row.size(); ++j) orb_row[j] = rng.normal();
      // Structure channels see the latent state with high signal-to-noise.
      orb_row[5] = 2.2 * g * s + 0.7 * rng.normal();   // RAD3
      orb_row[6] = -1.8 * g * s + 0.8 * rng.normal();  // SIZE1
      orb_row[12] = -1.2 * g * s + 0.9 * rng.normal(); // SHAPE2
      out.orb.insert(ObservationKey{storm, when.hours}, std::move(orb_row));

      std::vector<double> ships_row(10);
      for (int j = 0; j < 10; ++j) ships_row[j] = rng.normal();
      ships_row[0] = -1.0 * g * s + 1.1 * rng.normal();  // SHRD
      ships_row[6] = 0.9 * g * s + 1.2 * rng.normal();   // RHMD
      ships_row[4] = 0.7 * g * s + 1.2 * rng.normal();   // RSST
      out.ships.insert(ObservationKey{storm, when.hours}, std::move(ships_row));
    }
  }
  return out;
}

std::string stamp_filename(const Stamp& stamp) {
  std::string iso = format_utc_hour(stamp.time);
  // YYYY-MM-DDTHH:00:00Z -> YYYYMMDDHH
  std::string compact = iso.substr(0, 4) + iso.substr(5, 2) + iso.substr(8, 2) + iso.substr(11, 2);
  return stamp.storm_id + "_" + compact + ".stamp";
}

void write_dataset_inputs(const SynthDataset& data, const std::filesystem::path& stamps_dir,
                          const std::filesystem::path& track_csv,
                          const std::filesystem::path& ships_csv) {
  std::filesystem::create_directories(stamps_dir);
  for (const auto& stamp : data.stamps) write_stamp(stamp, stamps_dir / stamp_filename(stamp));
  write_track_csv(data.track, track_csv);
  write_ships_csv(data.ships, ships_csv);
}

}  // namespace orb
