#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "orb/errors.hpp"
#include "orb/features.hpp"
#include "orb/rng.hpp"
#include "orb/synth.hpp"
#include "oracles.hpp"

using namespace orb;

namespace {

StormCenter grid_center(const Stamp& s) {
  return {static_cast<double>(s.half_width), static_cast<double>(s.half_width),
          StormCenter::Source::BestTrack};
}

Stamp scene_stamp(SceneSpec spec) { return make_stamp(spec, "FEAT", UtcHour{0}).first; }

}  // namespace

TEST_CASE("deviation angles vanish on a paraboloid") {
  Stamp s = make_paraboloid_stamp(40);
  Grid<double> psi = deviation_angles(s, grid_center(s));
  int defined = 0;
  // Interior pixels only: one-sided edge differences of a quadratic carry an
  // O(h) bias, which is why the DAV domain stays clear of the stamp edge.
  for (int r = 1; r + 1 < s.size(); ++r)
    for (int c = 1; c + 1 < s.size(); ++c) {
      if (std::isnan(psi(r, c))) continue;
      ++defined;
      CHECK(std::abs(psi(r, c)) < 1e-10);
    }
  CHECK(defined > 5000);
}

TEST_CASE("uniform field leaves every deviation angle undefined") {
  SceneSpec spec;
  spec.scene = SceneKind::Uniform;
  spec.half_width_px = 20;
  Stamp s = scene_stamp(spec);
  Grid<double> psi = deviation_angles(s, grid_center(s));
  for (const auto& v : psi.data()) CHECK(std::isnan(v));
}

TEST_CASE("east-west ramp gives psi = 90 due north of center") {
  SceneSpec spec;
  spec.scene = SceneKind::Ramp;
  spec.half_width_px = 20;
  spec.ramp_gradient_c_per_km = 0.05;
  spec.base_temp_c = -40.0;
  Stamp s = scene_stamp(spec);
  Grid<double> psi = deviation_angles(s, grid_center(s));
  int n = s.half_width;
  CHECK(psi(n - 5, n) == doctest::Approx(90.0).epsilon(1e-9));  // due north
  CHECK(std::abs(psi(n, n + 5)) < 1e-9);                        // due east: gradient radial
}

TEST_CASE("deviation angles match the oracle pixel-by-pixel on a noisy scene") {
  SceneSpec spec;
  spec.scene = SceneKind::OffsetBlob;
  spec.offset_km = 80.0;
  spec.offset_azimuth_deg = 120.0;
  spec.noise_sd_c = 3.0;
  spec.missing_frac = 0.03;
  spec.half_width_px = 25;
  spec.seed = 99;
  Stamp s = scene_stamp(spec);
  StormCenter center = grid_center(s);
  Grid<double> psi = deviation_angles(s, center);
  auto frame = oracle::frame_of(s, center.row, center.col);
  for (int r = 0; r < s.size(); ++r)
    for (int c = 0; c < s.size(); ++c) {
      auto expected = oracle::psi_at(s, frame, r, c, 1e-6);
      if (!expected)
        CHECK(std::isnan(psi(r, c)));
      else
        CHECK(psi(r, c) == *expected);
    }
}

TEST_CASE("DAV: paraboloid gives zero variance at every radius") {
  Stamp s = make_paraboloid_stamp(95);  // reaches past 400 km
  OrbFunction f = dav(s, grid_center(s));
  CHECK(f.thresholds.front() == 50.0);
  CHECK(f.thresholds.back() <= 400.0);
  for (double v : f.values) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("DAV of isotropic noise approaches the uniform-angle variance 2700") {
  SceneSpec spec;
  spec.scene = SceneKind::Uniform;
  spec.base_temp_c = -40.0;
  spec.noise_sd_c = 10.0;
  spec.half_width_px = 95;
  spec.center_lat = 0.0;  // isotropic pixels so noise gradients are isotropic
  spec.seed = 5;
  Stamp s = scene_stamp(spec);
  OrbFunction f = dav(s, grid_center(s));
  // Monte Carlo variance of uniform(-90, 90]: 180^2 / 12 = 2700 deg^2.
  CHECK(f.values.back() == doctest::Approx(2700.0).epsilon(0.03));
}

TEST_CASE("DAV matches brute-force recomputation at a spot radius") {
  SceneSpec spec;
  spec.scene = SceneKind::EyeEyewall;
  spec.eye_temp_c = -10.0;
  spec.noise_sd_c = 2.0;
  spec.half_width_px = 95;
  spec.seed = 17;
  Stamp s = scene_stamp(spec);
  StormCenter center = grid_center(s);
  OrbFunction f = dav(s, center);
  auto frame = oracle::frame_of(s, center.row, center.col);
  // r = 200 km sits mid-grid; exact equality with row-major recomputation.
  for (std::size_t k = 0; k < f.thresholds.size(); k += 17)
    CHECK(f.values[k] == oracle::dav_at(s, frame, f.thresholds[k]));
}

TEST_CASE("DAV rejects stamps with no defined angles near the core") {
  SceneSpec spec;
  spec.scene = SceneKind::Uniform;
  spec.half_width_px = 95;
  Stamp s = scene_stamp(spec);
  CHECK_THROWS_AS(dav(s, grid_center(s)), DataError);
}

TEST_CASE("find_center detects an offset warm eye") {
  SceneSpec spec;
  spec.scene = SceneKind::EyeEyewall;
  spec.eye_temp_c = 0.0;
  spec.eyewall_temp_c = -70.0;
  spec.eye_radius_km = 40.0;
  spec.offset_km = 30.0;
  spec.offset_azimuth_deg = 90.0;  // due east
  spec.half_width_px = 60;
  Stamp s = scene_stamp(spec);
  StormCenter c = find_center(s);
  CHECK(c.source == StormCenter::Source::EyeDetected);
  double dx = 111.32 * s.grid_step * std::cos(s.center_lat * oracle::kPi / 180.0);
  double expected_col = s.half_width + 30.0 / dx;
  CHECK(c.col == doctest::Approx(expected_col).epsilon(0.05));
  CHECK(c.row == doctest::Approx(static_cast<double>(s.half_width)).epsilon(0.05));
}

TEST_CASE("find_center: uniform cold stamp falls back to best track") {
  SceneSpec spec;
  spec.scene = SceneKind::Uniform;
  spec.base_temp_c = -60.0;
  spec.half_width_px = 40;
  Stamp s = scene_stamp(spec);
  StormCenter c = find_center(s);
  CHECK(c.source == StormCenter::Source::BestTrack);
  CHECK(c.row == s.half_width);
  CHECK(c.col == s.half_width);
}

TEST_CASE("find_center: centered warm eye is detected at the grid center") {
  SceneSpec spec;
  spec.scene = SceneKind::EyeEyewall;
  spec.eye_temp_c = 0.0;
  spec.eyewall_temp_c = -70.0;
  spec.eye_radius_km = 40.0;
  spec.half_width_px = 40;
  Stamp s = scene_stamp(spec);
  StormCenter c = find_center(s);
  CHECK(c.source == StormCenter::Source::EyeDetected);
  CHECK(c.row == s.half_width);
  CHECK(c.col == s.half_width);
}

TEST_CASE("radial profile of a constant stamp is constant") {
  SceneSpec spec;
  spec.scene = SceneKind::Uniform;
  spec.base_temp_c = -60.0;
  spec.half_width_px = 150;
  Stamp s = scene_stamp(spec);
  OrbFunction f = radial_profile(s, grid_center(s));
  for (double v : f.values) CHECK(v == doctest::Approx(-60.0).epsilon(1e-12));
}

TEST_CASE("radial profile of a cone tracks -(r + dr/2) within a pixel") {
  // tb = max(-90, -|s| * 0.12): linear ramp down to 750 km.
  SceneSpec spec;
  spec.scene = SceneKind::Uniform;
  spec.half_width_px = 150;
  Stamp s = scene_stamp(spec);
  auto frame = oracle::frame_of(s, s.half_width, s.half_width);
  for (int r = 0; r < s.size(); ++r)
    for (int c = 0; c < s.size(); ++c)
      s.tb(r, c) = static_cast<float>(std::max(-90.0, -0.12 * oracle::dist_of(frame, r, c)));
  OrbFunction f = radial_profile(s, grid_center(s));
  double dr = 111.32 * s.grid_step;
  for (std::size_t k = 1; k + 1 < f.thresholds.size(); k += 13) {
    double expected = -0.12 * (f.thresholds[k] + dr / 2.0);
    CHECK(std::abs(f.values[k] - expected) <= 0.12 * dr);
  }
}

TEST_CASE("eye-centered profile is warmer at r=0 than the best-track profile") {
  SceneSpec spec;
  spec.scene = SceneKind::EyeEyewall;
  spec.eye_temp_c = 0.0;
  spec.eyewall_temp_c = -70.0;
  spec.eye_radius_km = 40.0;
  spec.offset_km = 35.0;
  spec.offset_azimuth_deg = 45.0;
  spec.half_width_px = 150;
  Stamp s = scene_stamp(spec);
  StormCenter eye = find_center(s);
  REQUIRE(eye.source == StormCenter::Source::EyeDetected);
  OrbFunction at_eye = radial_profile(s, eye);
  OrbFunction at_bt = radial_profile(s, grid_center(s));
  CHECK(at_eye.values.front() > at_bt.values.front());
}

TEST_CASE("radial profile matches the annulus oracle exactly") {
  SceneSpec spec;
  spec.scene = SceneKind::AxisymCdo;
  spec.noise_sd_c = 2.5;
  spec.missing_frac = 0.02;
  spec.half_width_px = 150;
  spec.seed = 23;
  Stamp s = scene_stamp(spec);
  StormCenter center = grid_center(s);
  OrbFunction f = radial_profile(s, center);
  auto frame = oracle::frame_of(s, center.row, center.col);
  double dr = 111.32 * s.grid_step;
  for (std::size_t k = 0; k < f.thresholds.size(); k += 29) {
    auto expected = oracle::rad_annulus(s, frame, static_cast<int>(k), dr);
    REQUIRE(expected.has_value());
    CHECK(f.values[k] == *expected);
  }
}

TEST_CASE("level_set membership by construction") {
  SceneSpec spec;
  spec.scene = SceneKind::HalfCold;
  spec.cdo_temp_c = -30.0;
  spec.base_temp_c = 0.0;
  spec.cold_azimuth_deg = 270.0;  // west half cold
  spec.half_width_px = 20;
  Stamp s = scene_stamp(spec);
  auto everything = level_set(s, 10.0);
  CHECK(everything.size() == static_cast<std::size_t>(s.size()) * s.size());
  auto nothing = level_set(s, -40.0);
  CHECK(nothing.empty());
  auto west = level_set(s, -20.0);
  CHECK(west.size() == static_cast<std::size_t>(s.size()) * s.half_width);
  for (auto [r, c] : west) CHECK(c < s.half_width);
}

TEST_CASE("half-cold stamp: SIZE is half the stamp and SKEW points into the cold half") {
  SceneSpec spec;
  spec.scene = SceneKind::HalfCold;
  spec.cdo_temp_c = -40.0;
  spec.base_temp_c = 0.0;
  spec.cold_azimuth_deg = 270.0;
  spec.half_width_px = 40;
  auto [s, truth] = make_stamp(spec, "HALF", UtcHour{0});
  LevelSetFunctions fs = level_set_functions(s, grid_center(s));
  // Threshold -20 C sits between the two levels.
  std::size_t idx = 0;
  for (; idx < fs.size.thresholds.size(); ++idx)
    if (fs.size.thresholds[idx] == -20.0) break;
  REQUIRE(idx < fs.size.thresholds.size());
  CHECK(fs.size.values[idx] == doctest::Approx(*truth.size_km2_at_mid).epsilon(1e-12));
  CHECK(fs.skew.skew_direction_deg[idx] == doctest::Approx(270.0).epsilon(1e-6));
}

TEST_CASE("centered cold disk: SKEW and ECC vanish within discretization") {
  SceneSpec spec;
  spec.scene = SceneKind::AxisymCdo;
  spec.cdo_temp_c = -65.0;
  spec.base_temp_c = -5.0;
  spec.cdo_radius_km = 250.0;
  spec.half_width_px = 80;
  spec.center_lat = 0.0;  // square pixels make the raster exactly symmetric
  Stamp s = scene_stamp(spec);
  LevelSetFunctions fs = level_set_functions(s, grid_center(s));
  for (std::size_t i = 0; i < fs.skew.thresholds.size(); ++i) {
    if (!fs.skew.defined[i]) continue;
    CHECK(fs.skew.values[i] <= 0.02);
    CHECK(fs.ecc.values[i] <= 0.02);
  }
}

TEST_CASE("SIZE is monotone non-decreasing and level stats match the oracle") {
  SceneSpec spec;
  spec.scene = SceneKind::OffsetBlob;
  spec.offset_km = 100.0;
  spec.offset_azimuth_deg = 300.0;
  spec.noise_sd_c = 2.0;
  spec.missing_frac = 0.02;
  spec.half_width_px = 60;
  spec.seed = 31;
  Stamp s = scene_stamp(spec);
  StormCenter center = grid_center(s);
  LevelSetFunctions fs = level_set_functions(s, center);
  for (std::size_t i = 1; i < fs.size.values.size(); ++i)
    CHECK(fs.size.values[i] >= fs.size.values[i - 1]);

  auto frame = oracle::frame_of(s, center.row, center.col);
  for (std::size_t i = 0; i < fs.size.thresholds.size(); i += 11) {
    auto expected = oracle::level_stats_at(s, frame, fs.size.thresholds[i]);
    CHECK(fs.size.values[i] == expected.size_km2);
    if (expected.count >= 10) {
      CHECK(fs.skew.defined[i] == 1);
      CHECK(fs.skew.values[i] == *expected.skew);
      CHECK(fs.shape.values[i] == *expected.shape);
      CHECK(fs.ecc.values[i] == *expected.ecc);
    } else {
      CHECK(fs.skew.defined[i] == 0);
    }
  }
}

TEST_CASE("SKEW direction points toward an offset cold blob") {
  SceneSpec spec;
  spec.scene = SceneKind::OffsetBlob;
  spec.offset_km = 120.0;
  spec.offset_azimuth_deg = 45.0;
  spec.blob_depth_c = 60.0;
  spec.half_width_px = 60;
  Stamp s = scene_stamp(spec);
  LevelSetFunctions fs = level_set_functions(s, grid_center(s));
  // Pick a threshold with a well-formed set.
  for (std::size_t i = 0; i < fs.skew.thresholds.size(); ++i) {
    if (!fs.skew.defined[i] || fs.skew.values[i] < 0.3) continue;
    CHECK(fs.skew.skew_direction_deg[i] == doctest::Approx(45.0).epsilon(0.08));
    return;
  }
  FAIL("no threshold had a displaced level set");
}

TEST_CASE("undefined level-set entries are interpolated and flagged") {
  SceneSpec spec;
  spec.scene = SceneKind::AxisymCdo;
  spec.cdo_temp_c = -60.0;
  spec.base_temp_c = -10.0;
  spec.half_width_px = 40;
  Stamp s = scene_stamp(spec);
  LevelSetFunctions fs = level_set_functions(s, grid_center(s));
  bool any_undefined = false;
  for (std::size_t i = 0; i < fs.skew.values.size(); ++i) {
    CHECK(std::isfinite(fs.skew.values[i]));
    any_undefined |= (fs.skew.defined[i] == 0);
  }
  CHECK(any_undefined);  // thresholds below the scene minimum exist
}

TEST_CASE("adding a constant shifts RAD exactly and leaves the rest unchanged") {
  SceneSpec spec;
  spec.scene = SceneKind::EyeEyewall;
  spec.eye_temp_c = -12.0;
  spec.base_temp_c = -15.0;
  spec.noise_sd_c = 3.0;
  spec.quantize_c = 0.125;  // keeps tb + delta exactly representable
  spec.half_width_px = 95;
  spec.seed = 57;
  Stamp s = scene_stamp(spec);
  const float delta = 7.0f;
  Stamp shifted = s;
  for (auto& v : shifted.tb.data()) v += delta;

  StormCenter center = grid_center(s);
  OrbFunction dav0 = dav(s, center), dav1 = dav(shifted, center);
  for (std::size_t i = 0; i < dav0.values.size(); ++i)
    CHECK(dav1.values[i] == doctest::Approx(dav0.values[i]).epsilon(1e-12));

  OrbFunction rad0 = radial_profile(s, center), rad1 = radial_profile(shifted, center);
  for (std::size_t i = 0; i < rad0.values.size(); ++i)
    CHECK(std::abs(rad1.values[i] - rad0.values[i] - delta) < 1e-10);

  LevelSetFunctions f0 = level_set_functions(s, center);
  LevelSetFunctions f1 = level_set_functions(shifted, center);
  // SIZE_shifted(c) = SIZE(c - delta); same for the morphology curves.
  for (std::size_t i = 0; i + 7 < f0.size.thresholds.size(); ++i) {
    CHECK(f1.size.values[i + 7] == f0.size.values[i]);
    if (f0.skew.defined[i] && f1.skew.defined[i + 7]) {
      CHECK(std::abs(f1.skew.values[i + 7] - f0.skew.values[i]) < 1e-10);
      CHECK(std::abs(f1.shape.values[i + 7] - f0.shape.values[i]) < 1e-10);
      CHECK(std::abs(f1.ecc.values[i + 7] - f0.ecc.values[i]) < 1e-10);
    }
  }
}

TEST_CASE("ORB CSV round trip") {
  SceneSpec spec;
  spec.scene = SceneKind::AxisymCdo;
  spec.half_width_px = 40;
  spec.noise_sd_c = 1.0;
  spec.seed = 3;
  Stamp s = scene_stamp(spec);
  auto dir = std::filesystem::temp_directory_path() / "orb_test_features";
  std::filesystem::create_directories(dir);
  LevelSetFunctions fs = level_set_functions(s, grid_center(s));
  write_orb_csv(fs.skew, dir / "skew.csv");
  OrbFunction back = read_orb_csv(dir / "skew.csv", OrbStatistic::SKEW);
  CHECK(back.thresholds == fs.skew.thresholds);
  CHECK(back.values == fs.skew.values);
  CHECK(back.defined == fs.skew.defined);
  for (std::size_t i = 0; i < back.skew_direction_deg.size(); ++i) {
    if (std::isnan(fs.skew.skew_direction_deg[i]))
      CHECK(std::isnan(back.skew_direction_deg[i]));
    else
      CHECK(back.skew_direction_deg[i] == fs.skew.skew_direction_deg[i]);
  }
}
