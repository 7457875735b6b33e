#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "orb/errors.hpp"
#include "orb/geometry.hpp"
#include "orb/rng.hpp"
#include "orb/sample_filter.hpp"
#include "orb/stamp.hpp"
#include "orb/track.hpp"

using namespace orb;

namespace {

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "orb_test_stamp";
  std::filesystem::create_directories(dir);
  return dir;
}

Stamp small_stamp(int half_width, float value) {
  Stamp s;
  s.storm_id = "TST01";
  s.time = parse_utc_hour("2014-09-16T18:00:00Z");
  s.center_lat = 20.0;
  s.center_lon = -50.0;
  s.grid_step = 0.04;
  s.half_width = half_width;
  const int n = s.size();
  s.tb = Grid<float>(n, n, value);
  s.mask = Grid<std::uint8_t>(n, n, 0);
  return s;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("minimal 3x3 stamp round trip") {
  auto path = temp_dir() / "min.stamp";
  Stamp s = small_stamp(1, -50.0f);
  write_stamp(s, path);
  Stamp r = read_stamp(path);
  CHECK(r.half_width == 1);
  CHECK(r.storm_id == "TST01");
  CHECK(r.missing_fraction() == 0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(r.tb(i, j) == -50.0f);
}

TEST_CASE("write(read(p)) is byte-identical for canonical files") {
  auto dir = temp_dir();
  Rng rng(42);
  Stamp s = small_stamp(7, 0.0f);
  for (auto& v : s.tb.data()) v = static_cast<float>(rng.uniform(-90.0, 30.0));
  for (int k = 0; k < 20; ++k) {
    int r = static_cast<int>(rng.below(15)), c = static_cast<int>(rng.below(15));
    s.mask(r, c) = 1;
    s.tb(r, c) = std::numeric_limits<float>::quiet_NaN();
  }
  auto p1 = dir / "a.stamp";
  auto p2 = dir / "b.stamp";
  write_stamp(s, p1);
  write_stamp(read_stamp(p1), p2);
  CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("masked fraction is counted directly") {
  Stamp s = small_stamp(4, -40.0f);  // 9x9 = 81 px
  for (int i = 0; i < 9; ++i) s.mask(0, i) = 1;  // 9 masked
  CHECK(s.missing_fraction() == doctest::Approx(9.0 / 81.0));
}

TEST_CASE("out-of-range temperature is a parse error naming tb") {
  auto path = temp_dir() / "bad.stamp";
  Stamp s = small_stamp(1, -50.0f);
  s.tb(0, 0) = 200.0f;
  CHECK_THROWS_AS(write_stamp(s, path), ParseError);
  Stamp ok = small_stamp(1, -50.0f);
  write_stamp(ok, path);
  // Corrupt the payload on disk: patch one float to 200 C.
  std::string bytes = slurp(path);
  std::size_t offset = bytes.find('\n') + 1;
  float bad = 200.0f;
  bytes.replace(offset, sizeof(float), reinterpret_cast<const char*>(&bad), sizeof(float));
  std::ofstream(path, std::ios::binary) << bytes;
  try {
    read_stamp(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.field() == "tb");
  }
}

TEST_CASE("malformed header and truncated payload raise distinct parse errors") {
  auto path = temp_dir() / "broken.stamp";
  std::ofstream(path, std::ios::binary) << "{not json\n";
  try {
    read_stamp(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.field() == "header");
  }
  Stamp s = small_stamp(2, -30.0f);
  write_stamp(s, path);
  std::string bytes = slurp(path);
  bytes.resize(bytes.size() - 30);
  std::ofstream(path, std::ios::binary) << bytes;
  CHECK_THROWS_AS(read_stamp(path), ParseError);
}

TEST_CASE("track interpolation is linear and exact at knots") {
  TrackPoint a;
  a.storm_id = "AL01";
  a.time = parse_utc_hour("2005-08-01T00:00:00Z");
  a.lat = 20.0;
  a.lon = -50.0;
  a.intensity_kt = 50.0;
  a.dist_to_land_km = 500.0;
  TrackPoint b = a;
  b.time = a.time.plus_hours(6);
  b.lat = 21.0;
  b.intensity_kt = 56.0;
  auto hourly = interpolate_track({a, b});
  REQUIRE(hourly.size() == 7);
  CHECK(hourly.front().intensity_kt == 50.0);
  CHECK(hourly.back().intensity_kt == 56.0);
  CHECK(hourly[5].intensity_kt == doctest::Approx(55.0));  // t = 5 h
  CHECK(hourly[3].lat == doctest::Approx(20.5));           // midpoint
  CHECK(hourly.front().lat == 20.0);
  CHECK(hourly.back().lat == 21.0);
}

TEST_CASE("track interpolation rejects bad inputs") {
  TrackPoint a;
  a.storm_id = "AL01";
  a.time = parse_utc_hour("2005-08-01T00:00:00Z");
  CHECK_THROWS_AS(interpolate_track({a}), ValidationError);
  TrackPoint dup = a;
  CHECK_THROWS_AS(interpolate_track({a, dup}), ValidationError);
  TrackPoint wrapped = a;
  wrapped.time = a.time.plus_hours(6);
  wrapped.lon = a.lon + 200.0;
  CHECK_THROWS_AS(interpolate_track({a, wrapped}), ValidationError);
}

TEST_CASE("track CSV round trip") {
  auto path = temp_dir() / "track.csv";
  TrackPoint a;
  a.storm_id = "AL01";
  a.time = parse_utc_hour("2005-08-01T06:00:00Z");
  a.lat = 20.25;
  a.lon = -50.5;
  a.intensity_kt = 65.0;
  a.dist_to_land_km = 432.1;
  a.basin = Basin::ENP;
  write_track_csv({a}, path);
  auto back = read_track_csv(path);
  REQUIRE(back.size() == 1);
  CHECK(back[0].storm_id == "AL01");
  CHECK(back[0].time == a.time);
  CHECK(back[0].lat == a.lat);
  CHECK(back[0].basin == Basin::ENP);
}

namespace {

std::vector<TrackPoint> filter_track(int n_points, double intensity, double dist) {
  std::vector<TrackPoint> track;
  UtcHour t0 = parse_utc_hour("2005-08-01T00:00:00Z");
  for (int i = 0; i < n_points; ++i) {
    TrackPoint p;
    p.storm_id = "AL01";
    p.time = t0.plus_hours(6 * i);
    p.lat = 20.0;
    p.lon = -50.0;
    p.intensity_kt = intensity;
    p.dist_to_land_km = dist;
    track.push_back(p);
  }
  return track;
}

std::vector<Stamp> stamps_for(const std::vector<TrackPoint>& track, double missing_frac) {
  std::vector<Stamp> stamps;
  Rng rng(7);
  for (const auto& p : track) {
    Stamp s = small_stamp(4, -60.0f);
    s.storm_id = p.storm_id;
    s.time = p.time;
    int total = s.size() * s.size();
    int n_mask = static_cast<int>(missing_frac * total);
    for (int k = 0; k < n_mask; ++k) {
      s.mask(k / s.size(), k % s.size()) = 1;
      s.tb(k / s.size(), k % s.size()) = std::numeric_limits<float>::quiet_NaN();
    }
    stamps.push_back(std::move(s));
  }
  return stamps;
}

}  // namespace

TEST_CASE("apply_filter gates: land distance, intensity, missing fraction, history") {
  SampleFilter f;
  auto track = filter_track(12, 60.0, 1000.0);
  auto stamps = stamps_for(track, 0.02);

  auto kept = apply_filter(track, stamps, f);
  // Points 0..3 lack 24-h history; the rest pass.
  REQUIRE(kept.size() == 8);
  CHECK(kept.front().track_index == 4);

  SUBCASE("a point 200 km from land is excluded") {
    track[6].dist_to_land_km = 200.0;
    auto kept2 = apply_filter(track, stamps, f);
    // Point 6 fails directly; points 2..5 see it inside their forward window
    // (2,3 already lacked history).
    for (const auto& m : kept2) {
      CHECK(m.track_index != 6);
      CHECK((m.track_index < 2 || m.track_index > 6));
    }
    CHECK(kept2.size() == 5);
  }
  SUBCASE("50 kt over-water point with 2% missing is retained") {
    CHECK(std::any_of(kept.begin(), kept.end(),
                      [](const FilterMatch& m) { return m.track_index == 5; }));
  }
  SUBCASE("low intensity excluded") {
    track[5].intensity_kt = 45.0;
    auto kept2 = apply_filter(track, stamps, f);
    for (const auto& m : kept2) CHECK(m.track_index != 5);
  }
  SUBCASE("missing fraction at 10% excluded") {
    stamps[7] = stamps_for({track[7]}, 0.10)[0];
    auto kept2 = apply_filter(track, stamps, f);
    for (const auto& m : kept2) CHECK(m.track_index != 7);
  }
}

TEST_CASE("apply_filter is monotone under tightening") {
  auto track = filter_track(16, 55.0, 400.0);
  track[9].dist_to_land_km = 300.0;
  track[12].intensity_kt = 52.0;
  auto stamps = stamps_for(track, 0.03);
  SampleFilter loose;
  loose.min_intensity_kt = 50;
  loose.min_land_dist_km = 250;
  loose.max_missing_frac = 0.05;
  auto base = apply_filter(track, stamps, loose);
  for (double intensity : {51.0, 53.0, 56.0}) {
    SampleFilter tight = loose;
    tight.min_intensity_kt = intensity;
    auto kept = apply_filter(track, stamps, tight);
    CHECK(kept.size() <= base.size());
    for (const auto& m : kept)
      CHECK(std::any_of(base.begin(), base.end(),
                        [&](const FilterMatch& b) { return b.track_index == m.track_index; }));
  }
}

TEST_CASE("pixel_geometry distances and symmetry") {
  Stamp s = small_stamp(5, -50.0f);
  s.center_lat = 0.0;
  PixelGeometry g = pixel_geometry(s);
  CHECK(g.dist_km(5, 5) == 0.0);
  CHECK(g.dist_km(5, 6) == doctest::Approx(4.4528).epsilon(1e-12));
  // Reflection symmetry about the center row/column.
  for (int r = 0; r < s.size(); ++r)
    for (int c = 0; c < s.size(); ++c) {
      CHECK(g.dist_km(r, c) == g.dist_km(10 - r, c));
      CHECK(g.dist_km(r, c) == g.dist_km(r, 10 - c));
    }

  s.center_lat = 60.0;
  PixelGeometry g60 = pixel_geometry(s);
  CHECK(g60.dx_km == doctest::Approx(0.5 * g60.dy_km).epsilon(1e-12));

  s.center_lat = 86.0;
  CHECK_THROWS_AS(pixel_geometry(s), ValidationError);
}
