#include "orb/track.hpp"

#include <algorithm>
#include <cmath>

#include "orb/csv.hpp"
#include "orb/errors.hpp"

namespace orb {

std::string basin_name(Basin b) { return b == Basin::NAL ? "NAL" : "ENP"; }

Basin parse_basin(const std::string& name) {
  if (name == "NAL") return Basin::NAL;
  if (name == "ENP") return Basin::ENP;
  throw ParseError("basin", "unknown basin '" + name + "' (expected NAL or ENP)");
}

std::vector<TrackPoint> read_track_csv(const std::filesystem::path& path) {
  CsvTable t = read_csv(path);
  const std::vector<std::string> expected = {"storm_id",     "time",
                                             "lat",          "lon",
                                             "intensity_kt", "dist_to_land_km",
                                             "basin"};
  if (t.header != expected) throw ParseError("header", "track CSV header mismatch in " + path.string());
  std::vector<TrackPoint> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    TrackPoint p;
    p.storm_id = row[0];
    p.time = parse_utc_hour(row[1]);
    p.lat = parse_double(row[2], "lat");
    p.lon = parse_double(row[3], "lon");
    p.intensity_kt = parse_double(row[4], "intensity_kt");
    p.dist_to_land_km = parse_double(row[5], "dist_to_land_km");
    p.basin = parse_basin(row[6]);
    if (p.intensity_kt < 0) throw ParseError("intensity_kt", "negative intensity");
    out.push_back(std::move(p));
  }
  return out;
}

void write_track_csv(const std::vector<TrackPoint>& points, const std::filesystem::path& path) {
  CsvTable t;
  t.header = {"storm_id", "time", "lat", "lon", "intensity_kt", "dist_to_land_km", "basin"};
  for (const auto& p : points)
    t.rows.push_back({p.storm_id, format_utc_hour(p.time), format_double(p.lat),
                      format_double(p.lon), format_double(p.intensity_kt),
                      format_double(p.dist_to_land_km), basin_name(p.basin)});
  write_csv(t, path);
}

std::vector<TrackPoint> interpolate_track(const std::vector<TrackPoint>& points) {
  if (points.size() < 2) throw ValidationError("interpolate_track: need at least 2 track points");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].storm_id != points[0].storm_id)
      throw ValidationError("interpolate_track: mixed storm ids");
    if (points[i].time == points[i - 1].time)
      throw ValidationError("interpolate_track: duplicate timestamp " +
                            format_utc_hour(points[i].time));
    if (points[i].time < points[i - 1].time)
      throw ValidationError("interpolate_track: times not strictly increasing");
    if (std::abs(points[i].lon - points[i - 1].lon) > 180.0)
      throw ValidationError(
          "interpolate_track: longitude step > 180 deg suggests an antimeridian wrap, "
          "which is not supported");
  }

  std::vector<TrackPoint> out;
  out.reserve(static_cast<std::size_t>(points.back().time - points.front().time) + 1);
  std::size_t seg = 0;
  for (std::int64_t h = points.front().time.hours; h <= points.back().time.hours; ++h) {
    UtcHour t{h};
    while (points[seg + 1].time < t) ++seg;
    const TrackPoint& a = points[seg];
    const TrackPoint& b = points[seg + 1];
    if (t == a.time) {
      out.push_back(a);
      continue;
    }
    if (t == b.time) {
      out.push_back(b);
      continue;
    }
    double w = static_cast<double>(t - a.time) / static_cast<double>(b.time - a.time);
    TrackPoint p = a;
    p.time = t;
    p.lat = a.lat + w * (b.lat - a.lat);
    p.lon = a.lon + w * (b.lon - a.lon);
    p.intensity_kt = a.intensity_kt + w * (b.intensity_kt - a.intensity_kt);
    p.dist_to_land_km = a.dist_to_land_km + w * (b.dist_to_land_km - a.dist_to_land_km);
    out.push_back(std::move(p));
  }
  return out;
}

std::map<std::string, std::vector<TrackPoint>> group_by_storm(const std::vector<TrackPoint>& points) {
  std::map<std::string, std::vector<TrackPoint>> out;
  for (const auto& p : points) out[p.storm_id].push_back(p);
  for (auto& [id, track] : out)
    std::stable_sort(track.begin(), track.end(),
                     [](const TrackPoint& a, const TrackPoint& b) { return a.time < b.time; });
  return out;
}

}  // namespace orb
