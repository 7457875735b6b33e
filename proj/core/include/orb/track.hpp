#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "orb/time.hpp"

namespace orb {

enum class Basin { NAL, ENP };

std::string basin_name(Basin b);
Basin parse_basin(const std::string& name);

/// One best-track record.
struct TrackPoint {
  std::string storm_id;
  UtcHour time;
  double lat = 0.0;
  double lon = 0.0;
  double intensity_kt = 0.0;
  double dist_to_land_km = 0.0;
  Basin basin = Basin::NAL;
};

/// Track CSV: header storm_id,time,lat,lon,intensity_kt,dist_to_land_km,basin
/// with ISO-8601 times.
std::vector<TrackPoint> read_track_csv(const std::filesystem::path& path);
void write_track_csv(const std::vector<TrackPoint>& points, const std::filesystem::path& path);

/// Linear interpolation of one storm's track to hourly resolution. Original
/// points are reproduced exactly. Requires >= 2 points with strictly
/// increasing times; rejects tracks that appear to wrap across the antimeridian.
std::vector<TrackPoint> interpolate_track(const std::vector<TrackPoint>& points);

/// Groups points by storm id, preserving time order within each storm.
std::map<std::string, std::vector<TrackPoint>> group_by_storm(const std::vector<TrackPoint>& points);

}  // namespace orb
