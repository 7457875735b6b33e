#include "orb/sample_filter.hpp"

#include <map>

#include "orb/errors.hpp"

namespace orb {

void validate_filter(const SampleFilter& f) {
  if (f.min_intensity_kt <= 0) throw ValidationError("SampleFilter.min_intensity_kt must be > 0");
  if (f.min_land_dist_km <= 0) throw ValidationError("SampleFilter.min_land_dist_km must be > 0");
  if (f.max_missing_frac <= 0 || f.max_missing_frac >= 1)
    throw ValidationError("SampleFilter.max_missing_frac must be in (0, 1)");
  if (f.rapid_threshold_kt <= 0) throw ValidationError("SampleFilter.rapid_threshold_kt must be > 0");
}

std::vector<FilterMatch> apply_filter(const std::vector<TrackPoint>& track,
                                      const std::vector<Stamp>& stamps, const SampleFilter& f) {
  validate_filter(f);
  std::map<std::int64_t, std::size_t> stamp_at;
  for (std::size_t i = 0; i < stamps.size(); ++i) stamp_at[stamps[i].time.hours] = i;
  std::map<std::int64_t, std::size_t> point_at;
  for (std::size_t i = 0; i < track.size(); ++i) point_at[track[i].time.hours] = i;

  std::vector<FilterMatch> out;
  for (std::size_t i = 0; i < track.size(); ++i) {
    const TrackPoint& p = track[i];
    if (p.time.hours % 6 != 0) continue;
    if (p.intensity_kt < f.min_intensity_kt) continue;
    if (!point_at.count(p.time.hours - 24)) continue;  // 24-h history

    bool over_water = true;
    for (const TrackPoint& q : track) {
      if (q.time < p.time || q.time.hours > p.time.hours + 24) continue;
      if (q.dist_to_land_km < f.min_land_dist_km) {
        over_water = false;
        break;
      }
    }
    if (!over_water) continue;

    auto it = stamp_at.find(p.time.hours);
    if (it == stamp_at.end()) continue;
    if (!(stamps[it->second].missing_fraction() < f.max_missing_frac)) continue;
    out.push_back({i, it->second});
  }
  return out;
}

}  // namespace orb
