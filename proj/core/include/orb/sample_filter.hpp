#pragma once

#include <cstddef>
#include <vector>

#include "orb/stamp.hpp"
#include "orb/track.hpp"

namespace orb {

/// Sample-selection gates for the 6-hourly modeling set.
struct SampleFilter {
  double min_intensity_kt = 50.0;
  double min_land_dist_km = 250.0;
  double max_missing_frac = 0.05;
  double rapid_threshold_kt = 25.0;
};

/// Throws ValidationError if any field is non-positive or max_missing_frac >= 1.
void validate_filter(const SampleFilter& f);

/// A retained observation: indices into the track and stamp inputs.
struct FilterMatch {
  std::size_t track_index;
  std::size_t stamp_index;
};

/// Retains 6-hourly (synoptic-hour) track points of one storm that
///  - have intensity >= min_intensity_kt,
///  - are >= min_land_dist_km from land at the point and at every track point
///    in the forward 24-h window,
///  - have a matching stamp with missing fraction < max_missing_frac,
///  - have 24 h of prior history on the track (a point exactly 24 h earlier).
/// An empty result is valid.
std::vector<FilterMatch> apply_filter(const std::vector<TrackPoint>& track,
                                      const std::vector<Stamp>& stamps, const SampleFilter& f);

}  // namespace orb
