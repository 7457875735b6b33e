#include "orb/geometry.hpp"

#include <cmath>
#include <limits>

#include "orb/errors.hpp"

namespace orb {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double azimuth_deg(double east, double north) {
  double a = std::atan2(east, north) * 180.0 / kPi;
  if (a < 0) a += 360.0;
  return a;
}

PixelGeometry pixel_geometry_at(const Stamp& stamp, double center_row, double center_col) {
  if (std::abs(stamp.center_lat) >= 85.0)
    throw ValidationError("pixel_geometry: |center_lat| >= 85 deg is not supported");
  const int n = stamp.size();
  if (center_row < 0 || center_row > n - 1 || center_col < 0 || center_col > n - 1)
    throw ValidationError("pixel_geometry: center outside grid");

  PixelGeometry g;
  g.dy_km = kKmPerDegree * stamp.grid_step;
  g.dx_km = kKmPerDegree * stamp.grid_step * std::cos(stamp.center_lat * kPi / 180.0);
  g.pixel_area_km2 = g.dx_km * g.dy_km;
  g.dist_km = Grid<double>(n, n);
  g.azimuth_rad = Grid<double>(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      double e = east_km(c, center_col, g.dx_km);
      double no = north_km(r, center_row, g.dy_km);
      g.dist_km(r, c) = std::sqrt(e * e + no * no);
      if (e == 0.0 && no == 0.0) {
        g.azimuth_rad(r, c) = std::numeric_limits<double>::quiet_NaN();
      } else {
        double a = std::atan2(e, no);
        if (a < 0) a += 2.0 * kPi;
        g.azimuth_rad(r, c) = a;
      }
    }
  }
  return g;
}

PixelGeometry pixel_geometry(const Stamp& stamp) {
  return pixel_geometry_at(stamp, stamp.half_width, stamp.half_width);
}

}  // namespace orb
