#pragma once

#include "orb/grid.hpp"
#include "orb/stamp.hpp"

namespace orb {

/// Km per degree of latitude (and of longitude at the equator).
inline constexpr double kKmPerDegree = 111.32;

/// Per-pixel distances/azimuths from a reference pixel, on the stamp's
/// equirectangular approximation: dx = 111.32 * grid_step * cos(center_lat)
/// km per column step, dy = 111.32 * grid_step km per row step.
struct PixelGeometry {
  Grid<double> dist_km;      // sqrt(east^2 + north^2)
  Grid<double> azimuth_rad;  // clockwise from north in [0, 2*pi); NaN at the center pixel
  double dx_km = 0.0;
  double dy_km = 0.0;
  double pixel_area_km2 = 0.0;
};

/// Geometry about the grid center (N, N). Rejects |center_lat| >= 85 deg,
/// where the equirectangular approximation breaks down.
PixelGeometry pixel_geometry(const Stamp& stamp);

/// Geometry about an arbitrary (possibly fractional) pixel of the stamp.
PixelGeometry pixel_geometry_at(const Stamp& stamp, double center_row, double center_col);

/// East/north displacement in km of pixel (row, col) from a reference pixel.
inline double east_km(double col, double center_col, double dx) { return (col - center_col) * dx; }
inline double north_km(double row, double center_row, double dy) { return (center_row - row) * dy; }

/// Azimuth in degrees clockwise from north, in [0, 360).
double azimuth_deg(double east, double north);

}  // namespace orb
