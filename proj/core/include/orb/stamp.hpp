#pragma once

#include <filesystem>
#include <string>

#include "orb/grid.hpp"
#include "orb/time.hpp"

namespace orb {

/// One TC-centered raster of infrared brightness temperatures.
///
/// The grid is (2N+1) x (2N+1), row-major, north-up, with the storm's
/// best-track position at pixel (N, N). Masked (missing) pixels hold a quiet
/// NaN in `tb`; `mask` is the source of truth and every kernel consults it.
struct Stamp {
  std::string storm_id;
  UtcHour time;
  double center_lat = 0.0;  // degrees
  double center_lon = 0.0;  // degrees
  double grid_step = 0.04;  // degrees per pixel
  int half_width = 0;       // N
  Grid<float> tb;           // deg C
  Grid<std::uint8_t> mask;  // 1 = missing

  int size() const { return 2 * half_width + 1; }
  double missing_fraction() const;
};

/// Valid brightness-temperature bounds in deg C for non-masked pixels.
inline constexpr float kTbMinC = -110.0f;
inline constexpr float kTbMaxC = 60.0f;

/// Throws ParseError naming the violated field if any invariant fails.
void validate_stamp(const Stamp& stamp);

/// Reads the stamp binary format: one newline-terminated JSON header line,
/// then row-major little-endian float32 tb, then one mask byte per pixel.
Stamp read_stamp(const std::filesystem::path& path);

/// Writes the canonical stamp file; write(read(p)) is byte-identical for
/// files produced by this writer.
void write_stamp(const Stamp& stamp, const std::filesystem::path& path);

}  // namespace orb
