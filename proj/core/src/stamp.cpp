#include "orb/stamp.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "orb/errors.hpp"

namespace orb {

namespace {

constexpr const char* kFormatName = "orb-stamp";
constexpr int kFormatVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "stamp I/O assumes a little-endian host");

std::string render_header(const Stamp& s, std::size_t data_offset) {
  nlohmann::ordered_json j;
  j["format"] = kFormatName;
  j["version"] = kFormatVersion;
  j["storm_id"] = s.storm_id;
  j["time"] = format_utc_hour(s.time);
  j["center_lat"] = s.center_lat;
  j["center_lon"] = s.center_lon;
  j["grid_step"] = s.grid_step;
  j["half_width"] = s.half_width;
  j["data_offset"] = data_offset;
  return j.dump() + "\n";
}

double require_number(const nlohmann::json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_number())
    throw ParseError(field, "missing or non-numeric header field");
  return j[field].get<double>();
}

}  // namespace

double Stamp::missing_fraction() const {
  if (mask.size() == 0) return 0.0;
  std::size_t n = 0;
  for (auto m : mask.data()) n += (m != 0);
  return static_cast<double>(n) / static_cast<double>(mask.size());
}

void validate_stamp(const Stamp& s) {
  if (s.half_width < 1) throw ParseError("half_width", "must be >= 1");
  const int n = s.size();
  if (s.tb.rows() != n || s.tb.cols() != n)
    throw ParseError("tb", "shape mismatch: expected " + std::to_string(n) + "x" + std::to_string(n));
  if (s.mask.rows() != s.tb.rows() || s.mask.cols() != s.tb.cols())
    throw ParseError("mask", "shape mismatch with tb");
  if (s.grid_step <= 0) throw ParseError("grid_step", "must be positive");
  if (!(s.center_lat >= -90.0 && s.center_lat <= 90.0))
    throw ParseError("center_lat", "outside [-90, 90]");
  if (!(s.center_lon >= -360.0 && s.center_lon <= 360.0))
    throw ParseError("center_lon", "outside [-360, 360]");
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (s.mask(r, c)) continue;
      float v = s.tb(r, c);
      if (!std::isfinite(v)) throw ParseError("tb", "non-finite value at unmasked pixel");
      if (v < kTbMinC || v > kTbMaxC)
        throw ParseError("tb", "temperature " + std::to_string(v) + " C outside [" +
                                   std::to_string(kTbMinC) + ", " + std::to_string(kTbMaxC) + "]");
    }
  }
}

Stamp read_stamp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open stamp file: " + path.string());
  std::string header_line;
  if (!std::getline(in, header_line))
    throw ParseError("header", "missing header line in " + path.string());

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(header_line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("header", std::string("invalid JSON header: ") + e.what());
  }
  if (!j.contains("format") || j["format"] != kFormatName)
    throw ParseError("format", "not an " + std::string(kFormatName) + " file");
  if (!j.contains("version") || j["version"] != kFormatVersion)
    throw ParseError("version", "unsupported format version");

  Stamp s;
  if (!j.contains("storm_id") || !j["storm_id"].is_string())
    throw ParseError("storm_id", "missing or non-string");
  s.storm_id = j["storm_id"].get<std::string>();
  if (!j.contains("time") || !j["time"].is_string()) throw ParseError("time", "missing or non-string");
  s.time = parse_utc_hour(j["time"].get<std::string>());
  s.center_lat = require_number(j, "center_lat");
  s.center_lon = require_number(j, "center_lon");
  s.grid_step = require_number(j, "grid_step");
  double hw = require_number(j, "half_width");
  if (hw != std::floor(hw) || hw < 1 || hw > 5000)
    throw ParseError("half_width", "must be a small positive integer");
  s.half_width = static_cast<int>(hw);
  auto offset = static_cast<std::size_t>(require_number(j, "data_offset"));
  if (offset != header_line.size() + 1)
    throw ParseError("data_offset", "does not match header length");

  const int n = s.size();
  const std::size_t npix = static_cast<std::size_t>(n) * n;
  s.tb = Grid<float>(n, n);
  s.mask = Grid<std::uint8_t>(n, n);
  in.read(reinterpret_cast<char*>(s.tb.data().data()),
          static_cast<std::streamsize>(npix * sizeof(float)));
  if (static_cast<std::size_t>(in.gcount()) != npix * sizeof(float))
    throw ParseError("tb", "truncated pixel payload");
  in.read(reinterpret_cast<char*>(s.mask.data().data()), static_cast<std::streamsize>(npix));
  if (static_cast<std::size_t>(in.gcount()) != npix)
    throw ParseError("mask", "truncated mask payload");
  char extra;
  if (in.read(&extra, 1)) throw ParseError("mask", "trailing bytes after mask payload");

  for (auto& m : s.mask.data())
    if (m > 1) throw ParseError("mask", "mask bytes must be 0 or 1");
  // Canonicalize the sentinel so the mask stays the single source of truth.
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (s.mask(r, c)) s.tb(r, c) = std::numeric_limits<float>::quiet_NaN();

  validate_stamp(s);
  return s;
}

void write_stamp(const Stamp& stamp, const std::filesystem::path& path) {
  validate_stamp(stamp);
  // The header carries its own byte length, so iterate until stable.
  std::size_t offset = render_header(stamp, 0).size();
  std::string header = render_header(stamp, offset);
  while (header.size() != offset) {
    offset = header.size();
    header = render_header(stamp, offset);
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write stamp file: " + path.string());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));

  const int n = stamp.size();
  Grid<float> tb = stamp.tb;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (stamp.mask(r, c)) tb(r, c) = std::numeric_limits<float>::quiet_NaN();
  out.write(reinterpret_cast<const char*>(tb.data().data()),
            static_cast<std::streamsize>(tb.size() * sizeof(float)));
  out.write(reinterpret_cast<const char*>(stamp.mask.data().data()),
            static_cast<std::streamsize>(stamp.mask.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace orb
