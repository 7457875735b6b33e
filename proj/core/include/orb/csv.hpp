#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace orb {

/// Minimal CSV table: header row plus string cells. Values never contain
/// commas or quotes in any format this project emits, so no quoting layer.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const CsvTable& table, const std::filesystem::path& path);

/// Shortest decimal form that round-trips the exact double (via to_chars).
std::string format_double(double v);

/// Strict double parse; throws ParseError naming `field` on failure.
double parse_double(const std::string& s, const std::string& field);

}  // namespace orb
