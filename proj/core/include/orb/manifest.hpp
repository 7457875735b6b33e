#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace orb {

/// FNV-1a 64-bit over a byte buffer.
std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Content hash of a file, as 16 lowercase hex digits.
std::string hash_file(const std::filesystem::path& path);

std::string hash_hex(std::uint64_t h);

/// Reproducibility record written by every pipeline stage: config hash, seed,
/// input hashes, output names, tool version. Deliberately holds no wall-clock
/// time so reruns are byte-identical.
struct Manifest {
  std::string stage;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> inputs;  // name -> content hash
  std::vector<std::string> outputs;
};

void write_manifest(const Manifest& m, const std::filesystem::path& path);

}  // namespace orb
