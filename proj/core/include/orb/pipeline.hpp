#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "orb/dataset.hpp"
#include "orb/features.hpp"
#include "orb/sample_filter.hpp"
#include "orb/synth.hpp"

namespace orb {

/// One JSON config drives every pipeline stage.
struct RunConfig {
  std::filesystem::path stamps_dir;
  std::filesystem::path track_csv;
  std::filesystem::path ships_csv;
  std::filesystem::path output_dir;

  SampleFilter filter;
  FeatureConfig features;
  double var_target = 0.90;
  std::map<std::string, int> k_override;  // per-statistic EOF count override

  PredictorSetId predictor_set = PredictorSetId::ShipsPlusOrb;
  std::string target = "RI";
  Basin basin = Basin::NAL;
  int train_last_year = 2009;
  int cv_folds = 10;

  std::uint64_t seed = 0;
  int jobs = 1;
  double roughness_target = 0.2;

  bool paired_permutation = false;
  bool one_se_rule = false;
  bool p_value_smoothing = false;

  // synth stage
  std::string scenario = "structure_driven";
  int n_storms = 40;
  int points_per_storm = 36;
  int n_hours = 240;
  SynthGeometry geometry;

  std::string config_hash;  // content hash of the loaded config file
};

/// Parses and validates the JSON config; seed is mandatory.
RunConfig load_config(const std::filesystem::path& path);

/// Counts and output paths reported by a stage.
struct StageSummary {
  std::map<std::string, double> counts;
  std::vector<std::string> outputs;
};

StageSummary run_synth(const RunConfig& config);
StageSummary run_extract(const RunConfig& config);
StageSummary run_basis(const RunConfig& config);
StageSummary run_assemble(const RunConfig& config);
StageSummary run_fit(const RunConfig& config);
StageSummary run_eval(const RunConfig& config);
StageSummary run_test(const RunConfig& config);
StageSummary run_trajectory(const RunConfig& config, const std::string& storm_id,
                            const std::string& statistic);

}  // namespace orb
