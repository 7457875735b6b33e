#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orb/time.hpp"
#include "orb/track.hpp"

namespace orb {

/// (storm, time) key for joining 6-hourly sources.
struct ObservationKey {
  std::string storm_id;
  std::int64_t time_hours = 0;
  auto operator<=>(const ObservationKey&) const = default;
};

/// A (storm, time)-keyed numeric table with named columns; NaN means missing.
struct SourceTable {
  std::vector<std::string> columns;
  std::map<ObservationKey, std::vector<double>> rows;

  void insert(const ObservationKey& key, std::vector<double> values);  // throws on duplicate key
  std::optional<double> value(const ObservationKey& key, std::size_t column) const;
};

enum class Split { Train, Test };

struct LabeledObservation {
  std::string storm_id;
  UtcHour time;
  Basin basin = Basin::NAL;
  int y_ri = 0;
  int y_rw = 0;
  Split split = Split::Train;
  std::vector<double> values;  // aligned to Dataset::columns
};

struct Dataset {
  std::vector<std::string> columns;
  std::vector<LabeledObservation> rows;

  int column(const std::string& name) const;  // -1 when absent
};

enum class PredictorSetId { ShipsOnly, OrbOnly, ShipsPlusOrb, ShipsPlusPersistence };

std::string predictor_set_name(PredictorSetId id);
PredictorSetId parse_predictor_set(const std::string& name);

/// The 12 SHIPS-side base variables (10 environmental + LAT + LON).
const std::vector<std::string>& ships_base_columns();

/// The 17 ORB coefficient base variables: DAV(3) RAD(3) SIZE(2) SKEW(3)
/// SHAPE(3) ECC(3).
const std::vector<std::string>& orb_base_columns();

/// Per-statistic coefficient counts behind orb_base_columns().
const std::map<std::string, int>& orb_coefficient_counts();

/// Full ordered column list for a predictor set, base variables followed by
/// their D6_/D12_/D24_ lags (persistence adds V, D6V, D12V with no lags).
/// Widths: 48 / 68 / 116 / 51.
std::vector<std::string> predictor_columns(PredictorSetId id);

/// Union of every predictor column used by any set (the assembled dataset).
std::vector<std::string> all_predictor_columns();

/// RI/RW labels over one storm's 6-hourly intensity series. A 24-h window
/// [t, t+24] is RI when V(t+24) - V(t) >= threshold and RW when
/// <= -threshold; every observation inside such a window (both endpoints
/// inclusive) is labeled 1. Windows spanning gaps in the 6-hourly sequence
/// are skipped and counted.
struct LabelSeries {
  std::vector<UtcHour> times;
  std::vector<int> y_ri;
  std::vector<int> y_rw;
  int skipped_windows = 0;
};
LabelSeries label_rapid_change(const std::vector<UtcHour>& times,
                               const std::vector<double>& intensity_kt, double threshold_kt = 25.0);

/// Number of maximal runs of consecutive (6-h adjacent) 1-labels.
int count_events(const std::vector<UtcHour>& times, const std::vector<int>& labels);

/// Per-storm named 6-hourly series; NaN marks missing values.
struct StormSeries {
  std::vector<UtcHour> times;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;  // row per time
};

/// Adds D6_/D12_/D24_ backward differences for every column, plus SHIPS-
/// convention persistence (D6V = v(t)-v(t-6), D12V = v(t-6)-v(t-12)) when a
/// column named V exists. Rows lacking 24 h of history are dropped.
StormSeries add_lags(const StormSeries& series);

struct AssembleOptions {
  double rapid_threshold_kt = 25.0;
  int train_last_year = 2009;  // storms starting later are test
};

struct AssembleResult {
  Dataset dataset;
  std::size_t candidates = 0;       // eligible keys considered
  std::size_t dropped_missing = 0;  // rows dropped for any missing source value
  int skipped_windows = 0;          // label windows skipped across storms
};

/// Builds labeled observations for a predictor set from time-aligned sources.
/// `eligible` lists the (storm, time) keys that passed the sample filter;
/// labels come from the full per-storm track, lags look back along the
/// sources, and rows with any missing value are dropped and counted.
AssembleResult assemble(const std::vector<std::string>& columns, const SourceTable& orb_coefficients,
                        const SourceTable& ships, const std::vector<TrackPoint>& track,
                        const std::vector<ObservationKey>& eligible, const AssembleOptions& options);

/// Dataset CSV: storm_id,time,basin,split,y_ri,y_rw,<predictors...>.
void write_dataset_csv(const Dataset& dataset, const std::filesystem::path& path);
Dataset read_dataset_csv(const std::filesystem::path& path);

/// SHIPS-like CSV: storm_id,time,SHRD,...,U200.
SourceTable read_ships_csv(const std::filesystem::path& path);
void write_ships_csv(const SourceTable& table, const std::filesystem::path& path);

}  // namespace orb
