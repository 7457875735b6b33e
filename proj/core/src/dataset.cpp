#include "orb/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "orb/csv.hpp"
#include "orb/errors.hpp"

namespace orb {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string> kShipsEnv = {"SHRD", "SHDC", "SHRS", "OHC",  "RSST",
                                            "RHLO", "RHMD", "RHHI", "VMPI", "U200"};
}  // namespace

void SourceTable::insert(const ObservationKey& key, std::vector<double> values) {
  if (values.size() != columns.size())
    throw ValidationError("SourceTable: row width mismatch for storm " + key.storm_id);
  if (!rows.emplace(key, std::move(values)).second)
    throw DataError("duplicate (storm, time) key: " + key.storm_id + " @ " +
                    format_utc_hour(UtcHour{key.time_hours}));
}

std::optional<double> SourceTable::value(const ObservationKey& key, std::size_t column) const {
  auto it = rows.find(key);
  if (it == rows.end()) return std::nullopt;
  double v = it->second[column];
  if (std::isnan(v)) return std::nullopt;
  return v;
}

int Dataset::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

std::string predictor_set_name(PredictorSetId id) {
  switch (id) {
    case PredictorSetId::ShipsOnly: return "SHIPS_only";
    case PredictorSetId::OrbOnly: return "ORB_only";
    case PredictorSetId::ShipsPlusOrb: return "SHIPS_plus_ORB";
    case PredictorSetId::ShipsPlusPersistence: return "SHIPS_plus_Persistence";
  }
  throw ValidationError("bad PredictorSetId");
}

PredictorSetId parse_predictor_set(const std::string& name) {
  for (auto id : {PredictorSetId::ShipsOnly, PredictorSetId::OrbOnly, PredictorSetId::ShipsPlusOrb,
                  PredictorSetId::ShipsPlusPersistence})
    if (predictor_set_name(id) == name) return id;
  throw ValidationError("unknown predictor set '" + name + "'");
}

const std::vector<std::string>& ships_base_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c = kShipsEnv;
    c.push_back("LAT");
    c.push_back("LON");
    return c;
  }();
  return cols;
}

const std::map<std::string, int>& orb_coefficient_counts() {
  static const std::map<std::string, int> counts = {{"DAV", 3},  {"RAD", 3},   {"SIZE", 2},
                                                    {"SKEW", 3}, {"SHAPE", 3}, {"ECC", 3}};
  return counts;
}

const std::vector<std::string>& orb_base_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c;
    for (const char* stat : {"DAV", "RAD", "SIZE", "SKEW", "SHAPE", "ECC"}) {
      int k = orb_coefficient_counts().at(stat);
      for (int i = 1; i <= k; ++i) c.push_back(std::string(stat) + std::to_string(i));
    }
    return c;
  }();
  return cols;
}

namespace {

std::vector<std::string> with_lags(const std::vector<std::string>& base) {
  std::vector<std::string> out = base;
  for (const char* prefix : {"D6_", "D12_", "D24_"})
    for (const auto& b : base) out.push_back(prefix + b);
  return out;
}

const std::vector<std::string> kPersistence = {"V", "D6V", "D12V"};

}  // namespace

std::vector<std::string> predictor_columns(PredictorSetId id) {
  switch (id) {
    case PredictorSetId::ShipsOnly: return with_lags(ships_base_columns());
    case PredictorSetId::OrbOnly: return with_lags(orb_base_columns());
    case PredictorSetId::ShipsPlusOrb: {
      auto cols = with_lags(ships_base_columns());
      auto orb = with_lags(orb_base_columns());
      cols.insert(cols.end(), orb.begin(), orb.end());
      return cols;
    }
    case PredictorSetId::ShipsPlusPersistence: {
      auto cols = with_lags(ships_base_columns());
      cols.insert(cols.end(), kPersistence.begin(), kPersistence.end());
      return cols;
    }
  }
  throw ValidationError("bad PredictorSetId");
}

std::vector<std::string> all_predictor_columns() {
  auto cols = predictor_columns(PredictorSetId::ShipsPlusOrb);
  cols.insert(cols.end(), kPersistence.begin(), kPersistence.end());
  return cols;
}

LabelSeries label_rapid_change(const std::vector<UtcHour>& times,
                               const std::vector<double>& intensity_kt, double threshold_kt) {
  if (times.size() != intensity_kt.size())
    throw ValidationError("label_rapid_change: times/intensity length mismatch");
  const std::size_t n = times.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (times[i].hours % 6 != 0) throw ValidationError("label_rapid_change: times must be 6-hourly");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw ValidationError("label_rapid_change: times must be strictly increasing");
  }

  std::map<std::int64_t, std::size_t> at;
  for (std::size_t i = 0; i < n; ++i) at[times[i].hours] = i;

  LabelSeries out;
  out.times = times;
  out.y_ri.assign(n, 0);
  out.y_rw.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t member[5];
    member[0] = i;
    bool complete = true;
    for (int s = 1; s <= 4 && complete; ++s) {
      auto it = at.find(times[i].hours + 6 * s);
      if (it == at.end())
        complete = false;
      else
        member[s] = it->second;
    }
    if (!complete) {
      // A window counts as skipped only when its 24-h endpoint fits on the
      // track, i.e. the incompleteness is a gap rather than the track end.
      if (times[i].hours + 24 <= times.back().hours) ++out.skipped_windows;
      continue;
    }
    double change = intensity_kt[member[4]] - intensity_kt[member[0]];
    if (change >= threshold_kt)
      for (std::size_t m : member) out.y_ri[m] = 1;
    if (change <= -threshold_kt)
      for (std::size_t m : member) out.y_rw[m] = 1;
  }
  return out;
}

int count_events(const std::vector<UtcHour>& times, const std::vector<int>& labels) {
  if (times.size() != labels.size())
    throw ValidationError("count_events: times/labels length mismatch");
  int events = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels[i]) continue;
    bool continues_run = i > 0 && labels[i - 1] && times[i].hours - times[i - 1].hours == 6;
    if (!continues_run) ++events;
  }
  return events;
}

StormSeries add_lags(const StormSeries& series) {
  const std::size_t n = series.times.size();
  if (series.values.size() != n) throw ValidationError("add_lags: row count mismatch");
  std::map<std::int64_t, std::size_t> at;
  for (std::size_t i = 0; i < n; ++i) at[series.times[i].hours] = i;

  int v_col = -1;
  for (std::size_t j = 0; j < series.columns.size(); ++j)
    if (series.columns[j] == "V") v_col = static_cast<int>(j);

  StormSeries out;
  out.columns = series.columns;
  for (const char* prefix : {"D6_", "D12_", "D24_"})
    for (const auto& b : series.columns) out.columns.push_back(prefix + b);
  if (v_col >= 0) {
    out.columns.push_back("D6V");
    out.columns.push_back("D12V");
  }

  for (std::size_t i = 0; i < n; ++i) {
    auto i6 = at.find(series.times[i].hours - 6);
    auto i12 = at.find(series.times[i].hours - 12);
    auto i24 = at.find(series.times[i].hours - 24);
    if (i6 == at.end() || i12 == at.end() || i24 == at.end()) continue;  // no 24-h history

    std::vector<double> row = series.values[i];
    auto lag = [&](std::size_t j, std::size_t back) {
      double now = series.values[i][j];
      double then = series.values[back][j];
      return now - then;
    };
    for (std::size_t j = 0; j < series.columns.size(); ++j) row.push_back(lag(j, i6->second));
    for (std::size_t j = 0; j < series.columns.size(); ++j) row.push_back(lag(j, i12->second));
    for (std::size_t j = 0; j < series.columns.size(); ++j) row.push_back(lag(j, i24->second));
    if (v_col >= 0) {
      double v6 = series.values[i6->second][v_col];
      double v12 = series.values[i12->second][v_col];
      row.push_back(series.values[i][v_col] - v6);  // D6V
      row.push_back(v6 - v12);                      // D12V: 12-hour to 6-h change
    }
    out.times.push_back(series.times[i]);
    out.values.push_back(std::move(row));
  }
  return out;
}

namespace {

// Base-variable lookup across the three sources, at an arbitrary time.
struct BaseLookup {
  const SourceTable* orb;
  const SourceTable* ships;
  const std::map<std::int64_t, const TrackPoint*>* track_at;
  std::string storm;

  std::optional<double> operator()(const std::string& name, std::int64_t hours) const {
    ObservationKey key{storm, hours};
    if (name == "LAT" || name == "LON" || name == "V") {
      auto it = track_at->find(hours);
      if (it == track_at->end()) return std::nullopt;
      if (name == "LAT") return it->second->lat;
      if (name == "LON") return it->second->lon;
      return it->second->intensity_kt;
    }
    for (std::size_t j = 0; j < ships->columns.size(); ++j)
      if (ships->columns[j] == name) return ships->value(key, j);
    for (std::size_t j = 0; j < orb->columns.size(); ++j)
      if (orb->columns[j] == name) return orb->value(key, j);
    return std::nullopt;
  }
};

}  // namespace

AssembleResult assemble(const std::vector<std::string>& columns, const SourceTable& orb_coefficients,
                        const SourceTable& ships, const std::vector<TrackPoint>& track,
                        const std::vector<ObservationKey>& eligible,
                        const AssembleOptions& options) {
  std::set<std::string> known(ships_base_columns().begin(), ships_base_columns().end());
  known.insert(orb_base_columns().begin(), orb_base_columns().end());
  known.insert({"V", "D6V", "D12V"});
  for (const auto& col : columns) {
    std::string base = col;
    for (const char* prefix : {"D24_", "D12_", "D6_"})
      if (base.rfind(prefix, 0) == 0) base = base.substr(std::string(prefix).size());
    if (!known.count(base)) throw ValidationError("assemble: unknown predictor '" + col + "'");
  }

  auto storms = group_by_storm(track);
  std::map<std::string, LabelSeries> labels;
  std::map<std::string, Split> split_of;
  std::map<std::string, Basin> basin_of;
  std::map<std::string, std::map<std::int64_t, const TrackPoint*>> track_index;
  int skipped = 0;
  for (const auto& [storm, points] : storms) {
    std::vector<UtcHour> times;
    std::vector<double> intensity;
    for (const auto& p : points) {
      if (p.time.hours % 6 != 0) continue;
      times.push_back(p.time);
      intensity.push_back(p.intensity_kt);
      track_index[storm][p.time.hours] = &p;
    }
    if (times.empty()) continue;
    auto series = label_rapid_change(times, intensity, options.rapid_threshold_kt);
    skipped += series.skipped_windows;
    labels.emplace(storm, std::move(series));
    split_of[storm] =
        utc_year(points.front().time) <= options.train_last_year ? Split::Train : Split::Test;
    basin_of[storm] = points.front().basin;
  }

  AssembleResult result;
  result.skipped_windows = skipped;
  result.dataset.columns = columns;

  std::set<ObservationKey> seen;
  for (const auto& key : eligible) {
    if (!seen.insert(key).second)
      throw DataError("assemble: duplicate eligible key " + key.storm_id);
    auto label_it = labels.find(key.storm_id);
    if (label_it == labels.end()) continue;
    ++result.candidates;

    BaseLookup lookup{&orb_coefficients, &ships, &track_index.at(key.storm_id), key.storm_id};
    std::vector<double> values;
    values.reserve(columns.size());
    bool missing = false;
    for (const auto& col : columns) {
      std::optional<double> v;
      if (col == "D6V") {
        auto a = lookup("V", key.time_hours), b = lookup("V", key.time_hours - 6);
        if (a && b) v = *a - *b;
      } else if (col == "D12V") {
        auto a = lookup("V", key.time_hours - 6), b = lookup("V", key.time_hours - 12);
        if (a && b) v = *a - *b;
      } else if (col.rfind("D6_", 0) == 0) {
        auto a = lookup(col.substr(3), key.time_hours), b = lookup(col.substr(3), key.time_hours - 6);
        if (a && b) v = *a - *b;
      } else if (col.rfind("D12_", 0) == 0) {
        auto a = lookup(col.substr(4), key.time_hours), b = lookup(col.substr(4), key.time_hours - 12);
        if (a && b) v = *a - *b;
      } else if (col.rfind("D24_", 0) == 0) {
        auto a = lookup(col.substr(4), key.time_hours), b = lookup(col.substr(4), key.time_hours - 24);
        if (a && b) v = *a - *b;
      } else {
        v = lookup(col, key.time_hours);
      }
      if (!v) {
        missing = true;
        break;
      }
      values.push_back(*v);
    }
    if (missing) {
      ++result.dropped_missing;
      continue;
    }

    const LabelSeries& ls = label_it->second;
    std::size_t li = 0;
    bool found = false;
    for (; li < ls.times.size(); ++li)
      if (ls.times[li].hours == key.time_hours) {
        found = true;
        break;
      }
    if (!found) {
      ++result.dropped_missing;
      continue;
    }

    LabeledObservation obs;
    obs.storm_id = key.storm_id;
    obs.time = UtcHour{key.time_hours};
    obs.basin = basin_of.at(key.storm_id);
    obs.y_ri = ls.y_ri[li];
    obs.y_rw = ls.y_rw[li];
    obs.split = split_of.at(key.storm_id);
    obs.values = std::move(values);
    result.dataset.rows.push_back(std::move(obs));
  }

  std::sort(result.dataset.rows.begin(), result.dataset.rows.end(),
            [](const LabeledObservation& a, const LabeledObservation& b) {
              return std::tie(a.storm_id, a.time.hours) < std::tie(b.storm_id, b.time.hours);
            });
  return result;
}

void write_dataset_csv(const Dataset& dataset, const std::filesystem::path& path) {
  CsvTable t;
  t.header = {"storm_id", "time", "basin", "split", "y_ri", "y_rw"};
  t.header.insert(t.header.end(), dataset.columns.begin(), dataset.columns.end());
  for (const auto& row : dataset.rows) {
    std::vector<std::string> cells = {row.storm_id,
                                      format_utc_hour(row.time),
                                      basin_name(row.basin),
                                      row.split == Split::Train ? "train" : "test",
                                      std::to_string(row.y_ri),
                                      std::to_string(row.y_rw)};
    for (double v : row.values) cells.push_back(format_double(v));
    t.rows.push_back(std::move(cells));
  }
  write_csv(t, path);
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  CsvTable t = read_csv(path);
  const std::vector<std::string> fixed = {"storm_id", "time", "basin", "split", "y_ri", "y_rw"};
  if (t.header.size() < fixed.size())
    throw ParseError("header", "dataset CSV header too short in " + path.string());
  for (std::size_t i = 0; i < fixed.size(); ++i)
    if (t.header[i] != fixed[i])
      throw ParseError("header", "dataset CSV header mismatch at '" + t.header[i] + "'");
  Dataset d;
  d.columns.assign(t.header.begin() + fixed.size(), t.header.end());
  for (const auto& row : t.rows) {
    LabeledObservation obs;
    obs.storm_id = row[0];
    obs.time = parse_utc_hour(row[1]);
    obs.basin = parse_basin(row[2]);
    if (row[3] == "train")
      obs.split = Split::Train;
    else if (row[3] == "test")
      obs.split = Split::Test;
    else
      throw ParseError("split", "unknown split '" + row[3] + "'");
    obs.y_ri = row[4] == "1" ? 1 : 0;
    obs.y_rw = row[5] == "1" ? 1 : 0;
    for (std::size_t i = fixed.size(); i < row.size(); ++i)
      obs.values.push_back(parse_double(row[i], t.header[i]));
    d.rows.push_back(std::move(obs));
  }
  return d;
}

SourceTable read_ships_csv(const std::filesystem::path& path) {
  CsvTable t = read_csv(path);
  std::vector<std::string> expected = {"storm_id", "time"};
  expected.insert(expected.end(), kShipsEnv.begin(), kShipsEnv.end());
  if (t.header != expected) {
    std::string missing;
    for (const auto& col : expected) {
      bool found = false;
      for (const auto& h : t.header) found |= (h == col);
      if (!found) missing += (missing.empty() ? "" : ", ") + col;
    }
    throw ParseError("header", "SHIPS CSV header mismatch in " + path.string() +
                                   (missing.empty() ? "" : " (missing: " + missing + ")"));
  }
  SourceTable table;
  table.columns = kShipsEnv;
  for (const auto& row : t.rows) {
    ObservationKey key{row[0], parse_utc_hour(row[1]).hours};
    std::vector<double> values;
    for (std::size_t i = 2; i < row.size(); ++i)
      values.push_back(row[i].empty() ? kNaN : parse_double(row[i], t.header[i]));
    table.insert(key, std::move(values));
  }
  return table;
}

void write_ships_csv(const SourceTable& table, const std::filesystem::path& path) {
  if (table.columns != kShipsEnv)
    throw ValidationError("write_ships_csv: table columns must be the 10 SHIPS variables");
  CsvTable t;
  t.header = {"storm_id", "time"};
  t.header.insert(t.header.end(), kShipsEnv.begin(), kShipsEnv.end());
  for (const auto& [key, values] : table.rows) {
    std::vector<std::string> cells = {key.storm_id, format_utc_hour(UtcHour{key.time_hours})};
    for (double v : values) cells.push_back(format_double(v));
    t.rows.push_back(std::move(cells));
  }
  write_csv(t, path);
}

}  // namespace orb
