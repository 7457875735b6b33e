#include "orb/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <set>

#include <nlohmann/json.hpp>

#include "orb/csv.hpp"
#include "orb/eof.hpp"
#include "orb/errors.hpp"
#include "orb/evaluation.hpp"
#include "orb/lasso.hpp"
#include "orb/manifest.hpp"
#include "orb/parallel.hpp"

namespace orb {

namespace {

nlohmann::json load_json(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw DataError(std::string("cannot open ") + what + ": " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(what, std::string("invalid JSON: ") + e.what());
  }
  return j;
}

void missing_stage(const std::string& artifact, const std::string& stage) {
  throw ValidationError("missing upstream artifact '" + artifact + "'; run the '" + stage +
                        "' stage first");
}

std::filesystem::path features_dir(const RunConfig& c) { return c.output_dir / "features"; }
std::filesystem::path extract_manifest_path(const RunConfig& c) {
  return features_dir(c) / "manifest.json";
}

struct StampMeta {
  std::string file;
  std::string hash;
  std::string storm_id;
  UtcHour time;
  double missing_frac = 0.0;
};

std::vector<StampMeta> read_extract_manifest(const RunConfig& c) {
  auto path = extract_manifest_path(c);
  if (!std::filesystem::exists(path)) missing_stage(path.string(), "extract");
  nlohmann::json j = load_json(path, "extract manifest");
  std::vector<StampMeta> out;
  for (const auto& [file, entry] : j.at("stamps").items()) {
    StampMeta m;
    m.file = file;
    m.hash = entry.at("hash").get<std::string>();
    m.storm_id = entry.at("storm_id").get<std::string>();
    m.time = parse_utc_hour(entry.at("time").get<std::string>());
    m.missing_frac = entry.at("missing_frac").get<double>();
    out.push_back(std::move(m));
  }
  std::sort(out.begin(), out.end(), [](const StampMeta& a, const StampMeta& b) {
    return std::tie(a.storm_id, a.time.hours, a.file) < std::tie(b.storm_id, b.time.hours, b.file);
  });
  return out;
}

std::string stem_of(const std::string& file) {
  return std::filesystem::path(file).stem().string();
}

void write_stage_manifest(const RunConfig& c, const std::string& stage,
                          const std::map<std::string, std::string>& inputs,
                          const std::vector<std::string>& outputs) {
  Manifest m;
  m.stage = stage;
  m.config_hash = c.config_hash;
  m.seed = c.seed;
  m.inputs = inputs;
  m.outputs = outputs;
  write_manifest(m, c.output_dir / (stage + "_manifest.json"));
}

void write_summary(const RunConfig& c, const std::string& stage, const StageSummary& s) {
  nlohmann::ordered_json j;
  j["stage"] = stage;
  j["counts"] = s.counts;
  j["outputs"] = s.outputs;
  std::ofstream out(c.output_dir / (stage + "_summary.json"), std::ios::binary);
  out << j.dump(2) << "\n";
}

Basin storm_basin(const std::map<std::string, std::vector<TrackPoint>>& storms,
                  const std::string& storm_id) {
  auto it = storms.find(storm_id);
  if (it == storms.end()) throw DataError("storm '" + storm_id + "' missing from track file");
  return it->second.front().basin;
}

std::filesystem::path basis_path(const RunConfig& c, Basin b, OrbStatistic s) {
  return c.output_dir / ("basis_" + basin_name(b) + "_" + statistic_name(s) + ".json");
}
std::filesystem::path coeffs_path(const RunConfig& c, Basin b, OrbStatistic s) {
  return c.output_dir / ("coeffs_" + basin_name(b) + "_" + statistic_name(s) + ".csv");
}
std::filesystem::path dataset_path(const RunConfig& c) { return c.output_dir / "dataset.csv"; }
std::filesystem::path model_path(const RunConfig& c, const std::string& set_name) {
  return c.output_dir / ("model_" + set_name + "_" + c.target + ".json");
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path) {
  nlohmann::json j = load_json(path, "config");
  RunConfig c;
  c.config_hash = hash_file(path);

  if (!j.contains("seed") || !j["seed"].is_number())
    throw ValidationError("config: 'seed' is mandatory");
  c.seed = j["seed"].get<std::uint64_t>();

  const auto& paths = j.value("paths", nlohmann::json::object());
  auto get_path = [&](const char* key) -> std::filesystem::path {
    return paths.contains(key) ? std::filesystem::path(paths[key].get<std::string>())
                               : std::filesystem::path();
  };
  c.stamps_dir = get_path("stamps_dir");
  c.track_csv = get_path("track_csv");
  c.ships_csv = get_path("ships_csv");
  c.output_dir = get_path("output_dir");
  if (c.output_dir.empty()) throw ValidationError("config: paths.output_dir is mandatory");

  if (j.contains("filter")) {
    const auto& f = j["filter"];
    c.filter.min_intensity_kt = f.value("min_intensity_kt", c.filter.min_intensity_kt);
    c.filter.min_land_dist_km = f.value("min_land_dist_km", c.filter.min_land_dist_km);
    c.filter.max_missing_frac = f.value("max_missing_frac", c.filter.max_missing_frac);
    c.filter.rapid_threshold_kt = f.value("rapid_threshold_kt", c.filter.rapid_threshold_kt);
  }
  validate_filter(c.filter);

  if (j.contains("features")) {
    const auto& f = j["features"];
    c.features.dav_r_min_km = f.value("dav_r_min_km", c.features.dav_r_min_km);
    c.features.dav_r_max_km = f.value("dav_r_max_km", c.features.dav_r_max_km);
    c.features.rad_r_max_km = f.value("rad_r_max_km", c.features.rad_r_max_km);
    c.features.level_c_min = f.value("level_c_min", c.features.level_c_min);
    c.features.level_c_max = f.value("level_c_max", c.features.level_c_max);
  }

  c.var_target = j.value("var_target", c.var_target);
  if (!(c.var_target > 0 && c.var_target <= 1))
    throw ValidationError("config: var_target must be in (0, 1]");
  if (j.contains("k_override"))
    for (const auto& [stat, k] : j["k_override"].items()) {
      parse_statistic(stat);
      c.k_override[stat] = k.get<int>();
    }

  if (j.contains("predictor_set")) c.predictor_set = parse_predictor_set(j["predictor_set"]);
  c.target = j.value("target", c.target);
  if (c.target != "RI" && c.target != "RW")
    throw ValidationError("config: target must be RI or RW");
  if (j.contains("basin")) c.basin = parse_basin(j["basin"].get<std::string>());
  c.train_last_year = j.value("train_last_year", c.train_last_year);
  c.cv_folds = j.value("cv_folds", c.cv_folds);
  c.jobs = j.value("jobs", c.jobs);
  if (c.jobs < 1) throw ValidationError("config: jobs must be >= 1");
  c.roughness_target = j.value("roughness_target", c.roughness_target);

  if (j.contains("flags")) {
    const auto& f = j["flags"];
    c.paired_permutation = f.value("paired_permutation", false);
    c.one_se_rule = f.value("one_se_rule", false);
    c.p_value_smoothing = f.value("p_value_smoothing", false);
  }

  if (j.contains("synth")) {
    const auto& s = j["synth"];
    c.scenario = s.value("scenario", c.scenario);
    c.n_storms = s.value("n_storms", c.n_storms);
    c.points_per_storm = s.value("points_per_storm", c.points_per_storm);
    c.n_hours = s.value("n_hours", c.n_hours);
    c.geometry.grid_step_deg = s.value("grid_step_deg", c.geometry.grid_step_deg);
    c.geometry.half_width_px = s.value("half_width_px", c.geometry.half_width_px);
  }
  return c;
}

StageSummary run_synth(const RunConfig& config) {
  StageSummary summary;
  std::filesystem::create_directories(config.output_dir);
  if (config.stamps_dir.empty() || config.track_csv.empty() || config.ships_csv.empty())
    throw ValidationError("synth: paths.stamps_dir, track_csv and ships_csv must be set");

  if (config.scenario == "diurnal") {
    SynthDataset data = make_diurnal_storm(config.seed, config.geometry, config.n_hours);
    write_dataset_inputs(data, config.stamps_dir, config.track_csv, config.ships_csv);
    summary.counts["stamps"] = static_cast<double>(data.stamps.size());
    summary.counts["storms"] = 1;
  } else {
    Scenario sc = parse_scenario(config.scenario);
    SynthDataset data =
        make_dataset(config.n_storms, sc, config.seed, config.geometry, config.points_per_storm);
    if (sc == Scenario::SparseSignal) {
      write_dataset_csv(data.observations, dataset_path(config));
      nlohmann::ordered_json truth;
      truth["true_beta"] = data.true_beta;
      std::ofstream out(config.output_dir / "truth.json", std::ios::binary);
      out << truth.dump(2) << "\n";
      summary.counts["rows"] = static_cast<double>(data.observations.rows.size());
      summary.outputs.push_back(dataset_path(config).string());
    } else {
      write_dataset_inputs(data, config.stamps_dir, config.track_csv, config.ships_csv);
      summary.counts["stamps"] = static_cast<double>(data.stamps.size());
      summary.counts["storms"] = static_cast<double>(config.n_storms);
    }
  }
  write_summary(config, "synth", summary);
  return summary;
}

StageSummary run_extract(const RunConfig& config) {
  if (config.stamps_dir.empty() || !std::filesystem::exists(config.stamps_dir))
    throw ValidationError("extract: paths.stamps_dir does not exist");
  std::filesystem::create_directories(features_dir(config));

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(config.stamps_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".stamp")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  // Previous run's manifest supports resumption keyed by content hash.
  nlohmann::json previous = nlohmann::json::object();
  if (std::filesystem::exists(extract_manifest_path(config))) {
    nlohmann::json m = load_json(extract_manifest_path(config), "extract manifest");
    if (m.contains("stamps")) previous = m["stamps"];
  }

  const std::vector<std::string> stat_names = {"DAV", "RAD", "SIZE", "SKEW", "SHAPE", "ECC"};
  std::mutex mutex;
  nlohmann::ordered_json entries = nlohmann::ordered_json::object();
  std::size_t computed = 0, skipped = 0;

  parallel_for(files.size(), config.jobs, [&](std::size_t i) {
    const auto& path = files[i];
    const std::string name = path.filename().string();
    const std::string hash = hash_file(path);

    std::vector<std::string> outputs;
    for (const auto& s : stat_names)
      outputs.push_back((features_dir(config) / (stem_of(name) + "." + s + ".csv")).string());

    bool reusable = previous.contains(name) && previous[name].value("hash", "") == hash;
    if (reusable)
      for (const auto& o : outputs) reusable &= std::filesystem::exists(o);

    nlohmann::ordered_json entry;
    entry["hash"] = hash;
    if (reusable) {
      entry["storm_id"] = previous[name]["storm_id"];
      entry["time"] = previous[name]["time"];
      entry["missing_frac"] = previous[name]["missing_frac"];
      std::lock_guard<std::mutex> lock(mutex);
      entries[name] = entry;
      ++skipped;
      return;
    }

    Stamp stamp = read_stamp(path);
    StampFeatures f = extract_features(stamp, config.features);
    write_orb_csv(f.dav, outputs[0]);
    write_orb_csv(f.rad, outputs[1]);
    write_orb_csv(f.size, outputs[2]);
    write_orb_csv(f.skew, outputs[3]);
    write_orb_csv(f.shape, outputs[4]);
    write_orb_csv(f.ecc, outputs[5]);

    entry["storm_id"] = stamp.storm_id;
    entry["time"] = format_utc_hour(stamp.time);
    entry["missing_frac"] = stamp.missing_fraction();
    std::lock_guard<std::mutex> lock(mutex);
    entries[name] = entry;
    ++computed;
  });

  // Rewrite the manifest with deterministic (sorted) key order.
  nlohmann::ordered_json manifest;
  manifest["stage"] = "extract";
  nlohmann::ordered_json sorted = nlohmann::ordered_json::object();
  std::vector<std::string> keys;
  for (const auto& [k, v] : entries.items()) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  for (const auto& k : keys) sorted[k] = entries[k];
  manifest["stamps"] = sorted;
  {
    std::ofstream out(extract_manifest_path(config), std::ios::binary);
    out << manifest.dump(2) << "\n";
  }

  StageSummary summary;
  summary.counts["stamps"] = static_cast<double>(files.size());
  summary.counts["computed"] = static_cast<double>(computed);
  summary.counts["skipped"] = static_cast<double>(skipped);
  summary.outputs.push_back(features_dir(config).string());
  write_stage_manifest(config, "extract", {}, summary.outputs);
  write_summary(config, "extract", summary);
  return summary;
}

StageSummary run_basis(const RunConfig& config) {
  auto metas = read_extract_manifest(config);
  if (metas.empty()) throw DataError("basis: no extracted features found");
  if (!std::filesystem::exists(config.track_csv)) missing_stage(config.track_csv.string(), "synth");
  auto storms = group_by_storm(read_track_csv(config.track_csv));

  std::set<Basin> basins;
  for (const auto& m : metas) basins.insert(storm_basin(storms, m.storm_id));

  StageSummary summary;
  std::vector<std::pair<Basin, OrbStatistic>> combos;
  for (Basin b : basins)
    for (OrbStatistic s : kAllStatistics) combos.emplace_back(b, s);

  std::mutex mutex;
  parallel_for(combos.size(), config.jobs, [&](std::size_t ci) {
    auto [basin, stat] = combos[ci];
    std::vector<double> grid;
    std::vector<std::vector<double>> curves;
    std::vector<const StampMeta*> rows;
    for (const auto& m : metas) {
      if (storm_basin(storms, m.storm_id) != basin) continue;
      auto path = features_dir(config) / (stem_of(m.file) + "." + statistic_name(stat) + ".csv");
      if (!std::filesystem::exists(path)) missing_stage(path.string(), "extract");
      OrbFunction f = read_orb_csv(path, stat);
      if (grid.empty())
        grid = f.thresholds;
      else if (grid != f.thresholds)
        throw DataError("basis: threshold grid mismatch in " + path.string());
      curves.push_back(f.values);
      rows.push_back(&m);
    }
    if (curves.size() < 2) throw DataError("basis: fewer than 2 curves for " + statistic_name(stat));

    std::optional<int> k_override;
    auto it = config.k_override.find(statistic_name(stat));
    if (it != config.k_override.end()) k_override = it->second;
    EofBasis basis = fit_basis(grid, curves, config.var_target, k_override);
    basis.statistic = stat;
    basis.basin = basin;
    write_basis_json(basis, basis_path(config, basin, stat));

    CsvTable coeffs;
    coeffs.header = {"storm_id", "time", "stat"};
    for (int k = 1; k <= basis.k(); ++k) coeffs.header.push_back("alpha_" + std::to_string(k));
    for (std::size_t i = 0; i < curves.size(); ++i) {
      std::vector<double> alpha = project(curves[i], basis);
      std::vector<std::string> row = {rows[i]->storm_id, format_utc_hour(rows[i]->time),
                                      statistic_name(stat)};
      for (double a : alpha) row.push_back(format_double(a));
      coeffs.rows.push_back(std::move(row));
    }
    write_csv(coeffs, coeffs_path(config, basin, stat));

    std::lock_guard<std::mutex> lock(mutex);
    summary.counts["k_" + basin_name(basin) + "_" + statistic_name(stat)] =
        static_cast<double>(basis.k());
    summary.outputs.push_back(basis_path(config, basin, stat).string());
    summary.outputs.push_back(coeffs_path(config, basin, stat).string());
  });

  std::sort(summary.outputs.begin(), summary.outputs.end());
  summary.counts["curves"] = static_cast<double>(metas.size());
  write_stage_manifest(config, "basis", {{"track_csv", hash_file(config.track_csv)}},
                       summary.outputs);
  write_summary(config, "basis", summary);
  return summary;
}

StageSummary run_assemble(const RunConfig& config) {
  auto metas = read_extract_manifest(config);
  if (!std::filesystem::exists(config.track_csv)) missing_stage(config.track_csv.string(), "synth");
  if (!std::filesystem::exists(config.ships_csv)) missing_stage(config.ships_csv.string(), "synth");
  auto track = read_track_csv(config.track_csv);
  auto storms = group_by_storm(track);
  SourceTable ships = read_ships_csv(config.ships_csv);

  // ORB coefficient table: the first k coefficients per statistic, named
  // DAV1.., RAD1.., under the Table-2 inventory.
  SourceTable orb;
  orb.columns = orb_base_columns();
  std::map<ObservationKey, std::vector<double>> staged;
  for (OrbStatistic stat : kAllStatistics) {
    auto path = coeffs_path(config, config.basin, stat);
    if (!std::filesystem::exists(path)) missing_stage(path.string(), "basis");
    CsvTable t = read_csv(path);
    int needed = orb_coefficient_counts().at(statistic_name(stat));
    if (static_cast<int>(t.header.size()) - 3 < needed)
      throw DataError("assemble: basis for " + statistic_name(stat) + " has fewer than " +
                      std::to_string(needed) + " coefficients; set k_override");
    for (const auto& row : t.rows) {
      ObservationKey key{row[0], parse_utc_hour(row[1]).hours};
      auto& slot = staged[key];
      if (slot.empty()) slot.assign(orb.columns.size(), std::nan(""));
      int base = 0;
      for (OrbStatistic s2 : kAllStatistics) {
        if (s2 == stat) break;
        base += orb_coefficient_counts().at(statistic_name(s2));
      }
      for (int k = 0; k < needed; ++k)
        slot[static_cast<std::size_t>(base + k)] = parse_double(row[3 + k], "alpha");
    }
  }
  for (auto& [key, values] : staged) orb.insert(key, std::move(values));

  // Sample filter over manifest metadata (missing fraction comes from extract).
  std::vector<ObservationKey> eligible;
  std::map<std::string, std::map<std::int64_t, double>> missing_by_storm;
  for (const auto& m : metas) missing_by_storm[m.storm_id][m.time.hours] = m.missing_frac;
  for (const auto& [storm_id, points] : storms) {
    if (points.front().basin != config.basin) continue;
    auto mf_it = missing_by_storm.find(storm_id);
    if (mf_it == missing_by_storm.end()) continue;
    std::map<std::int64_t, std::size_t> at;
    for (std::size_t i = 0; i < points.size(); ++i) at[points[i].time.hours] = i;
    for (const auto& p : points) {
      if (p.time.hours % 6 != 0) continue;
      if (p.intensity_kt < config.filter.min_intensity_kt) continue;
      if (!at.count(p.time.hours - 24)) continue;
      bool over_water = true;
      for (const auto& q : points) {
        if (q.time < p.time || q.time.hours > p.time.hours + 24) continue;
        if (q.dist_to_land_km < config.filter.min_land_dist_km) {
          over_water = false;
          break;
        }
      }
      if (!over_water) continue;
      auto mf = mf_it->second.find(p.time.hours);
      if (mf == mf_it->second.end()) continue;
      if (!(mf->second < config.filter.max_missing_frac)) continue;
      eligible.push_back({storm_id, p.time.hours});
    }
  }

  AssembleOptions options;
  options.rapid_threshold_kt = config.filter.rapid_threshold_kt;
  options.train_last_year = config.train_last_year;
  AssembleResult result =
      assemble(all_predictor_columns(), orb, ships, track, eligible, options);
  write_dataset_csv(result.dataset, dataset_path(config));

  StageSummary summary;
  summary.counts["eligible"] = static_cast<double>(eligible.size());
  summary.counts["rows"] = static_cast<double>(result.dataset.rows.size());
  summary.counts["dropped_missing"] = static_cast<double>(result.dropped_missing);
  summary.counts["skipped_windows"] = static_cast<double>(result.skipped_windows);
  summary.outputs.push_back(dataset_path(config).string());
  write_stage_manifest(config, "assemble",
                       {{"track_csv", hash_file(config.track_csv)},
                        {"ships_csv", hash_file(config.ships_csv)}},
                       summary.outputs);
  write_summary(config, "assemble", summary);
  return summary;
}

StageSummary run_fit(const RunConfig& config) {
  if (!std::filesystem::exists(dataset_path(config)))
    missing_stage(dataset_path(config).string(), "assemble");
  Dataset dataset = read_dataset_csv(dataset_path(config));

  TrainOptions options;
  options.folds = config.cv_folds;
  options.one_se_rule = config.one_se_rule;
  FittedModel model = train_model(dataset, config.predictor_set, config.target, config.seed, options);
  auto path = model_path(config, predictor_set_name(config.predictor_set));
  write_model_json(model, path);

  StageSummary summary;
  summary.counts["train_rows"] =
      static_cast<double>(dataset_labels(dataset, config.target, Split::Train).size());
  summary.counts["nonzero_coefficients"] = static_cast<double>(model.coefficients.size());
  summary.counts["lambda"] = model.lambda;
  summary.counts["p_star"] = model.p_star;
  summary.outputs.push_back(path.string());
  write_stage_manifest(config, "fit", {{"dataset", hash_file(dataset_path(config))}},
                       summary.outputs);
  write_summary(config, "fit", summary);
  return summary;
}

StageSummary run_eval(const RunConfig& config) {
  auto mpath = model_path(config, predictor_set_name(config.predictor_set));
  if (!std::filesystem::exists(mpath)) missing_stage(mpath.string(), "fit");
  if (!std::filesystem::exists(dataset_path(config)))
    missing_stage(dataset_path(config).string(), "assemble");
  FittedModel model = read_model_json(mpath);
  Dataset dataset = read_dataset_csv(dataset_path(config));

  std::vector<double> p = predict_dataset(model, dataset, Split::Test);
  std::vector<int> y = dataset_labels(dataset, config.target, Split::Test);
  if (p.empty()) throw DataError("eval: no test rows in the dataset");

  RocCurve roc = roc_auc(p, y);
  BootstrapCi ci = bootstrap_auc_ci(p, y, 250, 0.95, config.seed, config.jobs);
  double ba = balanced_accuracy(p, y, model.p_star);

  std::string tag = predictor_set_name(config.predictor_set) + "_" + config.target;
  auto report_json = config.output_dir / ("report_" + tag + ".json");
  auto report_csv = config.output_dir / ("report_" + tag + ".csv");
  auto roc_csv = config.output_dir / ("roc_" + tag + ".csv");

  nlohmann::ordered_json j;
  j["predictor_set"] = model.predictor_set;
  j["target"] = model.target;
  j["n_test"] = y.size();
  j["auc"] = roc.auc;
  j["auc_ci_lower"] = ci.lower;
  j["auc_ci_upper"] = ci.upper;
  j["bootstrap_resamples"] = ci.resamples;
  j["balanced_accuracy"] = ba;
  j["p_star"] = model.p_star;
  j["lambda"] = model.lambda;
  j["seed"] = config.seed;
  j["model_seed"] = model.seed;
  j["data_fingerprint"] = model.data_fingerprint;
  {
    std::ofstream out(report_json, std::ios::binary);
    out << j.dump(2) << "\n";
  }
  CsvTable report;
  report.header = {"predictor_set", "target", "n_test", "auc", "ci_lower", "ci_upper",
                   "balanced_accuracy", "p_star", "lambda", "seed"};
  report.rows.push_back({model.predictor_set, model.target, std::to_string(y.size()),
                         format_double(roc.auc), format_double(ci.lower), format_double(ci.upper),
                         format_double(ba), format_double(model.p_star),
                         format_double(model.lambda), std::to_string(config.seed)});
  write_csv(report, report_csv);

  CsvTable roc_table;
  roc_table.header = {"fpr", "tpr"};
  for (std::size_t i = 0; i < roc.fpr.size(); ++i)
    roc_table.rows.push_back({format_double(roc.fpr[i]), format_double(roc.tpr[i])});
  write_csv(roc_table, roc_csv);

  StageSummary summary;
  summary.counts["auc"] = roc.auc;
  summary.counts["balanced_accuracy"] = ba;
  summary.counts["n_test"] = static_cast<double>(y.size());
  summary.outputs = {report_json.string(), report_csv.string(), roc_csv.string()};
  write_stage_manifest(config, "eval", {{"dataset", hash_file(dataset_path(config))}},
                       summary.outputs);
  write_summary(config, "eval", summary);
  return summary;
}

StageSummary run_test(const RunConfig& config) {
  if (!std::filesystem::exists(dataset_path(config)))
    missing_stage(dataset_path(config).string(), "assemble");
  Dataset dataset = read_dataset_csv(dataset_path(config));

  TrainOptions options;
  options.folds = config.cv_folds;
  options.one_se_rule = config.one_se_rule;
  FittedModel orb_only = train_model(dataset, PredictorSetId::OrbOnly, config.target, config.seed,
                                     options);
  FittedModel ships_only = train_model(dataset, PredictorSetId::ShipsOnly, config.target,
                                       config.seed, options);
  FittedModel ships_orb = train_model(dataset, PredictorSetId::ShipsPlusOrb, config.target,
                                      config.seed, options);

  std::vector<int> y = dataset_labels(dataset, config.target, Split::Test);
  std::vector<double> p_orb = predict_dataset(orb_only, dataset, Split::Test);
  std::vector<double> p_ships = predict_dataset(ships_only, dataset, Split::Test);
  std::vector<double> p_both = predict_dataset(ships_orb, dataset, Split::Test);
  if (y.empty()) throw DataError("test: no test rows in the dataset");

  PermutationOptions popts;
  popts.rounds = 1000;
  popts.seed = config.seed;
  popts.paired = config.paired_permutation;
  popts.add_one_smoothing = config.p_value_smoothing;
  popts.jobs = config.jobs;

  TestResult t1 = permutation_test(p_orb, p_ships, y, TailDirection::Less, popts);
  TestResult t2 = permutation_test(p_both, p_ships, y, TailDirection::Greater, popts);

  nlohmann::ordered_json j;
  j["target"] = config.target;
  j["rounds"] = popts.rounds;
  j["paired"] = popts.paired;
  j["add_one_smoothing"] = popts.add_one_smoothing;
  j["seed"] = config.seed;
  j["auc_ORB_only"] = roc_auc(p_orb, y).auc;
  j["auc_SHIPS_only"] = roc_auc(p_ships, y).auc;
  j["auc_SHIPS_plus_ORB"] = roc_auc(p_both, y).auc;
  j["test1_statistic"] = t1.statistic;
  j["test1_p_value"] = t1.p_value;
  j["test2_statistic"] = t2.statistic;
  j["test2_p_value"] = t2.p_value;
  auto path = config.output_dir / ("tests_" + config.target + ".json");
  {
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << "\n";
  }

  StageSummary summary;
  summary.counts["test1_p_value"] = t1.p_value;
  summary.counts["test2_p_value"] = t2.p_value;
  summary.counts["n_test"] = static_cast<double>(y.size());
  summary.outputs.push_back(path.string());
  write_stage_manifest(config, "test", {{"dataset", hash_file(dataset_path(config))}},
                       summary.outputs);
  write_summary(config, "test", summary);
  return summary;
}

StageSummary run_trajectory(const RunConfig& config, const std::string& storm_id,
                            const std::string& statistic) {
  OrbStatistic stat = parse_statistic(statistic);
  auto cpath = coeffs_path(config, config.basin, stat);
  if (!std::filesystem::exists(cpath)) missing_stage(cpath.string(), "basis");
  CsvTable coeffs = read_csv(cpath);
  const int k = static_cast<int>(coeffs.header.size()) - 3;

  std::vector<std::pair<UtcHour, std::vector<double>>> series;
  for (const auto& row : coeffs.rows) {
    if (row[0] != storm_id) continue;
    std::vector<double> alpha;
    for (int i = 0; i < k; ++i) alpha.push_back(parse_double(row[3 + i], "alpha"));
    series.emplace_back(parse_utc_hour(row[1]), std::move(alpha));
  }
  if (series.empty()) throw DataError("trajectory: unknown storm '" + storm_id + "'");
  std::sort(series.begin(), series.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  if (series.size() < 3) throw DataError("trajectory: need at least 3 coefficient rows");

  const std::int64_t step = series[1].first - series[0].first;
  for (std::size_t i = 1; i < series.size(); ++i)
    if (series[i].first - series[i - 1].first != step)
      throw DataError("trajectory: coefficient series is not uniformly spaced");

  std::vector<std::vector<double>> smoothed(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    std::vector<double> v;
    for (const auto& [t, alpha] : series) v.push_back(alpha[static_cast<std::size_t>(j)]);
    smoothed[static_cast<std::size_t>(j)] =
        smooth_coefficients(v, static_cast<double>(step), config.roughness_target).values;
  }

  CsvTable out;
  out.header = {"time"};
  for (int i = 1; i <= k; ++i) out.header.push_back("alpha_" + std::to_string(i));
  for (int i = 1; i <= k; ++i) out.header.push_back("smooth_" + std::to_string(i));
  for (std::size_t i = 0; i < series.size(); ++i) {
    std::vector<std::string> row = {format_utc_hour(series[i].first)};
    for (int j = 0; j < k; ++j) row.push_back(format_double(series[i].second[static_cast<std::size_t>(j)]));
    for (int j = 0; j < k; ++j) row.push_back(format_double(smoothed[static_cast<std::size_t>(j)][i]));
    out.rows.push_back(std::move(row));
  }
  auto path = config.output_dir / ("trajectory_" + storm_id + "_" + statistic + ".csv");
  write_csv(out, path);

  StageSummary summary;
  summary.counts["points"] = static_cast<double>(series.size());
  summary.counts["k"] = k;
  summary.outputs.push_back(path.string());
  write_stage_manifest(config, "trajectory", {{"coefficients", hash_file(cpath)}}, summary.outputs);
  write_summary(config, "trajectory", summary);
  return summary;
}

}  // namespace orb
