#include "orb/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "orb/csv.hpp"
#include "orb/errors.hpp"

namespace orb {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Linear interpolation across undefined entries; ends extend the nearest
// defined value. All-undefined curves fill with 0.
void interpolate_undefined(std::vector<double>& values, const std::vector<std::uint8_t>& defined) {
  const std::size_t n = values.size();
  std::size_t first = n;
  for (std::size_t i = 0; i < n; ++i)
    if (defined[i]) {
      first = i;
      break;
    }
  if (first == n) {
    std::fill(values.begin(), values.end(), 0.0);
    return;
  }
  std::size_t last = first;
  for (std::size_t i = n; i-- > 0;)
    if (defined[i]) {
      last = i;
      break;
    }
  for (std::size_t i = 0; i < first; ++i) values[i] = values[first];
  for (std::size_t i = last + 1; i < n; ++i) values[i] = values[last];
  std::size_t prev = first;
  for (std::size_t i = first + 1; i <= last; ++i) {
    if (!defined[i]) continue;
    if (i > prev + 1) {
      for (std::size_t j = prev + 1; j < i; ++j) {
        double w = static_cast<double>(j - prev) / static_cast<double>(i - prev);
        values[j] = values[prev] + w * (values[i] - values[prev]);
      }
    }
    prev = i;
  }
}

std::vector<double> radius_grid(double r_min, double r_max, double dr) {
  std::vector<double> out;
  for (int k = 0;; ++k) {
    double r = r_min + k * dr;
    if (r > r_max) break;
    out.push_back(r);
  }
  return out;
}

struct CenterGeometry {
  Grid<double> east_km;
  Grid<double> north_km;
  Grid<double> dist_km;
  double dx, dy;
};

CenterGeometry center_geometry(const Stamp& stamp, const StormCenter& center) {
  const int n = stamp.size();
  if (center.row < 0 || center.row > n - 1 || center.col < 0 || center.col > n - 1)
    throw ValidationError("storm center outside grid");
  CenterGeometry g;
  g.dy = kKmPerDegree * stamp.grid_step;
  g.dx = kKmPerDegree * stamp.grid_step * std::cos(stamp.center_lat * kPi / 180.0);
  g.east_km = Grid<double>(n, n);
  g.north_km = Grid<double>(n, n);
  g.dist_km = Grid<double>(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      double e = (c - center.col) * g.dx;
      double no = (center.row - r) * g.dy;
      g.east_km(r, c) = e;
      g.north_km(r, c) = no;
      g.dist_km(r, c) = std::sqrt(e * e + no * no);
    }
  }
  return g;
}

}  // namespace

std::string statistic_name(OrbStatistic s) {
  switch (s) {
    case OrbStatistic::DAV: return "DAV";
    case OrbStatistic::RAD: return "RAD";
    case OrbStatistic::SIZE: return "SIZE";
    case OrbStatistic::SKEW: return "SKEW";
    case OrbStatistic::SHAPE: return "SHAPE";
    case OrbStatistic::ECC: return "ECC";
  }
  throw ValidationError("bad OrbStatistic");
}

OrbStatistic parse_statistic(const std::string& name) {
  for (OrbStatistic s : kAllStatistics)
    if (statistic_name(s) == name) return s;
  throw ParseError("statistic", "unknown ORB statistic '" + name + "'");
}

Grid<double> deviation_angles(const Stamp& stamp, const StormCenter& center,
                              const FeatureConfig& cfg) {
  const int n = stamp.size();
  if (center.row < 0 || center.row > n - 1 || center.col < 0 || center.col > n - 1)
    throw ValidationError("deviation_angles: center outside grid");
  const double dy = kKmPerDegree * stamp.grid_step;
  const double dx = kKmPerDegree * stamp.grid_step * std::cos(stamp.center_lat * kPi / 180.0);

  Grid<double> psi(n, n, kNaN);
  auto masked = [&](int r, int c) { return stamp.mask(r, c) != 0; };

  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (masked(r, c)) continue;

      // d tb / d east
      double ge;
      if (c > 0 && c < n - 1) {
        if (masked(r, c - 1) || masked(r, c + 1)) continue;
        ge = (static_cast<double>(stamp.tb(r, c + 1)) - stamp.tb(r, c - 1)) / (2.0 * dx);
      } else if (c == 0) {
        if (masked(r, c + 1)) continue;
        ge = (static_cast<double>(stamp.tb(r, c + 1)) - stamp.tb(r, c)) / dx;
      } else {
        if (masked(r, c - 1)) continue;
        ge = (static_cast<double>(stamp.tb(r, c)) - stamp.tb(r, c - 1)) / dx;
      }

      // d tb / d north (row index increases southward)
      double gn;
      if (r > 0 && r < n - 1) {
        if (masked(r - 1, c) || masked(r + 1, c)) continue;
        gn = (static_cast<double>(stamp.tb(r - 1, c)) - stamp.tb(r + 1, c)) / (2.0 * dy);
      } else if (r == 0) {
        if (masked(r + 1, c)) continue;
        gn = (static_cast<double>(stamp.tb(r, c)) - stamp.tb(r + 1, c)) / dy;
      } else {
        if (masked(r - 1, c)) continue;
        gn = (static_cast<double>(stamp.tb(r - 1, c)) - stamp.tb(r, c)) / dy;
      }

      if (std::sqrt(ge * ge + gn * gn) < cfg.grad_floor_c_per_km) continue;

      double re = (c - center.col) * dx;
      double rn = (center.row - r) * dy;
      if (re == 0.0 && rn == 0.0) continue;  // no radial direction at the center

      // Signed angle between the gradient line and the radial line.
      double a = std::atan2(ge * rn - gn * re, ge * re + gn * rn);
      if (a > kPi / 2.0) a -= kPi;
      if (a <= -kPi / 2.0) a += kPi;
      psi(r, c) = a * 180.0 / kPi;
    }
  }
  return psi;
}

OrbFunction dav(const Stamp& stamp, const StormCenter& center, const FeatureConfig& cfg) {
  Grid<double> psi = deviation_angles(stamp, center, cfg);
  CenterGeometry g = center_geometry(stamp, center);
  const int n = stamp.size();

  int defined_at_rmin = 0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (!std::isnan(psi(r, c)) && g.dist_km(r, c) <= cfg.dav_r_min_km) ++defined_at_rmin;
  if (defined_at_rmin < cfg.dav_min_count)
    throw DataError("dav: only " + std::to_string(defined_at_rmin) +
                    " defined deviation angles within " + std::to_string(cfg.dav_r_min_km) +
                    " km (need >= " + std::to_string(cfg.dav_min_count) + ")");

  OrbFunction f;
  f.statistic = OrbStatistic::DAV;
  f.axis = ThresholdAxis::RadiusKm;
  f.thresholds = radius_grid(cfg.dav_r_min_km, cfg.dav_r_max_km, g.dy);
  f.values.resize(f.thresholds.size());
  f.defined.assign(f.thresholds.size(), 1);

  for (std::size_t k = 0; k < f.thresholds.size(); ++k) {
    const double rk = f.thresholds[k];
    double sum = 0.0, sumsq = 0.0;
    std::int64_t cnt = 0;
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        double v = psi(r, c);
        if (std::isnan(v) || g.dist_km(r, c) > rk) continue;
        sum += v;
        sumsq += v * v;
        ++cnt;
      }
    }
    double mean = sum / static_cast<double>(cnt);
    f.values[k] = sumsq / static_cast<double>(cnt) - mean * mean;
  }
  return f;
}

StormCenter find_center(const Stamp& stamp, const FeatureConfig& cfg) {
  const int n = stamp.size();
  const int nc = stamp.half_width;
  const int span = static_cast<int>(std::floor(cfg.eye_search_half_deg / stamp.grid_step));
  const double dy = kKmPerDegree * stamp.grid_step;
  const double dx = kKmPerDegree * stamp.grid_step * std::cos(stamp.center_lat * kPi / 180.0);
  const int pr = static_cast<int>(std::ceil(cfg.eye_radius_km / dy));
  const int pc = static_cast<int>(std::ceil(cfg.eye_radius_km / dx));

  auto core_mean = [&](int row, int col, double& mean) {
    double sum = 0.0;
    std::int64_t cnt = 0;
    for (int r = std::max(0, row - pr); r <= std::min(n - 1, row + pr); ++r) {
      for (int c = std::max(0, col - pc); c <= std::min(n - 1, col + pc); ++c) {
        if (stamp.mask(r, c)) continue;
        double e = (c - col) * dx;
        double no = (row - r) * dy;
        if (std::sqrt(e * e + no * no) > cfg.eye_radius_km) continue;
        sum += stamp.tb(r, c);
        ++cnt;
      }
    }
    if (cnt == 0) return false;
    mean = sum / static_cast<double>(cnt);
    return true;
  };

  double bt_mean;
  bool bt_ok = core_mean(nc, nc, bt_mean);

  double best_mean = -std::numeric_limits<double>::infinity();
  int best_r = nc, best_c = nc;
  std::int64_t best_d2 = 0;
  bool have_best = false;
  for (int r = std::max(0, nc - span); r <= std::min(n - 1, nc + span); ++r) {
    for (int c = std::max(0, nc - span); c <= std::min(n - 1, nc + span); ++c) {
      double m;
      if (!core_mean(r, c, m)) continue;
      std::int64_t d2 = static_cast<std::int64_t>(r - nc) * (r - nc) +
                        static_cast<std::int64_t>(c - nc) * (c - nc);
      if (!have_best || m > best_mean || (m == best_mean && d2 < best_d2)) {
        best_mean = m;
        best_r = r;
        best_c = c;
        best_d2 = d2;
        have_best = true;
      }
    }
  }

  StormCenter bt{static_cast<double>(nc), static_cast<double>(nc), StormCenter::Source::BestTrack};
  if (!have_best || best_mean <= cfg.eye_min_temp_c) return bt;
  bool at_grid_center = (best_r == nc && best_c == nc);
  if (!at_grid_center && (!bt_ok || best_mean < bt_mean + cfg.eye_delta_c)) return bt;
  return StormCenter{static_cast<double>(best_r), static_cast<double>(best_c),
                     StormCenter::Source::EyeDetected};
}

OrbFunction radial_profile(const Stamp& stamp, const StormCenter& center,
                           const FeatureConfig& cfg) {
  CenterGeometry g = center_geometry(stamp, center);
  const int n = stamp.size();
  const double dr = g.dy;
  const int annuli = static_cast<int>(std::floor(cfg.rad_r_max_km / dr));
  if (annuli < 2) throw ValidationError("radial_profile: rad_r_max_km too small for grid step");

  std::vector<double> sum(annuli, 0.0);
  std::vector<std::int64_t> cnt(annuli, 0);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (stamp.mask(r, c)) continue;
      int k = static_cast<int>(g.dist_km(r, c) / dr);
      if (k >= annuli) continue;
      sum[k] += stamp.tb(r, c);
      ++cnt[k];
    }
  }

  OrbFunction f;
  f.statistic = OrbStatistic::RAD;
  f.axis = ThresholdAxis::RadiusKm;
  f.thresholds.resize(annuli);
  f.values.resize(annuli);
  f.defined.resize(annuli);
  int empty = 0;
  for (int k = 0; k < annuli; ++k) {
    f.thresholds[k] = k * dr;
    if (cnt[k] == 0) {
      f.values[k] = kNaN;
      f.defined[k] = 0;
      ++empty;
    } else {
      f.values[k] = sum[k] / static_cast<double>(cnt[k]);
      f.defined[k] = 1;
    }
  }
  if (static_cast<double>(empty) > cfg.max_empty_annulus_frac * annuli)
    throw DataError("radial_profile: " + std::to_string(empty) + " of " + std::to_string(annuli) +
                    " annuli empty");
  interpolate_undefined(f.values, f.defined);
  return f;
}

std::vector<std::pair<int, int>> level_set(const Stamp& stamp, double c) {
  std::vector<std::pair<int, int>> out;
  const int n = stamp.size();
  for (int r = 0; r < n; ++r)
    for (int col = 0; col < n; ++col)
      if (!stamp.mask(r, col) && stamp.tb(r, col) <= c) out.emplace_back(r, col);
  return out;
}

LevelSetFunctions level_set_functions(const Stamp& stamp, const StormCenter& center,
                                      const FeatureConfig& cfg) {
  CenterGeometry g = center_geometry(stamp, center);
  const int n = stamp.size();
  const double area = g.dx * g.dy;

  std::vector<double> thresholds;
  for (int j = 0;; ++j) {
    double c = cfg.level_c_min + j * cfg.level_c_step;
    if (c > cfg.level_c_max) break;
    thresholds.push_back(c);
  }
  const std::size_t m = thresholds.size();

  auto make = [&](OrbStatistic s) {
    OrbFunction f;
    f.statistic = s;
    f.axis = ThresholdAxis::TemperatureC;
    f.thresholds = thresholds;
    f.values.assign(m, kNaN);
    f.defined.assign(m, 0);
    return f;
  };
  LevelSetFunctions out{make(OrbStatistic::SIZE), make(OrbStatistic::SKEW),
                        make(OrbStatistic::SHAPE), make(OrbStatistic::ECC)};
  out.skew.skew_direction_deg.assign(m, kNaN);

  Grid<std::uint8_t> member(n, n, 0);
  for (std::size_t j = 0; j < m; ++j) {
    const double c = thresholds[j];
    for (int r = 0; r < n; ++r)
      for (int col = 0; col < n; ++col)
        member(r, col) = (!stamp.mask(r, col) && stamp.tb(r, col) <= c) ? 1 : 0;

    double sum_e = 0, sum_n = 0, sum_d = 0, sum_ee = 0, sum_nn = 0, sum_en = 0, bsum_d = 0;
    std::int64_t cnt = 0, bcnt = 0;
    for (int r = 0; r < n; ++r) {
      for (int col = 0; col < n; ++col) {
        if (!member(r, col)) continue;
        double e = g.east_km(r, col);
        double no = g.north_km(r, col);
        ++cnt;
        sum_e += e;
        sum_n += no;
        sum_d += g.dist_km(r, col);
        sum_ee += e * e;
        sum_nn += no * no;
        sum_en += e * no;
        bool boundary = (r == 0 || !member(r - 1, col)) || (r == n - 1 || !member(r + 1, col)) ||
                        (col == 0 || !member(r, col - 1)) || (col == n - 1 || !member(r, col + 1));
        if (boundary) {
          ++bcnt;
          bsum_d += g.dist_km(r, col);
        }
      }
    }

    out.size.values[j] = static_cast<double>(cnt) * area;
    out.size.defined[j] = 1;
    if (cnt < cfg.level_min_pixels) continue;

    const double dc = static_cast<double>(cnt);
    double ce = sum_e / dc;
    double cn = sum_n / dc;
    double mean_d = sum_d / dc;
    double offset = std::sqrt(ce * ce + cn * cn);
    out.skew.values[j] = offset / mean_d;
    out.skew.defined[j] = 1;
    if (offset > 0) out.skew.skew_direction_deg[j] = azimuth_deg(ce, cn);

    out.shape.values[j] = (bsum_d / static_cast<double>(bcnt)) / mean_d;
    out.shape.defined[j] = 1;

    double vee = sum_ee / dc - ce * ce;
    double vnn = sum_nn / dc - cn * cn;
    double ven = sum_en / dc - ce * cn;
    double disc = std::sqrt((vee - vnn) * (vee - vnn) + 4.0 * ven * ven);
    double l1 = (vee + vnn + disc) / 2.0;
    double l2 = (vee + vnn - disc) / 2.0;
    out.ecc.values[j] = l1 > 0 ? 1.0 - l2 / l1 : 0.0;
    out.ecc.defined[j] = 1;
  }

  interpolate_undefined(out.skew.values, out.skew.defined);
  interpolate_undefined(out.shape.values, out.shape.defined);
  interpolate_undefined(out.ecc.values, out.ecc.defined);
  return out;
}

OrbFunction size_fn(const Stamp& s, const StormCenter& c, const FeatureConfig& cfg) {
  return level_set_functions(s, c, cfg).size;
}
OrbFunction skew_fn(const Stamp& s, const StormCenter& c, const FeatureConfig& cfg) {
  return level_set_functions(s, c, cfg).skew;
}
OrbFunction shape_fn(const Stamp& s, const StormCenter& c, const FeatureConfig& cfg) {
  return level_set_functions(s, c, cfg).shape;
}
OrbFunction ecc_fn(const Stamp& s, const StormCenter& c, const FeatureConfig& cfg) {
  return level_set_functions(s, c, cfg).ecc;
}

const OrbFunction& StampFeatures::get(OrbStatistic s) const {
  switch (s) {
    case OrbStatistic::DAV: return dav;
    case OrbStatistic::RAD: return rad;
    case OrbStatistic::SIZE: return size;
    case OrbStatistic::SKEW: return skew;
    case OrbStatistic::SHAPE: return shape;
    case OrbStatistic::ECC: return ecc;
  }
  throw ValidationError("bad OrbStatistic");
}

StampFeatures extract_features(const Stamp& stamp, const FeatureConfig& cfg) {
  StampFeatures out;
  out.center = find_center(stamp, cfg);
  out.dav = dav(stamp, out.center, cfg);
  out.rad = radial_profile(stamp, out.center, cfg);
  LevelSetFunctions ls = level_set_functions(stamp, out.center, cfg);
  out.size = std::move(ls.size);
  out.skew = std::move(ls.skew);
  out.shape = std::move(ls.shape);
  out.ecc = std::move(ls.ecc);
  return out;
}

void write_orb_csv(const OrbFunction& f, const std::filesystem::path& path) {
  CsvTable t;
  const bool dir = f.statistic == OrbStatistic::SKEW;
  t.header = {"threshold", "value", "defined"};
  if (dir) t.header.push_back("direction");
  for (std::size_t i = 0; i < f.thresholds.size(); ++i) {
    std::vector<std::string> row = {format_double(f.thresholds[i]), format_double(f.values[i]),
                                    f.defined[i] ? "1" : "0"};
    if (dir) row.push_back(format_double(f.skew_direction_deg[i]));
    t.rows.push_back(std::move(row));
  }
  write_csv(t, path);
}

OrbFunction read_orb_csv(const std::filesystem::path& path, OrbStatistic statistic) {
  CsvTable t = read_csv(path);
  const bool dir = statistic == OrbStatistic::SKEW;
  std::vector<std::string> expected = {"threshold", "value", "defined"};
  if (dir) expected.push_back("direction");
  if (t.header != expected) throw ParseError("header", "ORB CSV header mismatch in " + path.string());

  OrbFunction f;
  f.statistic = statistic;
  f.axis = (statistic == OrbStatistic::DAV || statistic == OrbStatistic::RAD)
               ? ThresholdAxis::RadiusKm
               : ThresholdAxis::TemperatureC;
  for (const auto& row : t.rows) {
    f.thresholds.push_back(parse_double(row[0], "threshold"));
    f.values.push_back(parse_double(row[1], "value"));
    f.defined.push_back(row[2] == "1" ? 1 : 0);
    if (dir) f.skew_direction_deg.push_back(parse_double(row[3], "direction"));
  }
  for (std::size_t i = 1; i < f.thresholds.size(); ++i)
    if (!(f.thresholds[i] > f.thresholds[i - 1]))
      throw ParseError("threshold", "thresholds not strictly increasing in " + path.string());
  return f;
}

}  // namespace orb
