// Test-side brute-force oracles. Everything here recomputes results directly
// from raw inputs, independent of the library's implementation paths, using
// the same pinned formulas (row-major accumulation, equirectangular geometry,
// E[x^2]-E[x]^2 variance).
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "orb/stamp.hpp"

namespace oracle {

constexpr double kPi = 3.14159265358979323846;

struct PixelFrame {
  double dx, dy;
  double center_row, center_col;
};

inline PixelFrame frame_of(const orb::Stamp& s, double center_row, double center_col) {
  double dy = 111.32 * s.grid_step;
  double dx = 111.32 * s.grid_step * std::cos(s.center_lat * kPi / 180.0);
  return {dx, dy, center_row, center_col};
}

inline double east_of(const PixelFrame& f, int c) { return (c - f.center_col) * f.dx; }
inline double north_of(const PixelFrame& f, int r) { return (f.center_row - r) * f.dy; }
inline double dist_of(const PixelFrame& f, int r, int c) {
  double e = east_of(f, c), n = north_of(f, r);
  return std::sqrt(e * e + n * n);
}

/// Deviation angle at one pixel: central differences (one-sided at edges),
/// undefined on masked stencils, gradients below the floor, or at the center.
inline std::optional<double> psi_at(const orb::Stamp& s, const PixelFrame& f, int r, int c,
                                    double grad_floor) {
  const int n = s.size();
  if (s.mask(r, c)) return std::nullopt;
  auto masked = [&](int rr, int cc) { return s.mask(rr, cc) != 0; };
  double ge;
  if (c > 0 && c < n - 1) {
    if (masked(r, c - 1) || masked(r, c + 1)) return std::nullopt;
    ge = (static_cast<double>(s.tb(r, c + 1)) - s.tb(r, c - 1)) / (2.0 * f.dx);
  } else if (c == 0) {
    if (masked(r, c + 1)) return std::nullopt;
    ge = (static_cast<double>(s.tb(r, c + 1)) - s.tb(r, c)) / f.dx;
  } else {
    if (masked(r, c - 1)) return std::nullopt;
    ge = (static_cast<double>(s.tb(r, c)) - s.tb(r, c - 1)) / f.dx;
  }
  double gn;
  if (r > 0 && r < n - 1) {
    if (masked(r - 1, c) || masked(r + 1, c)) return std::nullopt;
    gn = (static_cast<double>(s.tb(r - 1, c)) - s.tb(r + 1, c)) / (2.0 * f.dy);
  } else if (r == 0) {
    if (masked(r + 1, c)) return std::nullopt;
    gn = (static_cast<double>(s.tb(r, c)) - s.tb(r + 1, c)) / f.dy;
  } else {
    if (masked(r - 1, c)) return std::nullopt;
    gn = (static_cast<double>(s.tb(r - 1, c)) - s.tb(r, c)) / f.dy;
  }
  if (std::sqrt(ge * ge + gn * gn) < grad_floor) return std::nullopt;
  double re = east_of(f, c), rn = north_of(f, r);
  if (re == 0.0 && rn == 0.0) return std::nullopt;
  double a = std::atan2(ge * rn - gn * re, ge * re + gn * rn);
  if (a > kPi / 2.0) a -= kPi;
  if (a <= -kPi / 2.0) a += kPi;
  return a * 180.0 / kPi;
}

/// DAV(r): population variance of psi over pixels within distance r.
inline double dav_at(const orb::Stamp& s, const PixelFrame& f, double radius_km,
                     double grad_floor = 1e-6) {
  double sum = 0.0, sumsq = 0.0;
  std::int64_t cnt = 0;
  const int n = s.size();
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      if (dist_of(f, r, c) > radius_km) continue;
      auto p = psi_at(s, f, r, c, grad_floor);
      if (!p) continue;
      sum += *p;
      sumsq += *p * *p;
      ++cnt;
    }
  double mean = sum / static_cast<double>(cnt);
  return sumsq / static_cast<double>(cnt) - mean * mean;
}

/// Mean tb over the annulus [r0, r0 + dr) via floor(dist/dr) bucketing.
inline std::optional<double> rad_annulus(const orb::Stamp& s, const PixelFrame& f, int annulus,
                                         double dr) {
  double sum = 0.0;
  std::int64_t cnt = 0;
  const int n = s.size();
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      if (s.mask(r, c)) continue;
      if (static_cast<int>(dist_of(f, r, c) / dr) != annulus) continue;
      sum += s.tb(r, c);
      ++cnt;
    }
  if (cnt == 0) return std::nullopt;
  return sum / static_cast<double>(cnt);
}

struct LevelStats {
  std::int64_t count = 0;
  double size_km2 = 0.0;
  std::optional<double> skew;
  std::optional<double> skew_direction_deg;
  std::optional<double> shape;
  std::optional<double> ecc;
};

/// SIZE/SKEW/SHAPE/ECC at one threshold by direct row-major scanning.
inline LevelStats level_stats_at(const orb::Stamp& s, const PixelFrame& f, double threshold_c,
                                 int n_min = 10) {
  const int n = s.size();
  auto member = [&](int r, int c) {
    return r >= 0 && r < n && c >= 0 && c < n && !s.mask(r, c) && s.tb(r, c) <= threshold_c;
  };
  double sum_e = 0, sum_n = 0, sum_d = 0, sum_ee = 0, sum_nn = 0, sum_en = 0, bsum_d = 0;
  std::int64_t cnt = 0, bcnt = 0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      if (!member(r, c)) continue;
      double e = east_of(f, c), no = north_of(f, r);
      double d = std::sqrt(e * e + no * no);
      ++cnt;
      sum_e += e;
      sum_n += no;
      sum_d += d;
      sum_ee += e * e;
      sum_nn += no * no;
      sum_en += e * no;
      if (!member(r - 1, c) || !member(r + 1, c) || !member(r, c - 1) || !member(r, c + 1)) {
        ++bcnt;
        bsum_d += d;
      }
    }
  LevelStats out;
  out.count = cnt;
  out.size_km2 = static_cast<double>(cnt) * (f.dx * f.dy);
  if (cnt < n_min) return out;
  double dc = static_cast<double>(cnt);
  double ce = sum_e / dc, cn = sum_n / dc, mean_d = sum_d / dc;
  double offset = std::sqrt(ce * ce + cn * cn);
  out.skew = offset / mean_d;
  if (offset > 0) {
    double a = std::atan2(ce, cn) * 180.0 / kPi;
    if (a < 0) a += 360.0;
    out.skew_direction_deg = a;
  }
  out.shape = (bsum_d / static_cast<double>(bcnt)) / mean_d;
  double vee = sum_ee / dc - ce * ce;
  double vnn = sum_nn / dc - cn * cn;
  double ven = sum_en / dc - ce * cn;
  double disc = std::sqrt((vee - vnn) * (vee - vnn) + 4.0 * ven * ven);
  double l1 = (vee + vnn + disc) / 2.0, l2 = (vee + vnn - disc) / 2.0;
  out.ecc = l1 > 0 ? 1.0 - l2 / l1 : 0.0;
  return out;
}

/// Cyclic Jacobi eigensolver for a symmetric matrix; returns eigenvalues in
/// descending order and matching eigenvectors as rows.
struct EigenResult {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
};

inline EigenResult jacobi_eigen(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 200; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });
  EigenResult out;
  out.values.resize(n);
  out.vectors.assign(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = a[order[i]][order[i]];
    for (std::size_t k = 0; k < n; ++k) out.vectors[i][k] = v[k][order[i]];
  }
  return out;
}

/// Unpenalized logistic MLE by damped Newton with Gaussian elimination.
/// Returns (intercept, beta) or nullopt when the Hessian goes singular.
inline std::optional<std::vector<double>> newton_logistic(
    const std::vector<std::vector<double>>& rows, const std::vector<int>& y, int max_iter = 200) {
  const std::size_t n = rows.size();
  const std::size_t d = rows[0].size();
  const std::size_t m = d + 1;  // intercept first
  std::vector<double> beta(m, 0.0);
  for (int iter = 0; iter < max_iter; ++iter) {
    std::vector<double> grad(m, 0.0);
    std::vector<std::vector<double>> hess(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      double eta = beta[0];
      for (std::size_t j = 0; j < d; ++j) eta += beta[j + 1] * rows[i][j];
      double p = 1.0 / (1.0 + std::exp(-eta));
      double w = p * (1.0 - p);
      double res = y[i] - p;
      grad[0] += res;
      for (std::size_t j = 0; j < d; ++j) grad[j + 1] += res * rows[i][j];
      hess[0][0] += w;
      for (std::size_t j = 0; j < d; ++j) {
        hess[0][j + 1] += w * rows[i][j];
        hess[j + 1][0] += w * rows[i][j];
        for (std::size_t k = 0; k < d; ++k) hess[j + 1][k + 1] += w * rows[i][j] * rows[i][k];
      }
    }
    // Solve hess * step = grad with partial pivoting.
    std::vector<std::vector<double>> a = hess;
    std::vector<double> b = grad;
    for (std::size_t col = 0; col < m; ++col) {
      std::size_t pivot = col;
      for (std::size_t r = col + 1; r < m; ++r)
        if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
      if (std::abs(a[pivot][col]) < 1e-12) return std::nullopt;
      std::swap(a[col], a[pivot]);
      std::swap(b[col], b[pivot]);
      for (std::size_t r = 0; r < m; ++r) {
        if (r == col) continue;
        double factor = a[r][col] / a[col][col];
        for (std::size_t k = col; k < m; ++k) a[r][k] -= factor * a[col][k];
        b[r] -= factor * b[col];
      }
    }
    double max_step = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double step = b[j] / a[j][j];
      beta[j] += step;
      max_step = std::max(max_step, std::abs(step));
    }
    if (max_step < 1e-12) return beta;
  }
  return beta;
}

/// Exhaustive RI/RW labeling over every complete 24-h window.
inline void brute_force_labels(const std::vector<std::int64_t>& hours,
                               const std::vector<double>& v, double threshold,
                               std::vector<int>& ri, std::vector<int>& rw) {
  const std::size_t n = hours.size();
  ri.assign(n, 0);
  rw.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (hours[j] - hours[i] != 24) continue;
      bool complete = true;
      for (int step = 6; step < 24; step += 6) {
        bool found = false;
        for (std::size_t k = i; k <= j; ++k) found |= (hours[k] == hours[i] + step);
        complete &= found;
      }
      if (!complete) continue;
      double change = v[j] - v[i];
      if (change >= threshold)
        for (std::size_t k = i; k <= j; ++k)
          if (hours[k] >= hours[i] && hours[k] <= hours[j]) ri[k] = 1;
      if (change <= -threshold)
        for (std::size_t k = i; k <= j; ++k)
          if (hours[k] >= hours[i] && hours[k] <= hours[j]) rw[k] = 1;
    }
  }
}

/// Mann-Whitney AUC numerator: 2*wins + ties, over all pos/neg pairs.
inline std::int64_t pair_count_auc_numerator(const std::vector<double>& p,
                                             const std::vector<int>& y, std::int64_t& n_pos,
                                             std::int64_t& n_neg) {
  n_pos = 0;
  n_neg = 0;
  std::int64_t num = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!y[i]) continue;
    ++n_pos;
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (y[j]) continue;
      if (p[i] > p[j])
        num += 2;
      else if (p[i] == p[j])
        num += 1;
    }
  }
  for (int v : y) n_neg += (v == 0);
  return num;
}

/// Dominant period (in sample steps) of a detrended series by direct DFT.
inline double dominant_period_steps(const std::vector<double>& v) {
  const std::size_t n = v.size();
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(n);
  double best_power = -1.0;
  std::size_t best_k = 1;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      double phase = -2.0 * kPi * static_cast<double>(k * t) / static_cast<double>(n);
      acc += (v[t] - mean) * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    double power = std::norm(acc);
    if (power > best_power) {
      best_power = power;
      best_k = k;
    }
  }
  return static_cast<double>(n) / static_cast<double>(best_k);
}

}  // namespace oracle
