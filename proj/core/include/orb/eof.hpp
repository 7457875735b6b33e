#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "orb/features.hpp"
#include "orb/track.hpp"

namespace orb {

/// Per-basin, per-statistic EOF basis: the basin sample mean curve plus
/// ordered orthonormal EOF rows and their explained-variance fractions.
///
/// Sign convention: each EOF's entry of largest magnitude is positive, making
/// the (sign-arbitrary) SVD output deterministic.
struct EofBasis {
  OrbStatistic statistic{};
  Basin basin = Basin::NAL;
  std::vector<double> thresholds;
  std::vector<double> mean_curve;
  std::vector<std::vector<double>> eofs;     // K x d, orthonormal rows
  std::vector<double> explained_variance;    // length K, non-increasing fractions

  int k() const { return static_cast<int>(eofs.size()); }
};

/// Fits an EOF basis from n curves sampled on a shared threshold grid.
/// Centers columns, takes the SVD of the centered matrix, and keeps the
/// smallest K whose cumulative explained variance reaches var_target
/// (or exactly k_override EOFs when given). Throws DataError on zero-variance
/// input and when k_override exceeds the matrix rank.
EofBasis fit_basis(const std::vector<double>& thresholds,
                   const std::vector<std::vector<double>>& curves, double var_target = 0.90,
                   std::optional<int> k_override = std::nullopt);

/// alpha_i = <curve - mean_curve, eof_i>. Throws on grid mismatch.
std::vector<double> project(const std::vector<double>& curve, const EofBasis& basis);

/// mean_curve + sum alpha_i * eof_i. Throws on length mismatch.
std::vector<double> reconstruct(const std::vector<double>& alpha, const EofBasis& basis);

struct SmoothResult {
  std::vector<double> values;
  bool already_smooth = false;  // input returned unchanged
  double decay = 1.0;           // EWMA decay actually used
};

/// Causal exponentially weighted moving average whose decay is chosen by
/// bisection so the mean |second difference| per hour^2, in units of the
/// series' standard deviation, matches roughness_target. A series already
/// smoother than the target is returned unchanged with already_smooth set.
SmoothResult smooth_coefficients(const std::vector<double>& values, double step_hours,
                                 double roughness_target = 0.2);

/// Mean |d^2 f / dt^2| by second central differences, in value units per hr^2.
double roughness(const std::vector<double>& values, double step_hours);

void write_basis_json(const EofBasis& basis, const std::filesystem::path& path);
EofBasis read_basis_json(const std::filesystem::path& path);

}  // namespace orb
