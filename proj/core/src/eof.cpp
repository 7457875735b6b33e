#include "orb/eof.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include "orb/errors.hpp"

namespace orb {

EofBasis fit_basis(const std::vector<double>& thresholds,
                   const std::vector<std::vector<double>>& curves, double var_target,
                   std::optional<int> k_override) {
  const std::size_t n = curves.size();
  const std::size_t d = thresholds.size();
  if (n < 2) throw ValidationError("fit_basis: need at least 2 curves");
  if (!(var_target > 0.0 && var_target <= 1.0))
    throw ValidationError("fit_basis: var_target must be in (0, 1]");
  for (const auto& c : curves) {
    if (c.size() != d) throw ValidationError("fit_basis: curve length mismatch with threshold grid");
    for (double v : c)
      if (!std::isfinite(v)) throw ValidationError("fit_basis: undefined entry in curve");
  }

  Eigen::MatrixXd z(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) z(i, j) = curves[i][j];

  EofBasis basis;
  basis.thresholds = thresholds;
  basis.mean_curve.resize(d);
  Eigen::RowVectorXd mean = z.colwise().mean();
  for (std::size_t j = 0; j < d; ++j) basis.mean_curve[j] = mean(j);
  z.rowwise() -= mean;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(z, Eigen::ComputeThinV);
  const Eigen::VectorXd& a = svd.singularValues();
  double total = a.squaredNorm();
  if (total <= 0.0 || a(0) <= 0.0)
    throw DataError("fit_basis: degenerate data (all curves equal, zero variance)");

  const double rank_tol = a(0) * std::max(n, d) * 1e-14;
  int rank = 0;
  for (int i = 0; i < a.size(); ++i)
    if (a(i) > rank_tol) ++rank;

  int k;
  if (k_override) {
    k = *k_override;
    if (k < 1) throw ValidationError("fit_basis: k_override must be >= 1");
    if (k > rank)
      throw DataError("fit_basis: rank-deficient input, rank " + std::to_string(rank) +
                      " < requested K " + std::to_string(k));
  } else {
    double cum = 0.0;
    k = 0;
    for (int i = 0; i < a.size() && k < rank; ++i) {
      cum += a(i) * a(i) / total;
      ++k;
      if (cum >= var_target) break;
    }
  }

  basis.eofs.resize(k, std::vector<double>(d));
  basis.explained_variance.resize(k);
  for (int i = 0; i < k; ++i) {
    basis.explained_variance[i] = a(i) * a(i) / total;
    // Sign convention: the largest-magnitude entry is positive.
    int arg = 0;
    double best = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      double mag = std::abs(svd.matrixV()(j, i));
      if (mag > best) {
        best = mag;
        arg = static_cast<int>(j);
      }
    }
    double sign = svd.matrixV()(arg, i) < 0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < d; ++j) basis.eofs[i][j] = sign * svd.matrixV()(j, i);
  }
  return basis;
}

namespace {

void check_grid(const std::vector<double>& curve, const EofBasis& basis) {
  if (curve.size() != basis.thresholds.size())
    throw ValidationError("project: curve length " + std::to_string(curve.size()) +
                          " != basis grid length " + std::to_string(basis.thresholds.size()));
}

}  // namespace

std::vector<double> project(const std::vector<double>& curve, const EofBasis& basis) {
  check_grid(curve, basis);
  std::vector<double> alpha(basis.eofs.size(), 0.0);
  for (std::size_t i = 0; i < basis.eofs.size(); ++i) {
    double dot = 0.0;
    for (std::size_t j = 0; j < curve.size(); ++j)
      dot += (curve[j] - basis.mean_curve[j]) * basis.eofs[i][j];
    alpha[i] = dot;
  }
  return alpha;
}

std::vector<double> reconstruct(const std::vector<double>& alpha, const EofBasis& basis) {
  if (alpha.size() != basis.eofs.size())
    throw ValidationError("reconstruct: alpha length " + std::to_string(alpha.size()) +
                          " != basis K " + std::to_string(basis.eofs.size()));
  std::vector<double> out = basis.mean_curve;
  for (std::size_t i = 0; i < alpha.size(); ++i)
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += alpha[i] * basis.eofs[i][j];
  return out;
}

double roughness(const std::vector<double>& values, double step_hours) {
  if (values.size() < 3) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 1; i + 1 < values.size(); ++i)
    sum += std::abs(values[i - 1] - 2.0 * values[i] + values[i + 1]);
  return sum / static_cast<double>(values.size() - 2) / (step_hours * step_hours);
}

SmoothResult smooth_coefficients(const std::vector<double>& values, double step_hours,
                                 double roughness_target) {
  if (values.size() < 3) throw ValidationError("smooth_coefficients: need >= 3 points");
  if (step_hours < 1.0) throw ValidationError("smooth_coefficients: series must be hourly or coarser");
  if (roughness_target <= 0) throw ValidationError("smooth_coefficients: target must be > 0");

  const std::size_t n = values.size();
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  double sigma = std::sqrt(var / static_cast<double>(n));

  const double target_abs = roughness_target * sigma;
  if (sigma == 0.0 || roughness(values, step_hours) <= target_abs)
    return {values, true, 1.0};

  auto ewma = [&](double decay) {
    std::vector<double> s(n);
    s[0] = values[0];
    for (std::size_t i = 1; i < n; ++i) s[i] = (1.0 - decay) * s[i - 1] + decay * values[i];
    return s;
  };

  double lo = 0.0, hi = 1.0;
  std::vector<double> smoothed;
  for (int iter = 0; iter < 80; ++iter) {
    double mid = 0.5 * (lo + hi);
    smoothed = ewma(mid);
    if (roughness(smoothed, step_hours) > target_abs)
      hi = mid;
    else
      lo = mid;
  }
  double decay = 0.5 * (lo + hi);
  return {ewma(decay), false, decay};
}

void write_basis_json(const EofBasis& basis, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["format"] = "orb-basis";
  j["version"] = 1;
  j["statistic"] = statistic_name(basis.statistic);
  j["basin"] = basin_name(basis.basin);
  j["k"] = basis.k();
  j["thresholds"] = basis.thresholds;
  j["mean_curve"] = basis.mean_curve;
  j["explained_variance"] = basis.explained_variance;
  j["eofs"] = basis.eofs;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write basis file: " + path.string());
  out << j.dump(2) << "\n";
}

EofBasis read_basis_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open basis file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("basis", std::string("invalid basis JSON: ") + e.what());
  }
  if (!j.contains("format") || j["format"] != "orb-basis")
    throw ParseError("format", "not an orb-basis file: " + path.string());
  EofBasis b;
  b.statistic = parse_statistic(j.at("statistic").get<std::string>());
  b.basin = parse_basin(j.at("basin").get<std::string>());
  b.thresholds = j.at("thresholds").get<std::vector<double>>();
  b.mean_curve = j.at("mean_curve").get<std::vector<double>>();
  b.explained_variance = j.at("explained_variance").get<std::vector<double>>();
  b.eofs = j.at("eofs").get<std::vector<std::vector<double>>>();
  if (b.mean_curve.size() != b.thresholds.size())
    throw ParseError("mean_curve", "length mismatch in " + path.string());
  for (const auto& e : b.eofs)
    if (e.size() != b.thresholds.size()) throw ParseError("eofs", "row length mismatch");
  if (b.explained_variance.size() != b.eofs.size())
    throw ParseError("explained_variance", "length mismatch");
  return b;
}

}  // namespace orb
