#include "orb/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "orb/errors.hpp"
#include "orb/manifest.hpp"
#include "orb/rng.hpp"

namespace orb {

namespace {

constexpr double kOuterTol = 1e-7;
constexpr double kInnerTol = 1e-10;
constexpr int kMaxOuter = 200;
constexpr int kMaxSweeps = 2000;
constexpr double kProbEps = 1e-5;  // working-weight clamp
constexpr double kBetaCap = 1e2;   // beyond this the fit is diverging

double sigmoid(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

double soft_threshold(double rho, double lambda) {
  if (rho > lambda) return rho - lambda;
  if (rho < -lambda) return rho + lambda;
  return 0.0;
}

void check_labels(const std::vector<int>& y) {
  bool has0 = false, has1 = false;
  for (int v : y) {
    if (v == 0)
      has0 = true;
    else if (v == 1)
      has1 = true;
    else
      throw ValidationError("labels must be 0 or 1");
  }
  if (!has0 || !has1) throw DataError("both classes must be present");
}

}  // namespace

DesignMatrix DesignMatrix::from_dataset(const Dataset& dataset, const std::vector<std::string>& cols,
                                        std::optional<Split> split) {
  DesignMatrix x;
  x.columns = cols;
  std::vector<int> idx;
  for (const auto& c : cols) {
    int j = dataset.column(c);
    if (j < 0) throw ValidationError("dataset is missing predictor column '" + c + "'");
    idx.push_back(j);
  }
  std::vector<const LabeledObservation*> rows;
  for (const auto& r : dataset.rows)
    if (!split || r.split == *split) rows.push_back(&r);
  x.n_rows = rows.size();
  x.data.resize(x.n_rows * cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < rows.size(); ++i)
      x.data[j * x.n_rows + i] = rows[i]->values[static_cast<std::size_t>(idx[j])];
  return x;
}

std::vector<int> dataset_labels(const Dataset& dataset, const std::string& target,
                                std::optional<Split> split) {
  if (target != "RI" && target != "RW")
    throw ValidationError("target must be RI or RW, got '" + target + "'");
  std::vector<int> y;
  for (const auto& r : dataset.rows)
    if (!split || r.split == *split) y.push_back(target == "RI" ? r.y_ri : r.y_rw);
  return y;
}

std::vector<std::string> dataset_storms(const Dataset& dataset, std::optional<Split> split) {
  std::vector<std::string> s;
  for (const auto& r : dataset.rows)
    if (!split || r.split == *split) s.push_back(r.storm_id);
  return s;
}

std::size_t Standardization::n_kept() const {
  std::size_t n = 0;
  for (auto k : kept) n += k;
  return n;
}

Standardization fit_standardization(const DesignMatrix& x) {
  if (x.n_rows == 0) throw ValidationError("fit_standardization: empty matrix");
  Standardization s;
  s.columns = x.columns;
  s.mean.resize(x.n_cols());
  s.sd.resize(x.n_cols());
  s.kept.resize(x.n_cols());
  const double n = static_cast<double>(x.n_rows);
  for (std::size_t j = 0; j < x.n_cols(); ++j) {
    const double* col = x.col(j);
    double sum = 0.0;
    for (std::size_t i = 0; i < x.n_rows; ++i) sum += col[i];
    double mean = sum / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.n_rows; ++i) ss += (col[i] - mean) * (col[i] - mean);
    double sd = std::sqrt(ss / n);  // population sd
    s.mean[j] = mean;
    s.sd[j] = sd;
    s.kept[j] = sd > 0.0 ? 1 : 0;
  }
  return s;
}

DesignMatrix apply_standardization(const DesignMatrix& x, const Standardization& params) {
  if (x.columns != params.columns)
    throw ValidationError("apply_standardization: column mismatch with fitted parameters");
  DesignMatrix out;
  out.n_rows = x.n_rows;
  for (std::size_t j = 0; j < x.n_cols(); ++j) {
    if (!params.kept[j]) continue;
    out.columns.push_back(x.columns[j]);
    for (std::size_t i = 0; i < x.n_rows; ++i)
      out.data.push_back((x.at(i, j) - params.mean[j]) / params.sd[j]);
  }
  return out;
}

double penalized_log_likelihood(const DesignMatrix& x_std, const std::vector<int>& y,
                                const LassoFit& fit, double lambda) {
  double ll = 0.0;
  for (std::size_t i = 0; i < x_std.n_rows; ++i) {
    double eta = fit.intercept;
    for (std::size_t j = 0; j < x_std.n_cols(); ++j) eta += x_std.at(i, j) * fit.beta[j];
    // y*eta - log(1 + e^eta), computed stably
    ll += y[i] * eta - (eta > 30 ? eta : std::log1p(std::exp(eta)));
  }
  double penalty = 0.0;
  for (double b : fit.beta) penalty += std::abs(b);
  return ll - lambda * penalty;
}

double lambda_max(const DesignMatrix& x_std, const std::vector<int>& y) {
  check_labels(y);
  double ybar = 0.0;
  for (int v : y) ybar += v;
  ybar /= static_cast<double>(y.size());
  double best = 0.0;
  for (std::size_t j = 0; j < x_std.n_cols(); ++j) {
    const double* col = x_std.col(j);
    double g = 0.0;
    for (std::size_t i = 0; i < x_std.n_rows; ++i) g += col[i] * (y[i] - ybar);
    best = std::max(best, std::abs(g));
  }
  return best;
}

std::vector<double> lambda_grid(double lmax, int points, double min_ratio) {
  if (points < 2) throw ValidationError("lambda_grid: need >= 2 points");
  if (lmax <= 0) throw ValidationError("lambda_grid: lambda_max must be positive");
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = lmax * std::pow(min_ratio, static_cast<double>(i) / (points - 1));
  return grid;
}

LassoFit fit_logistic_lasso(const DesignMatrix& x_std, const std::vector<int>& y, double lambda,
                            const LassoFit* warm_start) {
  check_labels(y);
  if (lambda < 0) throw ValidationError("lambda must be >= 0");
  const std::size_t n = x_std.n_rows;
  const std::size_t d = x_std.n_cols();
  if (y.size() != n) throw ValidationError("fit_logistic_lasso: label/row count mismatch");

  double ybar = 0.0;
  for (int v : y) ybar += v;
  ybar /= static_cast<double>(n);

  LassoFit fit;
  fit.beta.assign(d, 0.0);
  fit.intercept = std::log(ybar / (1.0 - ybar));
  if (warm_start && warm_start->beta.size() == d) {
    fit.beta = warm_start->beta;
    fit.intercept = warm_start->intercept;
  }

  std::vector<double> eta(n), eta_prev(n), w(n), z(n), r(n), denom(d);
  std::vector<double> beta_prev(d);

  auto recompute_eta = [&] {
    for (std::size_t i = 0; i < n; ++i) eta[i] = fit.intercept;
    for (std::size_t j = 0; j < d; ++j) {
      if (fit.beta[j] == 0.0) continue;
      const double* col = x_std.col(j);
      for (std::size_t i = 0; i < n; ++i) eta[i] += col[i] * fit.beta[j];
    }
  };
  auto objective_at = [&](const std::vector<double>& linear) {
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      ll += y[i] * linear[i] - (linear[i] > 30 ? linear[i] : std::log1p(std::exp(linear[i])));
    double penalty = 0.0;
    for (double b : fit.beta) penalty += std::abs(b);
    return ll - lambda * penalty;
  };

  recompute_eta();
  double objective_prev = objective_at(eta);

  for (int outer = 0; outer < kMaxOuter; ++outer) {
    fit.outer_iterations = outer + 1;
    beta_prev = fit.beta;
    const double b0_prev = fit.intercept;
    eta_prev = eta;

    // Incremental eta accumulates rounding over many rounds; refresh it.
    if (outer % 16 == 15) recompute_eta();

    // Quadratic approximation at the current point.
    double wsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double p = sigmoid(eta[i]);
      if (p < kProbEps) {
        p = 0.0;
        w[i] = kProbEps;
      } else if (p > 1.0 - kProbEps) {
        p = 1.0;
        w[i] = kProbEps;
      } else {
        w[i] = p * (1.0 - p);
      }
      z[i] = eta[i] + (y[i] - p) / w[i];
      r[i] = z[i] - eta[i];
      wsum += w[i];
    }
    for (std::size_t j = 0; j < d; ++j) {
      const double* col = x_std.col(j);
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += w[i] * col[i] * col[i];
      denom[j] = s;
    }

    // Inner cyclic coordinate descent, alternating full sweeps with
    // active-set sweeps.
    auto sweep = [&](bool active_only) {
      double dmax = 0.0;
      double d0 = 0.0;
      for (std::size_t i = 0; i < n; ++i) d0 += w[i] * r[i];
      d0 /= wsum;
      if (d0 != 0.0) {
        fit.intercept += d0;
        for (std::size_t i = 0; i < n; ++i) r[i] -= d0;
        dmax = std::abs(d0);
      }
      for (std::size_t j = 0; j < d; ++j) {
        if (active_only && fit.beta[j] == 0.0) continue;
        if (denom[j] <= 0.0) continue;
        const double* col = x_std.col(j);
        double rho = 0.0;
        for (std::size_t i = 0; i < n; ++i) rho += w[i] * col[i] * r[i];
        rho += denom[j] * fit.beta[j];
        double bj = soft_threshold(rho, lambda) / denom[j];
        double delta = bj - fit.beta[j];
        if (delta != 0.0) {
          fit.beta[j] = bj;
          for (std::size_t i = 0; i < n; ++i) r[i] -= col[i] * delta;
          dmax = std::max(dmax, std::abs(delta));
        }
      }
      return dmax;
    };

    int sweeps = 0;
    for (;;) {
      double dmax = sweep(false);
      ++sweeps;
      if (dmax < kInnerTol || sweeps >= kMaxSweeps) break;
      while (sweeps < kMaxSweeps) {
        double da = sweep(true);
        ++sweeps;
        if (da < kInnerTol) break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) eta[i] = z[i] - r[i];

    // Keep the true penalized objective non-decreasing across rounds.
    double objective = objective_at(eta);
    int halvings = 0;
    while (objective + 1e-12 * (1.0 + std::abs(objective_prev)) < objective_prev &&
           halvings < 30) {
      for (std::size_t j = 0; j < d; ++j) fit.beta[j] = 0.5 * (fit.beta[j] + beta_prev[j]);
      fit.intercept = 0.5 * (fit.intercept + b0_prev);
      for (std::size_t i = 0; i < n; ++i) eta[i] = 0.5 * (eta[i] + eta_prev[i]);
      objective = objective_at(eta);
      ++halvings;
    }
    objective_prev = objective;

    double change = std::abs(fit.intercept - b0_prev);
    for (std::size_t j = 0; j < d; ++j)
      change = std::max(change, std::abs(fit.beta[j] - beta_prev[j]));

    double bmax = std::abs(fit.intercept);
    for (double b : fit.beta) bmax = std::max(bmax, std::abs(b));
    if (bmax > kBetaCap) {
      fit.separation_warning = true;  // diverging fit; advise lambda > 0
      fit.converged = false;
      return fit;
    }
    if (change < kOuterTol) {
      fit.converged = true;
      break;
    }
  }
  if (!fit.converged) fit.separation_warning = true;

  // The unpenalized MLE does not exist under perfect separation; flag it.
  if (lambda == 0.0) {
    recompute_eta();
    double min_pos = std::numeric_limits<double>::infinity();
    double max_neg = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (y[i])
        min_pos = std::min(min_pos, eta[i]);
      else
        max_neg = std::max(max_neg, eta[i]);
    }
    if (min_pos > max_neg) fit.separation_warning = true;
  }
  return fit;
}

CvChoice cv_select_lambda(const DesignMatrix& x_raw, const std::vector<int>& y,
                          const std::vector<std::string>& storm_of_row, int folds,
                          std::uint64_t seed, bool one_se_rule) {
  check_labels(y);
  if (storm_of_row.size() != x_raw.n_rows)
    throw ValidationError("cv_select_lambda: storm list length mismatch");
  std::set<std::string> unique(storm_of_row.begin(), storm_of_row.end());
  if (unique.size() < 2) throw DataError("cv_select_lambda: need at least 2 distinct storms");

  CvChoice choice;
  choice.seed = seed;
  choice.folds_used = folds;
  if (static_cast<int>(unique.size()) < folds) {
    choice.folds_used = static_cast<int>(unique.size());
    choice.reduced_folds = true;
  }

  std::vector<std::string> storms(unique.begin(), unique.end());
  Rng rng(seed);
  rng.shuffle(storms);
  for (std::size_t i = 0; i < storms.size(); ++i)
    choice.fold_of_storm[storms[i]] = static_cast<int>(i % choice.folds_used);

  // Path grid from the full training data.
  Standardization full_std = fit_standardization(x_raw);
  DesignMatrix x_full = apply_standardization(x_raw, full_std);
  choice.path.lambdas = lambda_grid(lambda_max(x_full, y));
  const std::size_t npath = choice.path.lambdas.size();

  std::vector<std::vector<double>> fold_dev(choice.folds_used,
                                            std::vector<double>(npath, std::nan("")));
  for (int f = 0; f < choice.folds_used; ++f) {
    std::vector<std::size_t> train_idx, val_idx;
    for (std::size_t i = 0; i < x_raw.n_rows; ++i) {
      if (choice.fold_of_storm.at(storm_of_row[i]) == f)
        val_idx.push_back(i);
      else
        train_idx.push_back(i);
    }
    if (train_idx.empty() || val_idx.empty()) continue;

    std::vector<int> y_train, y_val;
    for (auto i : train_idx) y_train.push_back(y[i]);
    for (auto i : val_idx) y_val.push_back(y[i]);
    bool has0 = false, has1 = false;
    for (int v : y_train) (v ? has1 : has0) = true;
    if (!has0 || !has1) continue;  // degenerate fold, excluded from the mean

    auto take = [&](const std::vector<std::size_t>& idx) {
      DesignMatrix m;
      m.columns = x_raw.columns;
      m.n_rows = idx.size();
      m.data.resize(idx.size() * x_raw.n_cols());
      for (std::size_t j = 0; j < x_raw.n_cols(); ++j)
        for (std::size_t k = 0; k < idx.size(); ++k) m.data[j * m.n_rows + k] = x_raw.at(idx[k], j);
      return m;
    };
    DesignMatrix x_train_raw = take(train_idx);
    DesignMatrix x_val_raw = take(val_idx);
    Standardization fold_std = fit_standardization(x_train_raw);
    DesignMatrix x_train = apply_standardization(x_train_raw, fold_std);
    DesignMatrix x_val = apply_standardization(x_val_raw, fold_std);

    LassoFit warm;
    for (std::size_t li = 0; li < npath; ++li) {
      LassoFit fit = fit_logistic_lasso(x_train, y_train, choice.path.lambdas[li],
                                        li == 0 ? nullptr : &warm);
      warm = fit;
      double dev = 0.0;
      for (std::size_t k = 0; k < val_idx.size(); ++k) {
        double eta = fit.intercept;
        for (std::size_t j = 0; j < x_val.n_cols(); ++j) eta += x_val.at(k, j) * fit.beta[j];
        double p = std::clamp(1.0 / (1.0 + std::exp(-eta)), 1e-12, 1.0 - 1e-12);
        dev += y_val[k] ? -2.0 * std::log(p) : -2.0 * std::log(1.0 - p);
      }
      fold_dev[f][li] = dev / static_cast<double>(val_idx.size());
    }
  }

  choice.path.cv_mean.assign(npath, std::nan(""));
  choice.path.cv_se.assign(npath, std::nan(""));
  bool any = false;
  for (std::size_t li = 0; li < npath; ++li) {
    std::vector<double> devs;
    for (int f = 0; f < choice.folds_used; ++f)
      if (!std::isnan(fold_dev[f][li])) devs.push_back(fold_dev[f][li]);
    if (devs.empty()) continue;
    any = true;
    double mean = 0.0;
    for (double v : devs) mean += v;
    mean /= static_cast<double>(devs.size());
    double ss = 0.0;
    for (double v : devs) ss += (v - mean) * (v - mean);
    double se = devs.size() > 1
                    ? std::sqrt(ss / static_cast<double>(devs.size() - 1)) /
                          std::sqrt(static_cast<double>(devs.size()))
                    : 0.0;
    choice.path.cv_mean[li] = mean;
    choice.path.cv_se[li] = se;
  }
  if (!any) throw DataError("cv_select_lambda: every fold was degenerate");

  std::size_t best = 0;
  double best_dev = std::numeric_limits<double>::infinity();
  for (std::size_t li = 0; li < npath; ++li) {
    double m = choice.path.cv_mean[li];
    if (!std::isnan(m) && m < best_dev) {
      best_dev = m;
      best = li;
    }
  }
  std::size_t chosen = best;
  if (one_se_rule) {
    double limit = best_dev + choice.path.cv_se[best];
    for (std::size_t li = 0; li <= best; ++li) {
      if (!std::isnan(choice.path.cv_mean[li]) && choice.path.cv_mean[li] <= limit) {
        chosen = li;  // largest lambda within one SE
        break;
      }
    }
  }
  choice.path.chosen = chosen;
  choice.lambda = choice.path.lambdas[chosen];
  return choice;
}

std::vector<double> predict_proba(const FittedModel& model, const DesignMatrix& x_raw) {
  DesignMatrix x = apply_standardization(x_raw, model.standardization);
  std::vector<double> beta(x.n_cols(), 0.0);
  for (std::size_t j = 0; j < x.n_cols(); ++j) {
    auto it = model.coefficients.find(x.columns[j]);
    if (it != model.coefficients.end()) beta[j] = it->second;
  }
  std::vector<double> p(x.n_rows);
  for (std::size_t i = 0; i < x.n_rows; ++i) {
    double eta = model.intercept;
    for (std::size_t j = 0; j < x.n_cols(); ++j)
      if (beta[j] != 0.0) eta += x.at(i, j) * beta[j];
    p[i] = sigmoid(eta);
  }
  return p;
}

double balanced_accuracy(const std::vector<double>& p, const std::vector<int>& y, double cutoff) {
  if (p.size() != y.size()) throw ValidationError("balanced_accuracy: length mismatch");
  std::size_t tp = 0, fn = 0, tn = 0, fp = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    bool pred = p[i] > cutoff;
    if (y[i]) {
      (pred ? tp : fn) += 1;
    } else {
      (pred ? fp : tn) += 1;
    }
  }
  if (tp + fn == 0 || tn + fp == 0) throw DataError("balanced_accuracy: single-class labels");
  double tpr = static_cast<double>(tp) / static_cast<double>(tp + fn);
  double tnr = static_cast<double>(tn) / static_cast<double>(tn + fp);
  return 0.5 * (tpr + tnr);
}

CutoffChoice choose_cutoff(const std::vector<double>& p, const std::vector<int>& y) {
  check_labels(y);
  std::vector<double> distinct = p;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<double> candidates;
  candidates.push_back(0.5 * (0.0 + distinct.front()));
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i)
    candidates.push_back(0.5 * (distinct[i] + distinct[i + 1]));
  candidates.push_back(0.5 * (distinct.back() + 1.0));

  CutoffChoice out;
  out.balanced_accuracy = -1.0;
  for (double c : candidates) {
    double ba = balanced_accuracy(p, y, c);
    if (ba >= out.balanced_accuracy) {  // >= breaks ties toward the larger cutoff
      out.balanced_accuracy = ba;
      out.p_star = c;
    }
  }
  return out;
}

FittedModel train_model(const Dataset& dataset, PredictorSetId set, const std::string& target,
                        std::uint64_t seed, const TrainOptions& options) {
  auto cols = predictor_columns(set);
  DesignMatrix x_raw = DesignMatrix::from_dataset(dataset, cols, Split::Train);
  std::vector<int> y = dataset_labels(dataset, target, Split::Train);
  std::vector<std::string> storms = dataset_storms(dataset, Split::Train);
  if (x_raw.n_rows == 0) throw DataError("train_model: no training rows");

  CvChoice cv = cv_select_lambda(x_raw, y, storms, options.folds, seed, options.one_se_rule);

  Standardization std_params = fit_standardization(x_raw);
  DesignMatrix x_std = apply_standardization(x_raw, std_params);
  // Warm-start down the path to the chosen lambda for a stable final fit.
  LassoFit fit;
  for (std::size_t li = 0; li <= cv.path.chosen; ++li)
    fit = fit_logistic_lasso(x_std, y, cv.path.lambdas[li], li == 0 ? nullptr : &fit);

  FittedModel model;
  model.predictor_set = predictor_set_name(set);
  model.target = target;
  model.intercept = fit.intercept;
  model.lambda = cv.lambda;
  model.standardization = std_params;
  model.seed = seed;
  model.separation_warning = fit.separation_warning;
  for (std::size_t j = 0; j < x_std.n_cols(); ++j)
    if (fit.beta[j] != 0.0) model.coefficients[x_std.columns[j]] = fit.beta[j];

  std::uint64_t h = fnv1a64(x_raw.data.data(), x_raw.data.size() * sizeof(double));
  h = fnv1a64(y.data(), y.size() * sizeof(int), h);
  model.data_fingerprint = hash_hex(h);

  std::vector<double> p_train(x_std.n_rows);
  for (std::size_t i = 0; i < x_std.n_rows; ++i) {
    double eta = fit.intercept;
    for (std::size_t j = 0; j < x_std.n_cols(); ++j) eta += x_std.at(i, j) * fit.beta[j];
    p_train[i] = sigmoid(eta);
  }
  model.p_star = choose_cutoff(p_train, y).p_star;
  return model;
}

std::vector<double> predict_dataset(const FittedModel& model, const Dataset& dataset, Split split) {
  DesignMatrix x = DesignMatrix::from_dataset(dataset, model.standardization.columns, split);
  return predict_proba(model, x);
}

void write_model_json(const FittedModel& model, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["format"] = "orb-model";
  j["version"] = 1;
  j["predictor_set"] = model.predictor_set;
  j["target"] = model.target;
  j["lambda"] = model.lambda;
  j["intercept"] = model.intercept;
  j["p_star"] = model.p_star;
  j["seed"] = model.seed;
  j["data_fingerprint"] = model.data_fingerprint;
  j["separation_warning"] = model.separation_warning;
  j["coefficients"] = model.coefficients;
  nlohmann::ordered_json s;
  s["columns"] = model.standardization.columns;
  s["mean"] = model.standardization.mean;
  s["sd"] = model.standardization.sd;
  std::vector<int> kept(model.standardization.kept.begin(), model.standardization.kept.end());
  s["kept"] = kept;
  j["standardization"] = s;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file: " + path.string());
  out << j.dump(2) << "\n";
}

FittedModel read_model_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("model", std::string("invalid model JSON: ") + e.what());
  }
  if (!j.contains("format") || j["format"] != "orb-model")
    throw ParseError("format", "not an orb-model file: " + path.string());
  FittedModel m;
  m.predictor_set = j.at("predictor_set").get<std::string>();
  m.target = j.at("target").get<std::string>();
  m.lambda = j.at("lambda").get<double>();
  m.intercept = j.at("intercept").get<double>();
  m.p_star = j.at("p_star").get<double>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.data_fingerprint = j.at("data_fingerprint").get<std::string>();
  m.separation_warning = j.at("separation_warning").get<bool>();
  m.coefficients = j.at("coefficients").get<std::map<std::string, double>>();
  const auto& s = j.at("standardization");
  m.standardization.columns = s.at("columns").get<std::vector<std::string>>();
  m.standardization.mean = s.at("mean").get<std::vector<double>>();
  m.standardization.sd = s.at("sd").get<std::vector<double>>();
  auto kept = s.at("kept").get<std::vector<int>>();
  m.standardization.kept.assign(kept.begin(), kept.end());
  if (m.standardization.mean.size() != m.standardization.columns.size() ||
      m.standardization.sd.size() != m.standardization.columns.size() ||
      m.standardization.kept.size() != m.standardization.columns.size())
    throw ParseError("standardization", "length mismatch in " + path.string());
  for (const auto& [name, value] : m.coefficients) {
    (void)value;
    bool known = false;
    for (const auto& c : m.standardization.columns) known |= (c == name);
    if (!known) throw ParseError("coefficients", "coefficient for unknown column '" + name + "'");
  }
  return m;
}

}  // namespace orb
