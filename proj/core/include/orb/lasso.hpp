#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "orb/dataset.hpp"

namespace orb {

/// Column-major numeric design matrix with named columns.
struct DesignMatrix {
  std::vector<std::string> columns;
  std::size_t n_rows = 0;
  std::vector<double> data;  // column-major

  double& at(std::size_t row, std::size_t col) { return data[col * n_rows + row]; }
  double at(std::size_t row, std::size_t col) const { return data[col * n_rows + row]; }
  const double* col(std::size_t j) const { return data.data() + j * n_rows; }
  std::size_t n_cols() const { return columns.size(); }

  /// Extracts named columns (and rows of one split, when given) from a dataset.
  static DesignMatrix from_dataset(const Dataset& dataset, const std::vector<std::string>& cols,
                                   std::optional<Split> split = std::nullopt);
};

/// Labels (0/1) for a target ("RI" or "RW") and optional split.
std::vector<int> dataset_labels(const Dataset& dataset, const std::string& target,
                                std::optional<Split> split = std::nullopt);
std::vector<std::string> dataset_storms(const Dataset& dataset,
                                        std::optional<Split> split = std::nullopt);

/// Per-column centering/scaling parameters (population sd). Zero-variance
/// columns are flagged kept == 0 and excluded from penalized fitting.
struct Standardization {
  std::vector<std::string> columns;
  std::vector<double> mean;
  std::vector<double> sd;
  std::vector<std::uint8_t> kept;

  std::size_t n_kept() const;
};

Standardization fit_standardization(const DesignMatrix& x);

/// Returns the standardized matrix holding only the kept columns; test-time
/// rows must be transformed with the training parameters.
DesignMatrix apply_standardization(const DesignMatrix& x, const Standardization& params);

/// One penalized fit on standardized columns.
struct LassoFit {
  double intercept = 0.0;
  std::vector<double> beta;  // aligned to the standardized matrix columns
  bool converged = false;
  bool separation_warning = false;  // diverging fit; increase lambda
  int outer_iterations = 0;
};

/// Maximizes sum_i [y_i log p_i + (1-y_i) log(1-p_i)] - lambda * sum_j |beta_j|
/// (intercept unpenalized) by cyclic coordinate descent on the local quadratic
/// approximation with soft-thresholding. Deterministic given input order;
/// converged when the largest coefficient change over an outer round drops
/// below 1e-7.
LassoFit fit_logistic_lasso(const DesignMatrix& x_std, const std::vector<int>& y, double lambda,
                            const LassoFit* warm_start = nullptr);

/// Penalized objective at a given fit (for monotonicity checks).
double penalized_log_likelihood(const DesignMatrix& x_std, const std::vector<int>& y,
                                const LassoFit& fit, double lambda);

/// Smallest lambda whose solution is all-zero: max_j |x_j . (y - mean(y))|.
double lambda_max(const DesignMatrix& x_std, const std::vector<int>& y);

/// Log-spaced path from lambda_max down to ratio * lambda_max.
std::vector<double> lambda_grid(double lmax, int points = 100, double min_ratio = 1e-4);

struct LambdaPath {
  std::vector<double> lambdas;  // descending
  std::vector<double> cv_mean;  // mean held-out binomial deviance per lambda
  std::vector<double> cv_se;    // standard error across folds
  std::size_t chosen = 0;
};

struct CvChoice {
  LambdaPath path;
  double lambda = 0.0;
  int folds_used = 0;
  bool reduced_folds = false;
  std::uint64_t seed = 0;
  std::map<std::string, int> fold_of_storm;
};

/// Ten-fold cross-validation that partitions storms, not rows. Each fold is
/// standardized on its own training part; the validation score is mean
/// held-out binomial deviance. Default choice is the deviance minimum; the
/// one-standard-error rule picks the largest lambda within one SE of it.
CvChoice cv_select_lambda(const DesignMatrix& x_raw, const std::vector<int>& y,
                          const std::vector<std::string>& storm_of_row, int folds,
                          std::uint64_t seed, bool one_se_rule = false);

/// A complete trained classifier.
struct FittedModel {
  std::string predictor_set;
  std::string target;  // RI or RW
  double intercept = 0.0;
  std::map<std::string, double> coefficients;  // nonzero only, standardized units
  Standardization standardization;
  double lambda = 0.0;
  double p_star = 0.5;
  std::uint64_t seed = 0;
  std::string data_fingerprint;
  bool separation_warning = false;
};

/// p = 1 / (1 + exp(-(b0 + x beta))) per row; the raw matrix must carry
/// exactly the model's columns and is standardized with the stored params.
std::vector<double> predict_proba(const FittedModel& model, const DesignMatrix& x_raw);

/// Balanced accuracy (TPR + TNR) / 2 with the classifier predicting 1 when
/// p > cutoff.
double balanced_accuracy(const std::vector<double>& p, const std::vector<int>& y, double cutoff);

/// Cutoff maximizing balanced accuracy over midpoints of consecutive distinct
/// predictions (with 0 and 1 as virtual endpoints); ties break toward the
/// larger cutoff.
struct CutoffChoice {
  double p_star = 0.5;
  double balanced_accuracy = 0.0;
};
CutoffChoice choose_cutoff(const std::vector<double>& p, const std::vector<int>& y);

struct TrainOptions {
  int folds = 10;
  bool one_se_rule = false;
};

/// End-to-end training on a dataset's train split: standardize, CV the path,
/// refit at the chosen lambda, pick the probability cutoff on train
/// predictions.
FittedModel train_model(const Dataset& dataset, PredictorSetId set, const std::string& target,
                        std::uint64_t seed, const TrainOptions& options = {});

/// Model predictions for all rows of a split.
std::vector<double> predict_dataset(const FittedModel& model, const Dataset& dataset, Split split);

void write_model_json(const FittedModel& model, const std::filesystem::path& path);
FittedModel read_model_json(const std::filesystem::path& path);

}  // namespace orb
