#pragma once

#include <cstdint>
#include <vector>

namespace orb {

/// ROC curve swept over all distinct prediction thresholds, from (0,0) to
/// (1,1). Ties produce diagonal segments, so the trapezoid AUC equals the
/// Mann-Whitney probability with ties counted 1/2 (the integer-arithmetic
/// accumulation makes that identity exact).
struct RocCurve {
  std::vector<double> fpr;
  std::vector<double> tpr;
  double auc = 0.0;
};

RocCurve roc_auc(const std::vector<double>& predictions, const std::vector<int>& labels);

struct BootstrapCi {
  double lower = 0.0;
  double upper = 0.0;
  double point = 0.0;
  int resamples = 0;
  std::uint64_t seed = 0;
};

/// 95% pivotal bootstrap interval (2*AUC - q_hi, 2*AUC - q_lo) from resampling
/// rows with replacement. Single-class resamples are redrawn (at most 10
/// attempts per round). Rounds use independent counter-based streams, so the
/// result does not depend on thread count.
BootstrapCi bootstrap_auc_ci(const std::vector<double>& predictions, const std::vector<int>& labels,
                             int resamples = 250, double level = 0.95, std::uint64_t seed = 0,
                             int jobs = 1);

enum class TailDirection { Less, Greater };

struct PermutationOptions {
  int rounds = 1000;
  std::uint64_t seed = 0;
  bool paired = false;        // swap within rows instead of pooling
  bool add_one_smoothing = false;  // (1 + count) / (1 + B)
  int jobs = 1;
};

struct TestResult {
  double statistic = 0.0;  // T = AUC(X) - AUC(Y)
  double p_value = 1.0;
  int rounds = 0;
  TailDirection direction = TailDirection::Greater;
};

/// Permutation test of the AUC difference between two prediction vectors
/// aligned to the same labels. Each round pools the 2N (prediction, label)
/// pairs and draws N without replacement as X-tilde, the rest as Y-tilde;
/// p = mean(T-tilde < T) for Less and mean(T-tilde > T) for Greater.
TestResult permutation_test(const std::vector<double>& x_predictions,
                            const std::vector<double>& y_predictions,
                            const std::vector<int>& labels, TailDirection direction,
                            const PermutationOptions& options = {});

}  // namespace orb
