#include "orb/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>

#include "orb/errors.hpp"
#include "orb/parallel.hpp"
#include "orb/rng.hpp"

namespace orb {

namespace {

void check_binary_both(const std::vector<int>& y) {
  bool has0 = false, has1 = false;
  for (int v : y) {
    if (v == 0)
      has0 = true;
    else if (v == 1)
      has1 = true;
    else
      throw ValidationError("labels must be 0 or 1");
  }
  if (!has0 || !has1) throw DataError("labels contain a single class");
}

// AUC numerator in units of 1/(2 * n_pos * n_neg); integer-exact.
std::int64_t auc_numerator(const std::vector<double>& p, const std::vector<int>& y,
                           std::int64_t& n_pos, std::int64_t& n_neg,
                           std::vector<std::pair<std::int64_t, std::int64_t>>* points) {
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
  n_pos = 0;
  n_neg = 0;
  for (int v : y) (v ? n_pos : n_neg) += 1;

  std::int64_t tp = 0, fp = 0, num = 0;
  if (points) points->push_back({0, 0});
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    std::int64_t dtp = 0, dfp = 0;
    while (j < order.size() && p[order[j]] == p[order[i]]) {
      (y[order[j]] ? dtp : dfp) += 1;
      ++j;
    }
    // Trapezoid over the tied group: dfp * (tp_before + tp_after).
    num += dfp * (2 * tp + dtp);
    tp += dtp;
    fp += dfp;
    if (points) points->push_back({fp, tp});
    i = j;
  }
  return num;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw ValidationError("quantile of empty set");
  double h = q * static_cast<double>(sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

RocCurve roc_auc(const std::vector<double>& predictions, const std::vector<int>& labels) {
  if (predictions.size() != labels.size()) throw ValidationError("roc_auc: length mismatch");
  if (predictions.empty()) throw ValidationError("roc_auc: empty inputs");
  check_binary_both(labels);

  std::int64_t n_pos = 0, n_neg = 0;
  std::vector<std::pair<std::int64_t, std::int64_t>> raw_points;
  std::int64_t num = auc_numerator(predictions, labels, n_pos, n_neg, &raw_points);

  RocCurve curve;
  curve.fpr.reserve(raw_points.size());
  curve.tpr.reserve(raw_points.size());
  for (auto [fp, tp] : raw_points) {
    curve.fpr.push_back(static_cast<double>(fp) / static_cast<double>(n_neg));
    curve.tpr.push_back(static_cast<double>(tp) / static_cast<double>(n_pos));
  }
  curve.auc = static_cast<double>(num) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
  return curve;
}

BootstrapCi bootstrap_auc_ci(const std::vector<double>& predictions, const std::vector<int>& labels,
                             int resamples, double level, std::uint64_t seed, int jobs) {
  if (predictions.size() != labels.size()) throw ValidationError("bootstrap_auc_ci: length mismatch");
  if (predictions.size() < 30) throw ValidationError("bootstrap_auc_ci: need n >= 30");
  if (resamples < 2) throw ValidationError("bootstrap_auc_ci: need >= 2 resamples");
  if (!(level > 0 && level < 1)) throw ValidationError("bootstrap_auc_ci: level must be in (0,1)");
  check_binary_both(labels);

  const std::size_t n = predictions.size();
  const double point = roc_auc(predictions, labels).auc;
  std::vector<double> aucs(static_cast<std::size_t>(resamples));
  std::atomic<bool> exhausted{false};

  parallel_for(static_cast<std::size_t>(resamples), jobs, [&](std::size_t b) {
    Rng rng = Rng::stream(seed, b);
    for (int attempt = 0; attempt < 10; ++attempt) {
      std::vector<double> ps(n);
      std::vector<int> ys(n);
      bool has0 = false, has1 = false;
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t k = static_cast<std::size_t>(rng.below(n));
        ps[i] = predictions[k];
        ys[i] = labels[k];
        (ys[i] ? has1 : has0) = true;
      }
      if (has0 && has1) {
        std::int64_t n_pos, n_neg;
        std::int64_t num = auc_numerator(ps, ys, n_pos, n_neg, nullptr);
        aucs[b] = static_cast<double>(num) /
                  (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
        return;
      }
    }
    exhausted.store(true);
  });
  if (exhausted.load())
    throw DataError("bootstrap_auc_ci: single-class resamples persisted past the redraw cap");

  std::sort(aucs.begin(), aucs.end());
  const double alpha = 1.0 - level;
  double q_lo = quantile_sorted(aucs, alpha / 2.0);
  double q_hi = quantile_sorted(aucs, 1.0 - alpha / 2.0);

  BootstrapCi ci;
  ci.point = point;
  ci.lower = 2.0 * point - q_hi;
  ci.upper = 2.0 * point - q_lo;
  ci.resamples = resamples;
  ci.seed = seed;
  return ci;
}

TestResult permutation_test(const std::vector<double>& x_predictions,
                            const std::vector<double>& y_predictions,
                            const std::vector<int>& labels, TailDirection direction,
                            const PermutationOptions& options) {
  const std::size_t n = labels.size();
  if (x_predictions.size() != n || y_predictions.size() != n)
    throw ValidationError("permutation_test: prediction/label length mismatch");
  if (options.rounds < 1) throw ValidationError("permutation_test: rounds must be >= 1");
  check_binary_both(labels);

  auto auc_of = [&](const std::vector<double>& p, const std::vector<int>& y) {
    std::int64_t n_pos, n_neg;
    std::int64_t num = auc_numerator(p, y, n_pos, n_neg, nullptr);
    return static_cast<double>(num) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
  };

  const double t_obs = auc_of(x_predictions, labels) - auc_of(y_predictions, labels);

  std::vector<double> stats(static_cast<std::size_t>(options.rounds));
  parallel_for(static_cast<std::size_t>(options.rounds), options.jobs, [&](std::size_t b) {
    Rng rng = Rng::stream(options.seed, b);
    std::vector<double> px(n), py(n);
    std::vector<int> yx(n), yy(n);
    if (options.paired) {
      for (std::size_t i = 0; i < n; ++i) {
        bool swap = rng.bernoulli(0.5);
        px[i] = swap ? y_predictions[i] : x_predictions[i];
        py[i] = swap ? x_predictions[i] : y_predictions[i];
        yx[i] = labels[i];
        yy[i] = labels[i];
      }
    } else {
      // Pool the 2N (prediction, label) pairs; draw N without replacement.
      std::vector<std::uint32_t> idx(2 * n);
      std::iota(idx.begin(), idx.end(), 0);
      rng.shuffle(idx);
      for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t a = idx[i];
        px[i] = a < n ? x_predictions[a] : y_predictions[a - n];
        yx[i] = labels[a % n];
        std::uint32_t c = idx[n + i];
        py[i] = c < n ? x_predictions[c] : y_predictions[c - n];
        yy[i] = labels[c % n];
      }
    }
    stats[b] = auc_of(px, yx) - auc_of(py, yy);
  });

  std::int64_t count = 0;
  for (double t : stats) {
    if (direction == TailDirection::Less ? (t < t_obs) : (t > t_obs)) ++count;
  }
  TestResult result;
  result.statistic = t_obs;
  result.direction = direction;
  result.rounds = options.rounds;
  if (options.add_one_smoothing)
    result.p_value = (1.0 + static_cast<double>(count)) / (1.0 + static_cast<double>(options.rounds));
  else
    result.p_value = static_cast<double>(count) / static_cast<double>(options.rounds);
  return result;
}

}  // namespace orb
