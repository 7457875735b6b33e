#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "orb/errors.hpp"
#include "orb/evaluation.hpp"
#include "orb/rng.hpp"
#include "oracles.hpp"

using namespace orb;

TEST_CASE("AUC basics: perfect ordering, all-tied predictions, hand case") {
  CHECK(roc_auc({0.1, 0.2, 0.8, 0.9}, {0, 0, 1, 1}).auc == 1.0);
  CHECK(roc_auc({0.5, 0.5, 0.5, 0.5}, {0, 1, 0, 1}).auc == 0.5);
  RocCurve c = roc_auc({0.2, 0.8, 0.6, 0.4}, {0, 1, 1, 0});
  CHECK(c.auc == 1.0);
  CHECK(c.fpr.front() == 0.0);
  CHECK(c.tpr.front() == 0.0);
  CHECK(c.fpr.back() == 1.0);
  CHECK(c.tpr.back() == 1.0);
  for (std::size_t i = 1; i < c.fpr.size(); ++i) {
    CHECK(c.fpr[i] >= c.fpr[i - 1]);
    CHECK(c.tpr[i] >= c.tpr[i - 1]);
  }
  CHECK_THROWS_AS(roc_auc({0.1, 0.2}, {1, 1}), DataError);
}

TEST_CASE("AUC equals the Mann-Whitney pair count exactly on random instances") {
  Rng rng(123);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 5 + rng.below(40);
    std::vector<double> p(n);
    std::vector<int> y(n);
    bool has0 = false, has1 = false;
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse grid so ties actually occur.
      p[i] = static_cast<double>(rng.below(8)) / 8.0;
      y[i] = rng.bernoulli(0.4) ? 1 : 0;
      (y[i] ? has1 : has0) = true;
    }
    if (!has0 || !has1) continue;
    std::int64_t n_pos, n_neg;
    std::int64_t num = oracle::pair_count_auc_numerator(p, y, n_pos, n_neg);
    double expected = static_cast<double>(num) / (2.0 * n_pos * n_neg);
    CHECK(roc_auc(p, y).auc == expected);
  }
}

TEST_CASE("score-reversal antisymmetry and monotone-transform invariance") {
  Rng rng(7);
  std::vector<double> p(200);
  std::vector<int> y(200);
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = static_cast<double>(rng.below(32)) / 32.0;
    y[i] = rng.bernoulli(0.3) ? 1 : 0;
  }
  double auc = roc_auc(p, y).auc;
  std::vector<double> neg(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) neg[i] = -p[i];
  CHECK(auc + roc_auc(neg, y).auc == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<double> warped(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) warped[i] = std::exp(3.0 * p[i]) + 1.0;
  CHECK(roc_auc(warped, y).auc == auc);
}

TEST_CASE("bootstrap CI: pivotal interval brackets the point estimate sensibly") {
  Rng rng(42);
  const std::size_t n = 500;
  std::vector<double> p(n);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = rng.bernoulli(0.4) ? 1 : 0;
    p[i] = y[i] ? rng.normal(0.95, 1.0) : rng.normal(0.0, 1.0);
  }
  BootstrapCi ci = bootstrap_auc_ci(p, y, 250, 0.95, 11);
  CHECK(ci.lower < ci.point);
  CHECK(ci.upper > ci.point);
  CHECK(ci.resamples == 250);

  // Deterministic across repeat calls and invariant to the worker count.
  BootstrapCi again = bootstrap_auc_ci(p, y, 250, 0.95, 11);
  CHECK(again.lower == ci.lower);
  CHECK(again.upper == ci.upper);
  BootstrapCi threaded = bootstrap_auc_ci(p, y, 250, 0.95, 11, 4);
  CHECK(threaded.lower == ci.lower);
  CHECK(threaded.upper == ci.upper);
}

TEST_CASE("bootstrap CI collapses for a perfectly separated classifier") {
  Rng rng(4);
  const std::size_t n = 500;
  std::vector<double> p(n);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = i % 2 == 0 ? 1 : 0;
    p[i] = y[i] ? rng.uniform(0.8, 1.0) : rng.uniform(0.0, 0.2);
  }
  BootstrapCi ci = bootstrap_auc_ci(p, y, 250, 0.95, 5);
  CHECK(ci.point == 1.0);
  CHECK(ci.upper - ci.lower < 0.02);
}

TEST_CASE("permutation test: identical prediction vectors sit at the null center") {
  Rng rng(9);
  const std::size_t n = 300;
  std::vector<double> p(n);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = rng.bernoulli(0.35) ? 1 : 0;
    p[i] = rng.normal(static_cast<double>(y[i]), 1.2);
  }
  PermutationOptions opts;
  opts.rounds = 1000;
  opts.seed = 21;
  TestResult r = permutation_test(p, p, y, TailDirection::Greater, opts);
  CHECK(r.statistic == 0.0);
  CHECK(std::abs(r.p_value - 0.5) < 0.05);
  // p-values live on the grid {0, 1/B, ..., 1}.
  double steps = r.p_value * opts.rounds;
  CHECK(steps == doctest::Approx(std::round(steps)).epsilon(1e-12));
}

TEST_CASE("permutation test directions and options") {
  Rng rng(31);
  const std::size_t n = 400;
  std::vector<double> strong(n), weak(n);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = rng.bernoulli(0.35) ? 1 : 0;
    strong[i] = rng.normal(1.6 * y[i], 1.0);
    weak[i] = rng.normal(0.3 * y[i], 1.0);
  }
  PermutationOptions opts;
  opts.rounds = 1000;
  opts.seed = 33;
  // The strong model clearly improves on the weak one.
  TestResult greater = permutation_test(strong, weak, y, TailDirection::Greater, opts);
  CHECK(greater.statistic > 0.05);
  CHECK(greater.p_value < 0.01);
  // And is certainly not worse.
  TestResult less = permutation_test(strong, weak, y, TailDirection::Less, opts);
  CHECK(less.p_value > 0.9);

  PermutationOptions smoothed = opts;
  smoothed.add_one_smoothing = true;
  TestResult sm = permutation_test(strong, weak, y, TailDirection::Greater, smoothed);
  CHECK(sm.p_value >= 1.0 / 1001.0);

  PermutationOptions paired = opts;
  paired.paired = true;
  TestResult pr = permutation_test(strong, weak, y, TailDirection::Greater, paired);
  CHECK(pr.p_value < 0.01);

  PermutationOptions threaded = opts;
  threaded.jobs = 4;
  TestResult tr = permutation_test(strong, weak, y, TailDirection::Greater, threaded);
  CHECK(tr.p_value == greater.p_value);
}

TEST_CASE("permutation p-values are roughly uniform under an exchangeable null") {
  // Spot version of the acceptance check: fewer repeats, looser bound.
  Rng rng(55);
  std::vector<double> pvals;
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 80;
    std::vector<double> a(n), b(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = i % 3 == 0 ? 1 : 0;
      a[i] = rng.normal(0.5 * y[i], 1.0);
      b[i] = rng.normal(0.5 * y[i], 1.0);
    }
    PermutationOptions opts;
    opts.rounds = 200;
    opts.seed = 1000 + static_cast<std::uint64_t>(rep);
    pvals.push_back(permutation_test(a, b, y, TailDirection::Greater, opts).p_value);
  }
  std::sort(pvals.begin(), pvals.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < pvals.size(); ++i) {
    double empirical_hi = static_cast<double>(i + 1) / pvals.size();
    double empirical_lo = static_cast<double>(i) / pvals.size();
    ks = std::max(ks, std::max(std::abs(empirical_hi - pvals[i]), std::abs(pvals[i] - empirical_lo)));
  }
  CHECK(ks < 0.2);
}
