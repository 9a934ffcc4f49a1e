#pragma once

#include <string>
#include <vector>

#include "pll/train.hpp"

namespace pll {

// ---------------------------------------------------------------------------
// Generalization-gap curve: train on nested subsets of increasing size, track
// final metrics on a fixed held-out labeled test set, aggregate over repeats.
// ---------------------------------------------------------------------------

struct GapCurveConfig {
  TrainConfig train;
  BlobSpec blobs;
  FlipSpec flip;
  std::vector<int> sizes;  // ascending training-set sizes
  int repeats = 10;
  int test_size = 2000;
  int threads = 0;  // 0: hardware concurrency
};

struct GapCurveRow {
  int n = 0;
  double err_mean = 0, err_std = 0;
  double partial_risk_mean = 0, partial_risk_std = 0;
  double gap_mean = 0, gap_std = 0;
  double cc_risk_mean = 0, cc_risk_std = 0;
  double naive_loss_mean = 0, naive_loss_std = 0;
};

std::vector<GapCurveRow> run_gap_curve(const GapCurveConfig& config);

// ---------------------------------------------------------------------------
// Repeated k-fold cross-validation benchmark. Trains on nine folds' partial
// labels and scores accuracy (1 - classification error) on the held-out
// fold's true labels.
// ---------------------------------------------------------------------------

struct CvConfig {
  TrainConfig train;
  int folds = 10;
  int repeats = 5;
  int threads = 0;
};

struct CvSummary {
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  std::vector<double> fold_accuracies;  // repeat-major
};

CvSummary run_cv_benchmark(const CvConfig& config, const PLLDataset& dataset);

// ---------------------------------------------------------------------------
// Ambiguity sweep over coupled-distractor strength c = gamma. Alongside the
// error, reports pair-level statistics: accuracy of predicting into
// {y, d(y)} and, within those, the rate of picking the distractor.
// ---------------------------------------------------------------------------

struct AmbiguitySweepConfig {
  TrainConfig train;
  BlobSpec blobs;
  std::vector<double> gammas;
  int repeats = 10;
  int test_size = 2000;
  int threads = 0;
};

struct AmbiguitySweepRow {
  double gamma = 0.0;
  double err_mean = 0, err_std = 0;
  double pair_accuracy_mean = 0, pair_accuracy_std = 0;
  double pair_confusion_mean = 0, pair_confusion_std = 0;
};

/// Output rows are sorted by gamma regardless of input order.
std::vector<AmbiguitySweepRow> run_ambiguity_sweep(const AmbiguitySweepConfig& config);

// ---------------------------------------------------------------------------
// Complexity experiment: fit the same features twice, once with candidate
// sets from the structured labels and once with candidate sets drawn from a
// uniform random relabeling, and compare quantized-parameter LZ complexities
// of runs that reached the fit threshold.
// ---------------------------------------------------------------------------

struct ComplexityConfig {
  TrainConfig train;  // stop_at_train_loss acts as the fit threshold
  BlobSpec blobs;
  FlipSpec flip;
  int runs_per_condition = 20;
  int lz_bits = 8;
  int test_size = 2000;
  int threads = 0;
};

struct ComplexityRow {
  std::string condition;  // "structured" | "randomized"
  int run = 0;
  std::uint64_t seed = 0;
  double final_err = 0.0;  // vs. the structured labels of a held-out set
  double final_train_loss = 0.0;
  std::int64_t lz_complexity = 0;
  bool reached_fit = false;
  int epochs_run = 0;
};

/// Rows ordered structured runs first, then randomized, by run index. Runs
/// that fail to reach the fit threshold are reported with reached_fit=false,
/// never dropped.
std::vector<ComplexityRow> run_complexity_experiment(const ComplexityConfig& config);

}  // namespace pll
