#pragma once

#include <cstdint>
#include <vector>

#include "pll/data.hpp"
#include "pll/optim.hpp"

namespace pll {

enum class LossKind { Naive, AvgLog };
enum class OptimizerKind { Yogi, Sgd };

struct TrainConfig {
  ModelSpec model;
  LossKind loss = LossKind::Naive;
  OptimizerKind optimizer = OptimizerKind::Yogi;
  YogiConfig yogi;
  double sgd_lr = 0.1;
  int batch_size = 128;
  int epochs = 200;
  int eval_every = 5;
  std::uint64_t seed = 0;
  /// When >= 0, training stops after the first evaluated epoch whose training
  /// surrogate loss is <= this threshold (used by the fit-to-threshold
  /// experiment; disabled by default).
  double stop_at_train_loss = -1.0;

  void validate() const;
};

/// One evaluation snapshot. Training losses/risks are computed over the full
/// training set and the error over the evaluation set, both in inference
/// mode. `gap` pairs the evaluation error with the empirical partial risk of
/// the training sample, the quantity whose shrinkage is tracked by the
/// gap-curve experiment.
struct MetricsRecord {
  int epoch = 0;
  double train_naive_loss = 0.0;
  double train_avg_log_loss = 0.0;
  double train_cc_risk = 0.0;
  double train_partial_risk = 0.0;
  double test_err = 0.0;
  double test_partial_risk = 0.0;
  double gap = 0.0;  // |test_err - train_partial_risk|
};

struct TrainResult {
  ModelParams params;
  std::vector<MetricsRecord> metrics;
};

/// Splits {0..n-1} into consecutive ranges of `batch_size`; a final remnant
/// of size one is merged into the previous batch (every example is used).
/// n == 1 is rejected (batch-norm needs two rows).
std::vector<std::pair<int, int>> batch_ranges(int n, int batch_size);

/// Mini-batch training of the surrogate loss. Per-epoch shuffles derive from
/// (seed, epoch); metrics are recorded every `eval_every` epochs and always
/// at the final epoch, with the model in inference mode. Deterministic per
/// config. Numeric failures abort with the epoch/batch coordinates.
TrainResult train(const TrainConfig& config, const PLLDataset& train_set,
                  const PLLDataset& eval_set);

}  // namespace pll
