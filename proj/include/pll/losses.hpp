#pragma once

#include "pll/matrix.hpp"

namespace pll {

/// Floor applied to probabilities (and candidate-set mass) inside logs and as
/// the gradient denominator. Keeps losses finite early in training and makes
/// the uniform-transition risk bounded by log((2^{K-1}-1)/kProbFloor).
inline constexpr double kProbFloor = 1e-12;

struct LossResult {
  double value = 0.0;
  Matrix dlogits;  // gradient of the mean loss w.r.t. the logits
};

/// Mean over rows of -log(sum of softmax mass on the candidate set). The
/// gradient is taken w.r.t. logits with the softmax chain rule fused in:
/// per row, d/dz_j = p_j * (1 - 1[j in S]/s) / B with s the candidate mass.
LossResult naive_loss(const Eigen::Ref<const Matrix>& probs,
                      const Eigen::Ref<const MaskMatrix>& masks);

/// Mean over rows of -(1/|S|) * sum over candidates of log p_k (the classic
/// averaged objective). Gradient w.r.t. logits: p_j - 1[j in S]/|S|, / B.
LossResult avg_log_loss(const Eigen::Ref<const Matrix>& probs,
                        const Eigen::Ref<const MaskMatrix>& masks);

/// Empirical risk under the uniform label-transition matrix:
/// -(1/B) * sum log(candidate mass / (2^{K-1}-1)). Computed directly from
/// this formula; equality with naive_loss + log(2^{K-1}-1) is a property
/// checked in tests, not the implementation. Requires 2 <= K <= 52.
double cc_risk(const Eigen::Ref<const Matrix>& probs,
               const Eigen::Ref<const MaskMatrix>& masks, int num_classes);

/// Fraction of predictions falling outside their candidate set.
double partial_zero_one_risk(const Eigen::Ref<const LabelVector>& predictions,
                             const Eigen::Ref<const MaskMatrix>& masks);

/// Misclassification fraction against true labels.
double classification_error(const Eigen::Ref<const LabelVector>& predictions,
                            const Eigen::Ref<const LabelVector>& true_labels);

inline double generalization_gap(double err, double partial_risk) {
  return std::abs(err - partial_risk);
}

}  // namespace pll
