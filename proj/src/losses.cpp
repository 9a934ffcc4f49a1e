#include "pll/losses.hpp"

#include <cmath>
#include <cstdint>

namespace pll {

namespace {

using detail::require;

void check_pair(const Eigen::Ref<const Matrix>& probs,
                const Eigen::Ref<const MaskMatrix>& masks) {
  require(probs.rows() == masks.rows() && probs.cols() == masks.cols(),
          "loss: probs/masks shape mismatch");
  require(probs.rows() >= 1, "loss: empty batch");
}

int mask_row_size(const Eigen::Ref<const MaskMatrix>& masks, Eigen::Index i) {
  int count = 0;
  for (Eigen::Index k = 0; k < masks.cols(); ++k) count += masks(i, k) != 0;
  return count;
}

}  // namespace

LossResult naive_loss(const Eigen::Ref<const Matrix>& probs,
                      const Eigen::Ref<const MaskMatrix>& masks) {
  check_pair(probs, masks);
  const Eigen::Index B = probs.rows();
  const Eigen::Index K = probs.cols();
  LossResult out;
  out.dlogits = Matrix::Zero(B, K);
  double total = 0.0;
  for (Eigen::Index i = 0; i < B; ++i) {
    double s = 0.0;
    bool any = false;
    for (Eigen::Index k = 0; k < K; ++k) {
      if (masks(i, k) != 0) {
        s += probs(i, k);
        any = true;
      }
    }
    require(any, "naive_loss: empty candidate mask at row " + std::to_string(i));
    const double floored = std::max(s, kProbFloor);
    total += -std::log(floored);
    for (Eigen::Index k = 0; k < K; ++k) {
      const double in_s = masks(i, k) != 0 ? 1.0 : 0.0;
      out.dlogits(i, k) = probs(i, k) * (1.0 - in_s / floored) / static_cast<double>(B);
    }
  }
  out.value = total / static_cast<double>(B);
  return out;
}

LossResult avg_log_loss(const Eigen::Ref<const Matrix>& probs,
                        const Eigen::Ref<const MaskMatrix>& masks) {
  check_pair(probs, masks);
  const Eigen::Index B = probs.rows();
  const Eigen::Index K = probs.cols();
  LossResult out;
  out.dlogits = Matrix::Zero(B, K);
  double total = 0.0;
  for (Eigen::Index i = 0; i < B; ++i) {
    const int set_size = mask_row_size(masks, i);
    require(set_size > 0,
            "avg_log_loss: empty candidate mask at row " + std::to_string(i));
    double row = 0.0;
    for (Eigen::Index k = 0; k < K; ++k) {
      if (masks(i, k) != 0) row += -std::log(std::max(probs(i, k), kProbFloor));
    }
    total += row / set_size;
    for (Eigen::Index k = 0; k < K; ++k) {
      const double in_s = masks(i, k) != 0 ? 1.0 / set_size : 0.0;
      out.dlogits(i, k) = (probs(i, k) - in_s) / static_cast<double>(B);
    }
  }
  out.value = total / static_cast<double>(B);
  return out;
}

double cc_risk(const Eigen::Ref<const Matrix>& probs,
               const Eigen::Ref<const MaskMatrix>& masks, int num_classes) {
  check_pair(probs, masks);
  require(num_classes >= 2 && num_classes <= 52,
          "cc_risk: K must lie in [2, 52] so 2^(K-1)-1 is exactly representable");
  require(probs.cols() == num_classes, "cc_risk: K/probs column mismatch");
  const double denom =
      static_cast<double>((std::int64_t{1} << (num_classes - 1)) - 1);
  const Eigen::Index B = probs.rows();
  double total = 0.0;
  for (Eigen::Index i = 0; i < B; ++i) {
    double s = 0.0;
    bool any = false;
    for (Eigen::Index k = 0; k < probs.cols(); ++k) {
      if (masks(i, k) != 0) {
        s += probs(i, k);
        any = true;
      }
    }
    require(any, "cc_risk: empty candidate mask at row " + std::to_string(i));
    total += -std::log(std::max(s, kProbFloor) / denom);
  }
  return total / static_cast<double>(B);
}

double partial_zero_one_risk(const Eigen::Ref<const LabelVector>& predictions,
                             const Eigen::Ref<const MaskMatrix>& masks) {
  require(predictions.size() == masks.rows(),
          "partial_zero_one_risk: size mismatch");
  if (predictions.size() == 0) return 0.0;
  Eigen::Index outside = 0;
  for (Eigen::Index i = 0; i < predictions.size(); ++i) {
    const int y = predictions(i);
    require(y >= 0 && y < masks.cols(),
            "partial_zero_one_risk: prediction out of range");
    if (masks(i, y) == 0) ++outside;
  }
  return static_cast<double>(outside) / static_cast<double>(predictions.size());
}

double classification_error(const Eigen::Ref<const LabelVector>& predictions,
                            const Eigen::Ref<const LabelVector>& true_labels) {
  require(predictions.size() == true_labels.size(),
          "classification_error: size mismatch");
  if (predictions.size() == 0) return 0.0;
  Eigen::Index wrong = 0;
  for (Eigen::Index i = 0; i < predictions.size(); ++i) {
    if (predictions(i) != true_labels(i)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(predictions.size());
}

}  // namespace pll
