#pragma once

#include <cstdint>

#include "pll/nn.hpp"

namespace pll {

struct YogiConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-3;
  bool bias_correction = true;
};

/// Per-parameter first/second moments mirroring the trainable tensors.
struct YogiState {
  std::vector<DenseGrad> m_dense, v_dense;
  std::vector<BatchNormGrad> m_bn, v_bn;
  long long step_count = 0;
  YogiConfig hyper;
};

YogiState make_yogi_state(const ModelParams& params, const YogiConfig& cfg);

/// One Yogi update on a single tensor (exposed for direct testing):
///   m <- b1*m + (1-b1)*g
///   v <- v - (1-b2)*sign(v - g^2) .* g^2
///   theta <- theta - lr * m_hat / (sqrt(v_hat) + eps)
/// with m_hat, v_hat the bias-corrected moments when enabled.
void yogi_update_tensor(Eigen::Ref<Matrix> theta, Eigen::Ref<Matrix> m,
                        Eigen::Ref<Matrix> v, const Eigen::Ref<const Matrix>& grad,
                        const YogiConfig& cfg, long long step);

/// Applies one Yogi step to every trainable tensor and increments the step
/// count. Non-finite gradients raise NumericError before anything is touched.
void yogi_step(YogiState& state, ModelParams& params, const ModelGrads& grads);

/// theta <- theta - lr * g. Non-finite gradients rejected.
void sgd_step(ModelParams& params, const ModelGrads& grads, double lr);

}  // namespace pll
