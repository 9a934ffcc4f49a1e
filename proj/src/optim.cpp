#include "pll/optim.hpp"

#include <cmath>

namespace pll {

namespace {

using detail::require;

template <typename Fn>
void for_each_trainable(ModelParams& params, const ModelGrads& grads,
                        YogiState& state, Fn&& fn) {
  for (std::size_t l = 0; l < params.dense.size(); ++l) {
    fn(params.dense[l].weight, grads.dense[l].weight, state.m_dense[l].weight,
       state.v_dense[l].weight);
    fn(params.dense[l].bias, grads.dense[l].bias, state.m_dense[l].bias,
       state.v_dense[l].bias);
  }
  for (std::size_t l = 0; l < params.bn.size(); ++l) {
    fn(params.bn[l].gamma, grads.bn[l].gamma, state.m_bn[l].gamma,
       state.v_bn[l].gamma);
    fn(params.bn[l].beta, grads.bn[l].beta, state.m_bn[l].beta,
       state.v_bn[l].beta);
  }
}

bool grads_finite(const ModelGrads& grads) {
  for (const auto& d : grads.dense) {
    if (!d.weight.allFinite() || !d.bias.allFinite()) return false;
  }
  for (const auto& b : grads.bn) {
    if (!b.gamma.allFinite() || !b.beta.allFinite()) return false;
  }
  return true;
}

void check_shapes(const ModelParams& params, const ModelGrads& grads) {
  require(grads.dense.size() == params.dense.size() &&
              grads.bn.size() == params.bn.size(),
          "optimizer: gradient layer count mismatch");
  for (std::size_t l = 0; l < params.dense.size(); ++l) {
    require(grads.dense[l].weight.rows() == params.dense[l].weight.rows() &&
                grads.dense[l].weight.cols() == params.dense[l].weight.cols() &&
                grads.dense[l].bias.size() == params.dense[l].bias.size(),
            "optimizer: dense gradient shape mismatch");
  }
  for (std::size_t l = 0; l < params.bn.size(); ++l) {
    require(grads.bn[l].gamma.size() == params.bn[l].gamma.size() &&
                grads.bn[l].beta.size() == params.bn[l].beta.size(),
            "optimizer: batch-norm gradient shape mismatch");
  }
}

// Shared elementwise core so matrices and vectors go through one code path.
template <typename P, typename G, typename M>
void yogi_core(P&& theta, M&& m, M&& v, const G& grad, const YogiConfig& cfg,
               long long step) {
  const auto g = grad.array();
  m.array() = cfg.beta1 * m.array() + (1.0 - cfg.beta1) * g;
  const auto g2 = g.square();
  v.array() -= (1.0 - cfg.beta2) * (v.array() - g2).sign() * g2;
  double m_scale = 1.0, v_scale = 1.0;
  if (cfg.bias_correction) {
    m_scale = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
    v_scale = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
  }
  theta.array() -= cfg.lr * (m.array() / m_scale) /
                   ((v.array() / v_scale).sqrt() + cfg.epsilon);
}

}  // namespace

YogiState make_yogi_state(const ModelParams& params, const YogiConfig& cfg) {
  YogiState s;
  s.hyper = cfg;
  for (const DenseLayer& d : params.dense) {
    DenseGrad zero{Matrix::Zero(d.weight.rows(), d.weight.cols()),
                   Vector::Zero(d.bias.size())};
    s.m_dense.push_back(zero);
    s.v_dense.push_back(zero);
  }
  for (const BatchNormLayer& bn : params.bn) {
    BatchNormGrad zero{Vector::Zero(bn.gamma.size()), Vector::Zero(bn.beta.size())};
    s.m_bn.push_back(zero);
    s.v_bn.push_back(zero);
  }
  return s;
}

void yogi_update_tensor(Eigen::Ref<Matrix> theta, Eigen::Ref<Matrix> m,
                        Eigen::Ref<Matrix> v, const Eigen::Ref<const Matrix>& grad,
                        const YogiConfig& cfg, long long step) {
  yogi_core(theta, m, v, grad, cfg, step);
}

void yogi_step(YogiState& state, ModelParams& params, const ModelGrads& grads) {
  check_shapes(params, grads);
  if (!grads_finite(grads)) {
    throw NumericError("yogi_step: non-finite gradient");
  }
  state.step_count += 1;
  const long long t = state.step_count;
  const YogiConfig& cfg = state.hyper;
  for_each_trainable(params, grads, state,
                     [&](auto& theta, const auto& g, auto& m, auto& v) {
                       yogi_core(theta, m, v, g, cfg, t);
                     });
}

void sgd_step(ModelParams& params, const ModelGrads& grads, double lr) {
  // Shape checks reuse the Yogi path's layout assumptions.
  require(grads.dense.size() == params.dense.size() &&
              grads.bn.size() == params.bn.size(),
          "sgd_step: gradient layer count mismatch");
  if (!grads_finite(grads)) {
    throw NumericError("sgd_step: non-finite gradient");
  }
  for (std::size_t l = 0; l < params.dense.size(); ++l) {
    params.dense[l].weight -= lr * grads.dense[l].weight;
    params.dense[l].bias -= lr * grads.dense[l].bias;
  }
  for (std::size_t l = 0; l < params.bn.size(); ++l) {
    params.bn[l].gamma -= lr * grads.bn[l].gamma;
    params.bn[l].beta -= lr * grads.bn[l].beta;
  }
}

}  // namespace pll
