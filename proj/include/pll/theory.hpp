#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pll/nn.hpp"

namespace pll {

struct EprmInputs {
  double d_h = 1.0;     // Natarajan dimension or proxy
  int num_classes = 2;  // K
  double epsilon = 0.1;
  double delta = 0.1;
  double gamma = 0.0;  // ambiguity degree, must be < 1

  void validate() const;
};

/// Sample-size threshold for empirical partial-risk minimization:
///   n0 = (4/(eta*eps)) * (d_H*(log(4 d_H) + 2 log K + log(1/(eta*eps)))
///        + log(1/delta) + 1),  eta = log(2/(1+gamma)), natural logs.
/// gamma >= 1 violates the small-ambiguity-degree condition and is rejected.
double eprm_sample_complexity(const EprmInputs& in);

struct CcBoundInputs {
  double rho = 1.0;         // Lipschitz constant of the loss
  double loss_bound = 0.0;  // M
  Vector rademacher;        // length-K per-label complexity values
  double delta = 0.05;
  std::int64_t n = 1;

  void validate() const;
};

/// Estimation-error bound: 8*rho*sum(rademacher) + 2*M*sqrt(log(2/delta)/(2n)).
double cc_bound_rhs(const CcBoundInputs& in);

/// Upper bound on the floored uniform-transition loss:
/// M = log((2^{K-1}-1)/kProbFloor).
double cc_loss_bound(int num_classes);

/// Norm-based upper-bound surrogate for the per-label Rademacher complexity:
/// every entry equals (product over dense layers of ||W||_F) * max_i ||x_i||_2
/// / sqrt(n). Identical across the K entries by construction; a crude upper
/// bound, adequate for vacuity demonstrations only.
Vector rademacher_norm_proxy(const ModelParams& params,
                             const Eigen::Ref<const Matrix>& features);

/// Capacity proxy d_H = P * log2(P) for trainable parameter count P.
double natarajan_dim_proxy(std::int64_t parameter_count);

/// Phrase count of the 1976 Lempel-Ziv exhaustive-history parsing
/// (Kaspar-Schuster algorithm). Deterministic; empty input has count 0.
std::int64_t lz76_phrase_count(std::span<const std::uint8_t> bytes);

/// Uniform quantization of every trainable tensor over its own [min,max]
/// range to 2^bits levels (bits in {4,8,16}); symbols are emitted as one byte
/// for bits <= 8 and two little-endian bytes for bits = 16, concatenated in
/// trainable-tensor order. A degenerate tensor (min == max) maps to zeros.
std::vector<std::uint8_t> quantize_params(const ModelParams& params, int bits);

/// LZ76 phrase count of the quantized parameter byte string.
std::int64_t lz_complexity(const ModelParams& params, int bits);

}  // namespace pll
