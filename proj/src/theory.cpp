#include "pll/theory.hpp"

#include <cmath>
#include <cstdint>

namespace pll {

namespace {

using detail::require;

}  // namespace

void EprmInputs::validate() const {
  require(d_h >= 1.0, "EprmInputs: d_h must be >= 1");
  require(num_classes >= 2, "EprmInputs: K must be >= 2");
  require(epsilon > 0.0 && epsilon < 1.0, "EprmInputs: epsilon must lie in (0,1)");
  require(delta > 0.0 && delta < 1.0, "EprmInputs: delta must lie in (0,1)");
  require(gamma >= 0.0, "EprmInputs: gamma must be >= 0");
  if (gamma >= 1.0) {
    throw std::invalid_argument(
        "EprmInputs: small ambiguity degree condition violated (gamma >= 1)");
  }
}

double eprm_sample_complexity(const EprmInputs& in) {
  in.validate();
  const double eta = std::log(2.0 / (1.0 + in.gamma));
  const double eta_eps = eta * in.epsilon;
  return (4.0 / eta_eps) *
         (in.d_h * (std::log(4.0 * in.d_h) + 2.0 * std::log(in.num_classes) +
                    std::log(1.0 / eta_eps)) +
          std::log(1.0 / in.delta) + 1.0);
}

void CcBoundInputs::validate() const {
  require(rho > 0.0, "CcBoundInputs: rho must be positive");
  require(loss_bound >= 0.0, "CcBoundInputs: loss bound must be >= 0");
  require(rademacher.size() >= 1, "CcBoundInputs: rademacher vector is empty");
  require((rademacher.array() >= 0.0).all(),
          "CcBoundInputs: rademacher entries must be >= 0");
  require(delta > 0.0 && delta < 1.0, "CcBoundInputs: delta must lie in (0,1)");
  require(n >= 1, "CcBoundInputs: n must be >= 1");
}

double cc_bound_rhs(const CcBoundInputs& in) {
  in.validate();
  return 8.0 * in.rho * in.rademacher.sum() +
         2.0 * in.loss_bound *
             std::sqrt(std::log(2.0 / in.delta) / (2.0 * static_cast<double>(in.n)));
}

double cc_loss_bound(int num_classes) {
  require(num_classes >= 2 && num_classes <= 52, "cc_loss_bound: K out of range");
  const double denom =
      static_cast<double>((std::int64_t{1} << (num_classes - 1)) - 1);
  return std::log(denom / 1e-12);
}

Vector rademacher_norm_proxy(const ModelParams& params,
                             const Eigen::Ref<const Matrix>& features) {
  require(features.rows() >= 1, "rademacher_norm_proxy: empty feature matrix");
  double norm_product = 1.0;
  for (const DenseLayer& d : params.dense) norm_product *= d.weight.norm();
  const double max_norm = features.rowwise().norm().maxCoeff();
  const double n = static_cast<double>(features.rows());
  const double value = norm_product * max_norm / std::sqrt(n);
  return Vector::Constant(params.spec.output_dim, value);
}

double natarajan_dim_proxy(std::int64_t parameter_count) {
  require(parameter_count >= 2, "natarajan_dim_proxy: parameter count too small");
  const double p = static_cast<double>(parameter_count);
  return p * std::log2(p);
}

std::int64_t lz76_phrase_count(std::span<const std::uint8_t> bytes) {
  // Kaspar-Schuster scan of the 1976 exhaustive-history parsing.
  const std::size_t n = bytes.size();
  if (n == 0) return 0;
  if (n == 1) return 1;
  std::int64_t complexity = 1;
  std::size_t prefix_len = 1;  // start of the phrase being built
  std::size_t i = 0;           // candidate match start within the prefix
  std::size_t k = 1;           // current match extension length
  std::size_t k_max = 1;       // longest extension seen for this phrase
  while (true) {
    if (bytes[i + k - 1] != bytes[prefix_len + k - 1]) {
      k_max = std::max(k_max, k);
      ++i;
      if (i == prefix_len) {
        ++complexity;
        prefix_len += k_max;
        if (prefix_len + 1 > n) break;
        i = 0;
        k = 1;
        k_max = 1;
      } else {
        k = 1;
      }
    } else {
      ++k;
      if (prefix_len + k > n) {
        ++complexity;
        break;
      }
    }
  }
  return complexity;
}

std::vector<std::uint8_t> quantize_params(const ModelParams& params, int bits) {
  require(bits == 4 || bits == 8 || bits == 16,
          "quantize_params: bits must be one of {4, 8, 16}");
  const std::int64_t levels = (std::int64_t{1} << bits) - 1;
  std::vector<std::uint8_t> bytes;
  for (const Vector& tensor : trainable_tensors(params)) {
    const double lo = tensor.minCoeff();
    const double hi = tensor.maxCoeff();
    const double range = hi - lo;
    for (Eigen::Index i = 0; i < tensor.size(); ++i) {
      std::int64_t q = 0;
      if (range > 0.0) {
        q = static_cast<std::int64_t>(
            std::llround((tensor(i) - lo) / range * static_cast<double>(levels)));
        q = std::clamp<std::int64_t>(q, 0, levels);
      }
      if (bits == 16) {
        bytes.push_back(static_cast<std::uint8_t>(q & 0xff));
        bytes.push_back(static_cast<std::uint8_t>((q >> 8) & 0xff));
      } else {
        bytes.push_back(static_cast<std::uint8_t>(q));
      }
    }
  }
  return bytes;
}

std::int64_t lz_complexity(const ModelParams& params, int bits) {
  const auto bytes = quantize_params(params, bits);
  return lz76_phrase_count(bytes);
}

}  // namespace pll
