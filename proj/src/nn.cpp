#include "pll/nn.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pll/rng.hpp"

namespace pll {

namespace {

using detail::require;

void check_finite(const Eigen::Ref<const Matrix>& m, const std::string& where) {
  if (!m.allFinite()) {
    throw NumericError("non-finite values in " + where);
  }
}

}  // namespace

void ModelSpec::validate() const {
  require(input_dim >= 1, "ModelSpec: input_dim must be >= 1");
  require(output_dim >= 1, "ModelSpec: output_dim must be >= 1");
  require(!hidden_dims.empty(), "ModelSpec: hidden_dims must be non-empty");
  for (int h : hidden_dims) require(h >= 1, "ModelSpec: hidden dims must be >= 1");
  require(elu_alpha > 0.0, "ModelSpec: elu_alpha must be positive");
  require(bn_epsilon > 0.0, "ModelSpec: bn_epsilon must be positive");
  require(bn_momentum > 0.0 && bn_momentum < 1.0,
          "ModelSpec: bn_momentum must lie in (0,1)");
}

std::vector<int> ModelSpec::layer_dims() const {
  std::vector<int> dims;
  dims.reserve(hidden_dims.size() + 2);
  dims.push_back(input_dim);
  dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
  dims.push_back(output_dim);
  return dims;
}

void Batch::validate() const {
  require(features.rows() == masks.rows(), "Batch: features/masks row mismatch");
  for (Eigen::Index i = 0; i < masks.rows(); ++i) {
    bool any = false;
    for (Eigen::Index k = 0; k < masks.cols(); ++k) any = any || masks(i, k) != 0;
    require(any, "Batch: empty candidate mask at row " + std::to_string(i));
  }
  if (labels) {
    require(labels->size() == masks.rows(), "Batch: labels size mismatch");
    for (Eigen::Index i = 0; i < labels->size(); ++i) {
      const int y = (*labels)(i);
      require(y >= 0 && y < masks.cols(), "Batch: label out of range at row " +
                                              std::to_string(i));
      require(masks(i, y) != 0, "Batch: true label not in candidate set at row " +
                                    std::to_string(i));
    }
  }
}

ModelParams init_model(const ModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  ModelParams p;
  p.spec = spec;
  const auto dims = spec.layer_dims();
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    Rng rng = Rng::stream(seed, "init", l);
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    DenseLayer layer;
    layer.weight.resize(fan_in, fan_out);
    for (int i = 0; i < fan_in; ++i)
      for (int j = 0; j < fan_out; ++j) layer.weight(i, j) = rng.uniform(-bound, bound);
    layer.bias = Vector::Zero(fan_out);
    p.dense.push_back(std::move(layer));
  }
  for (int h : spec.hidden_dims) {
    BatchNormLayer bn;
    bn.gamma = Vector::Ones(h);
    bn.beta = Vector::Zero(h);
    bn.running_mean = Vector::Zero(h);
    bn.running_var = Vector::Ones(h);
    p.bn.push_back(std::move(bn));
  }
  return p;
}

ForwardResult forward(ModelParams& params, const Eigen::Ref<const Matrix>& features) {
  const ModelSpec& spec = params.spec;
  require(features.cols() == spec.input_dim, "forward: feature dim mismatch");
  const bool training = params.mode == Mode::Training;
  const Eigen::Index batch = features.rows();
  require(batch >= 1, "forward: empty batch");
  if (training) {
    require(batch >= 2, "forward: training mode needs batch size >= 2");
  }

  ForwardResult out;
  out.cache.mode = params.mode;
  out.cache.batch_size = batch;

  Matrix x = features;
  const int n_hidden = spec.num_bn();
  for (int l = 0; l < n_hidden; ++l) {
    LayerCache lc;
    lc.input = x;
    Matrix z = (x * params.dense[l].weight).rowwise() +
               params.dense[l].bias.transpose();
    check_finite(z, "dense layer " + std::to_string(l));

    BatchNormLayer& bn = params.bn[l];
    RowVector mean, inv_std;
    if (training) {
      mean = z.colwise().mean();
      Matrix centered = z.rowwise() - mean;
      RowVector var = centered.array().square().colwise().mean().matrix();
      inv_std = (var.array() + spec.bn_epsilon).rsqrt().matrix();
      lc.normalized = (centered.array().rowwise() * inv_std.array()).matrix();
      // Running statistics track the (biased) batch statistics.
      bn.running_mean = (1.0 - spec.bn_momentum) * bn.running_mean +
                        spec.bn_momentum * mean.transpose();
      bn.running_var = (1.0 - spec.bn_momentum) * bn.running_var +
                       spec.bn_momentum * var.transpose();
    } else {
      mean = bn.running_mean.transpose();
      inv_std =
          (bn.running_var.transpose().array() + spec.bn_epsilon).rsqrt().matrix();
      Matrix centered = z.rowwise() - mean;
      lc.normalized = (centered.array().rowwise() * inv_std.array()).matrix();
    }
    lc.batch_mean = mean;
    lc.inv_std = inv_std;
    lc.pre_act = ((lc.normalized.array().rowwise() * bn.gamma.transpose().array())
                      .rowwise() +
                  bn.beta.transpose().array())
                     .matrix();
    check_finite(lc.pre_act, "batch norm layer " + std::to_string(l));

    lc.activated = (lc.pre_act.array() > 0.0)
                       .select(lc.pre_act.array(),
                               spec.elu_alpha * (lc.pre_act.array().exp() - 1.0))
                       .matrix();
    check_finite(lc.activated, "elu layer " + std::to_string(l));
    x = lc.activated;
    out.cache.hidden.push_back(std::move(lc));
  }

  out.cache.output_input = x;
  out.logits = (x * params.dense.back().weight).rowwise() +
               params.dense.back().bias.transpose();
  check_finite(out.logits, "output layer");
  out.probs = softmax_rows(out.logits);
  return out;
}

ModelGrads backward(const ModelParams& params, const ForwardCache& cache,
                    const Eigen::Ref<const Matrix>& dloss_dlogits) {
  const ModelSpec& spec = params.spec;
  if (cache.mode != Mode::Training) {
    throw std::logic_error("backward: cache must come from a training-mode forward");
  }
  require(dloss_dlogits.rows() == cache.batch_size &&
              dloss_dlogits.cols() == spec.output_dim,
          "backward: dloss_dlogits shape mismatch");
  const double batch = static_cast<double>(cache.batch_size);

  ModelGrads g;
  g.dense.resize(params.dense.size());
  g.bn.resize(params.bn.size());

  // Output dense layer.
  const std::size_t out_l = params.dense.size() - 1;
  g.dense[out_l].weight = cache.output_input.transpose() * dloss_dlogits;
  g.dense[out_l].bias = dloss_dlogits.colwise().sum().transpose();
  Matrix dx = dloss_dlogits * params.dense[out_l].weight.transpose();

  for (int l = spec.num_bn() - 1; l >= 0; --l) {
    const LayerCache& lc = cache.hidden[l];
    const BatchNormLayer& bn = params.bn[l];

    // ELU': 1 where the pre-activation is positive, alpha*exp(z) = a + alpha
    // elsewhere (a the stored activation).
    Matrix dpre =
        (lc.pre_act.array() > 0.0)
            .select(dx.array(), dx.array() * (lc.activated.array() + spec.elu_alpha))
            .matrix();

    g.bn[l].gamma =
        (dpre.array() * lc.normalized.array()).colwise().sum().matrix().transpose();
    g.bn[l].beta = dpre.colwise().sum().transpose();

    // Batch-norm input gradient through the batch statistics:
    // dz = gamma*inv_std/B * (B*dy - sum(dy) - xhat .* sum(dy .* xhat)).
    RowVector sum_dy = dpre.colwise().sum();
    RowVector sum_dy_xhat =
        (dpre.array() * lc.normalized.array()).colwise().sum().matrix();
    Matrix dz = (((batch * dpre.array()).rowwise() - sum_dy.array()) -
                 (lc.normalized.array().rowwise() * sum_dy_xhat.array()))
                    .matrix();
    dz = (dz.array().rowwise() *
          (bn.gamma.transpose().array() * lc.inv_std.array() / batch))
             .matrix();

    g.dense[l].weight = lc.input.transpose() * dz;
    g.dense[l].bias = dz.colwise().sum().transpose();
    dx = dz * params.dense[l].weight.transpose();
  }
  return g;
}

LabelVector predict(const ModelParams& params, const Eigen::Ref<const Matrix>& features) {
  if (params.mode != Mode::Inference) {
    throw std::logic_error("predict: params must be in inference mode");
  }
  // Inference forward never mutates params; cast is confined here.
  ModelParams& mutable_params = const_cast<ModelParams&>(params);
  ForwardResult fwd = forward(mutable_params, features);
  return argmax_rows(fwd.logits);
}

std::int64_t parameter_count(const ModelSpec& spec) {
  spec.validate();
  const auto dims = spec.layer_dims();
  std::int64_t count = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    count += static_cast<std::int64_t>(dims[l]) * dims[l + 1] + dims[l + 1];
  }
  for (int h : spec.hidden_dims) count += 2 * static_cast<std::int64_t>(h);
  return count;
}

std::vector<Vector> trainable_tensors(const ModelParams& params) {
  std::vector<Vector> tensors;
  for (const DenseLayer& d : params.dense) {
    Vector w(d.weight.size());
    // Row-major flattening, independent of Eigen's storage order.
    Eigen::Index idx = 0;
    for (Eigen::Index i = 0; i < d.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < d.weight.cols(); ++j) w(idx++) = d.weight(i, j);
    tensors.push_back(std::move(w));
    tensors.push_back(d.bias);
  }
  for (const BatchNormLayer& bn : params.bn) {
    tensors.push_back(bn.gamma);
    tensors.push_back(bn.beta);
  }
  return tensors;
}

namespace {

constexpr char kParamMagic[8] = {'P', 'L', 'L', 'P', 'A', 'R', 'A', 'M'};
constexpr std::uint32_t kParamVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& os, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

void put_vector(std::ostream& os, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) put_f64(os, v(i));
}

Vector get_vector(std::istream& is, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = get_f64(is);
  return v;
}

}  // namespace

void save_params(const ModelParams& params, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  require(os.good(), "save_params: cannot open " + path.string());
  os.write(kParamMagic, 8);
  put_u32(os, kParamVersion);
  const auto dims = params.spec.layer_dims();
  put_u32(os, static_cast<std::uint32_t>(dims.size()));
  for (int d : dims) put_u32(os, static_cast<std::uint32_t>(d));
  put_f64(os, params.spec.elu_alpha);
  put_f64(os, params.spec.bn_epsilon);
  put_f64(os, params.spec.bn_momentum);
  put_u32(os, params.mode == Mode::Training ? 0 : 1);
  for (const DenseLayer& d : params.dense) {
    for (Eigen::Index i = 0; i < d.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < d.weight.cols(); ++j) put_f64(os, d.weight(i, j));
    put_vector(os, d.bias);
  }
  for (const BatchNormLayer& bn : params.bn) {
    put_vector(os, bn.gamma);
    put_vector(os, bn.beta);
    put_vector(os, bn.running_mean);
    put_vector(os, bn.running_var);
  }
  require(os.good(), "save_params: write failed for " + path.string());
}

ModelParams load_params(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), "load_params: cannot open " + path.string());
  char magic[8];
  is.read(magic, 8);
  require(is.good() && std::memcmp(magic, kParamMagic, 8) == 0,
          "load_params: bad magic in " + path.string());
  require(get_u32(is) == kParamVersion, "load_params: unsupported version");
  const std::uint32_t n_dims = get_u32(is);
  require(n_dims >= 3, "load_params: needs at least one hidden layer");
  std::vector<int> dims(n_dims);
  for (auto& d : dims) d = static_cast<int>(get_u32(is));

  ModelSpec spec;
  spec.input_dim = dims.front();
  spec.output_dim = dims.back();
  spec.hidden_dims.assign(dims.begin() + 1, dims.end() - 1);
  spec.elu_alpha = get_f64(is);
  spec.bn_epsilon = get_f64(is);
  spec.bn_momentum = get_f64(is);
  const std::uint32_t mode = get_u32(is);
  spec.validate();

  ModelParams p;
  p.spec = spec;
  p.mode = mode == 0 ? Mode::Training : Mode::Inference;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    DenseLayer d;
    d.weight.resize(dims[l], dims[l + 1]);
    for (Eigen::Index i = 0; i < d.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < d.weight.cols(); ++j) d.weight(i, j) = get_f64(is);
    d.bias = get_vector(is, dims[l + 1]);
    p.dense.push_back(std::move(d));
  }
  for (int h : spec.hidden_dims) {
    BatchNormLayer bn;
    bn.gamma = get_vector(is, h);
    bn.beta = get_vector(is, h);
    bn.running_mean = get_vector(is, h);
    bn.running_var = get_vector(is, h);
    p.bn.push_back(std::move(bn));
  }
  require(is.good(), "load_params: truncated file " + path.string());
  return p;
}

}  // namespace pll
