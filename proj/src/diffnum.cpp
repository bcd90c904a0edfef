#include "wic/diffnum.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>

#include "wic/errors.hpp"

namespace wic {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstWeights = Eigen::Map<const RowMajor>;
using Weights = Eigen::Map<RowMajor>;

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'W', 'I', 'C', 'P', 'A', 'R', 'A', 'M'};
constexpr std::uint32_t kVersion = 1;

Matrix relu(const Matrix& z) { return z.cwiseMax(0.0); }

// Non-zero entries of each input column, or nothing when the inputs are
// dense. One-hot features leave the first layer mostly multiplying zeros.
struct SparseColumns {
  std::vector<int> start;  // column j spans entries [start[j], start[j + 1])
  std::vector<int> row;
  std::vector<double> value;
};

std::optional<SparseColumns> sparse_columns(const Eigen::Ref<const Matrix>& x) {
  if (x.rows() < 64) return std::nullopt;
  SparseColumns out;
  out.start.reserve(static_cast<std::size_t>(x.cols()) + 1);
  const std::size_t limit = static_cast<std::size_t>(x.size()) / 8;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    out.start.push_back(static_cast<int>(out.row.size()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (x(i, j) == 0.0) continue;
      if (out.row.size() >= limit) return std::nullopt;
      out.row.push_back(static_cast<int>(i));
      out.value.push_back(x(i, j));
    }
  }
  out.start.push_back(static_cast<int>(out.row.size()));
  return out;
}

Matrix sparse_product(const ConstWeights& w, const SparseColumns& x) {
  Matrix z = Matrix::Zero(w.rows(), static_cast<Eigen::Index>(x.start.size()) - 1);
  for (Eigen::Index j = 0; j < z.cols(); ++j)
    for (int k = x.start[j]; k < x.start[j + 1]; ++k) z.col(j) += x.value[k] * w.col(x.row[k]);
  return z;
}

void add_sparse_outer(Weights& gw, const Matrix& delta, const SparseColumns& x) {
  for (Eigen::Index j = 0; j < delta.cols(); ++j)
    for (int k = x.start[j]; k < x.start[j + 1]; ++k) gw.col(x.row[k]) += x.value[k] * delta.col(j);
}

// ReLU subgradient, 0 at the kink.
Matrix relu_mask(const Matrix& z) {
  return (z.array() > 0.0).cast<double>().matrix();
}

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(std::string_view& in) {
  if (in.size() < sizeof(T)) throw ConfigError("checkpoint: truncated file");
  T value;
  std::memcpy(&value, in.data(), sizeof(T));
  in.remove_prefix(sizeof(T));
  return value;
}

}  // namespace

std::string to_string(const Topology& t) {
  if (t.kind == TopologyKind::Linear) return "linear";
  return "mlp_2x" + std::to_string(t.hidden);
}

ParamFunction::ParamFunction(Topology topology, int input_dim, int output_dim)
    : topology_(topology), input_dim_(input_dim), output_dim_(output_dim) {
  require(input_dim >= 1 && output_dim >= 1, "ParamFunction: dimensions must be positive");
  require(topology.kind == TopologyKind::Linear || topology.hidden >= 1,
          "ParamFunction: mlp needs a positive hidden width");
  params_ = Vector::Zero(static_cast<Eigen::Index>(
      param_count_for(topology, input_dim, output_dim)));
}

std::size_t ParamFunction::param_count_for(const Topology& topology,
                                           int input_dim, int output_dim) {
  const auto in = static_cast<std::size_t>(input_dim);
  const auto out = static_cast<std::size_t>(output_dim);
  if (topology.kind == TopologyKind::Linear) return out * in + out;
  const auto h = static_cast<std::size_t>(topology.hidden);
  return (h * in + h) + (h * h + h) + (out * h + out);
}

std::array<ParamFunction::Layer, 3> ParamFunction::layers() const {
  std::array<Layer, 3> out{};
  if (topology_.kind == TopologyKind::Linear) {
    out[0] = {output_dim_, input_dim_, 0};
    return out;
  }
  const int h = topology_.hidden;
  std::size_t offset = 0;
  const int dims[3][2] = {{h, input_dim_}, {h, h}, {output_dim_, h}};
  for (int i = 0; i < 3; ++i) {
    out[i] = {dims[i][0], dims[i][1], offset};
    offset += static_cast<std::size_t>(dims[i][0]) * (dims[i][1] + 1);
  }
  return out;
}

void ParamFunction::init_glorot(Rng& rng) {
  params_.setZero();
  const auto ls = layers();
  for (int i = 0; i < layer_count(); ++i) {
    const Layer& l = ls[i];
    const double a = std::sqrt(6.0 / (l.rows + l.cols));
    const std::size_t n = static_cast<std::size_t>(l.rows) * l.cols;
    for (std::size_t k = 0; k < n; ++k)
      params_[static_cast<Eigen::Index>(l.offset + k)] = (2.0 * uniform01(rng) - 1.0) * a;
  }
}

Vector ParamFunction::forward(const Eigen::Ref<const Vector>& x) const {
  return forward_batch(x);
}

Matrix ParamFunction::forward_batch(const Eigen::Ref<const Matrix>& inputs) const {
  require(inputs.rows() == input_dim_,
          "forward: input has " + std::to_string(inputs.rows()) +
              " rows, expected " + std::to_string(input_dim_));
  const auto ls = layers();
  const auto sparse = sparse_columns(inputs);
  Matrix act;
  for (int i = 0; i < layer_count(); ++i) {
    const Layer& l = ls[i];
    ConstWeights w(params_.data() + l.offset, l.rows, l.cols);
    Eigen::Map<const Vector> b(params_.data() + l.offset + static_cast<std::size_t>(l.rows) * l.cols, l.rows);
    Matrix z;
    if (i > 0) z = w * act;
    else if (sparse) z = sparse_product(w, *sparse);
    else z = w * inputs;
    z.colwise() += b;
    act = (i + 1 < layer_count()) ? relu(z) : std::move(z);
  }
  return act;
}

Vector ParamFunction::backward(const Eigen::Ref<const Vector>& x,
                               const Eigen::Ref<const Vector>& upstream) const {
  Vector grad = Vector::Zero(params_.size());
  accumulate_gradient(x, upstream, grad);
  return grad;
}

void ParamFunction::accumulate_gradient(const Eigen::Ref<const Matrix>& inputs,
                                        const Eigen::Ref<const Matrix>& upstream,
                                        Vector& grad) const {
  require(inputs.rows() == input_dim_, "backward: input dimension mismatch");
  require(upstream.rows() == output_dim_, "backward: upstream dimension mismatch");
  require(upstream.cols() == inputs.cols(), "backward: batch size mismatch");
  require(grad.size() == params_.size(), "backward: gradient buffer size mismatch");
  const auto ls = layers();
  const int n_layers = layer_count();

  // Forward pass keeping pre-activations and the hidden layers' inputs.
  const auto sparse = sparse_columns(inputs);
  std::array<Matrix, 3> layer_in;
  std::array<Matrix, 3> pre;
  Matrix act;
  for (int i = 0; i < n_layers; ++i) {
    const Layer& l = ls[i];
    ConstWeights w(params_.data() + l.offset, l.rows, l.cols);
    Eigen::Map<const Vector> b(params_.data() + l.offset + static_cast<std::size_t>(l.rows) * l.cols, l.rows);
    if (i > 0) {
      layer_in[i] = act;
      pre[i] = w * act;
    } else if (sparse) {
      pre[i] = sparse_product(w, *sparse);
    } else {
      pre[i] = w * inputs;
    }
    pre[i].colwise() += b;
    if (i + 1 < n_layers) act = relu(pre[i]);
  }

  Matrix delta = upstream;
  for (int i = n_layers - 1; i >= 0; --i) {
    const Layer& l = ls[i];
    Weights gw(grad.data() + l.offset, l.rows, l.cols);
    Eigen::Map<Vector> gb(grad.data() + l.offset + static_cast<std::size_t>(l.rows) * l.cols, l.rows);
    if (i > 0) gw.noalias() += delta * layer_in[i].transpose();
    else if (sparse) add_sparse_outer(gw, delta, *sparse);
    else gw.noalias() += delta * inputs.transpose();
    gb += delta.rowwise().sum();
    if (i > 0) {
      ConstWeights w(params_.data() + l.offset, l.rows, l.cols);
      Matrix back = w.transpose() * delta;
      delta = back.cwiseProduct(relu_mask(pre[i - 1]));
    }
  }
}

bool operator==(const ParamFunction& a, const ParamFunction& b) {
  if (!(a.topology_ == b.topology_) || a.input_dim_ != b.input_dim_ ||
      a.output_dim_ != b.output_dim_ || a.params_.size() != b.params_.size())
    return false;
  return std::memcmp(a.params_.data(), b.params_.data(),
                     sizeof(double) * static_cast<std::size_t>(a.params_.size())) == 0;
}

Optimizer::Optimizer(OptimizerKind kind, double lr, double b1, double b2, double eps)
    : kind_(kind), lr_(lr), beta1_(b1), beta2_(b2), epsilon_(eps) {
  if (!(lr > 0.0)) throw ConfigError("learning_rate: must be positive");
}

Optimizer Optimizer::sgd(double learning_rate) {
  return Optimizer(OptimizerKind::Sgd, learning_rate, 0.0, 0.0, 0.0);
}

Optimizer Optimizer::adam(double learning_rate, double beta1, double beta2,
                          double epsilon) {
  return Optimizer(OptimizerKind::Adam, learning_rate, beta1, beta2, epsilon);
}

void Optimizer::apply(Vector& params, const Vector& gradient) {
  require(params.size() == gradient.size(), "optimizer: gradient size mismatch");
  ++steps_;
  if (kind_ == OptimizerKind::Sgd) {
    params.noalias() -= lr_ * gradient;
    return;
  }
  if (m_.size() == 0) {
    m_ = Vector::Zero(params.size());
    v_ = Vector::Zero(params.size());
  }
  require(m_.size() == params.size(), "optimizer: parameter size changed");
  m_ = beta1_ * m_ + (1.0 - beta1_) * gradient;
  v_ = beta2_ * v_ + (1.0 - beta2_) * gradient.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + epsilon_);
}

Vector central_difference(const std::function<double(const Vector&)>& objective,
                          const Vector& x, double epsilon,
                          std::span<const int> coords) {
  Vector grad = Vector::Zero(x.size());
  Vector probe = x;
  auto one = [&](Eigen::Index i) {
    const double saved = probe[i];
    probe[i] = saved + epsilon;
    const double up = objective(probe);
    probe[i] = saved - epsilon;
    const double down = objective(probe);
    probe[i] = saved;
    grad[i] = (up - down) / (2.0 * epsilon);
  };
  if (coords.empty()) {
    for (Eigen::Index i = 0; i < x.size(); ++i) one(i);
  } else {
    for (int i : coords) one(i);
  }
  return grad;
}

double relative_error(const Vector& a, const Vector& b) {
  const double scale = std::max(a.norm(), b.norm());
  if (scale == 0.0) return 0.0;
  return (a - b).norm() / scale;
}

std::string serialize_checkpoint(const ParamFunction& fn, CheckpointExtra extra) {
  std::string out(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(fn.topology().kind));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(fn.topology().hidden));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(fn.input_dim()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(fn.output_dim()));
  put<std::uint32_t>(out, extra[0]);
  put<std::uint32_t>(out, extra[1]);
  put<std::uint64_t>(out, fn.param_count());
  out.append(reinterpret_cast<const char*>(fn.params().data()),
             sizeof(double) * fn.param_count());
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  if (bytes.size() < sizeof(kMagic) ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    throw ConfigError("checkpoint: bad magic");
  bytes.remove_prefix(sizeof(kMagic));
  if (take<std::uint32_t>(bytes) != kVersion)
    throw ConfigError("checkpoint: unsupported version");
  const auto tag = take<std::uint32_t>(bytes);
  const auto hidden = take<std::uint32_t>(bytes);
  const auto in = take<std::uint32_t>(bytes);
  const auto out = take<std::uint32_t>(bytes);
  CheckpointExtra extra{take<std::uint32_t>(bytes), take<std::uint32_t>(bytes)};
  const auto count = take<std::uint64_t>(bytes);
  Topology topo;
  if (tag == static_cast<std::uint32_t>(TopologyKind::Linear)) {
    topo = Topology::linear();
  } else if (tag == static_cast<std::uint32_t>(TopologyKind::Mlp)) {
    topo = Topology::mlp(static_cast<int>(hidden));
  } else {
    throw ConfigError("checkpoint: unknown topology tag " + std::to_string(tag));
  }
  ParamFunction fn(topo, static_cast<int>(in), static_cast<int>(out));
  if (count != fn.param_count())
    throw ConfigError("checkpoint: parameter count does not match topology");
  if (bytes.size() != sizeof(double) * count)
    throw ConfigError("checkpoint: payload size mismatch");
  std::memcpy(fn.params().data(), bytes.data(), bytes.size());
  return {std::move(fn), extra};
}

void write_checkpoint(const std::string& path, const ParamFunction& fn,
                      CheckpointExtra extra) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("checkpoint: cannot write " + path);
  const std::string bytes = serialize_checkpoint(fn, extra);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("checkpoint: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return deserialize_checkpoint(buf.str());
}

}  // namespace wic
