#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "wic/random.hpp"

namespace wic {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class TopologyKind : std::uint32_t { Linear = 1, Mlp = 2 };

// Linear: y = Wx + b.
// Mlp: two ReLU hidden layers of `hidden` units followed by an affine output.
struct Topology {
  TopologyKind kind = TopologyKind::Linear;
  int hidden = 0;

  static Topology linear() { return {TopologyKind::Linear, 0}; }
  static Topology mlp(int hidden = 128) { return {TopologyKind::Mlp, hidden}; }

  friend bool operator==(const Topology&, const Topology&) = default;
};

std::string to_string(const Topology& t);

// A differentiable map R^input_dim -> R^output_dim with a flat parameter
// vector. Weight matrices are stored row-major, each followed by its bias:
//   linear: W (out x in), b (out)
//   mlp:    W1 (h x in), b1, W2 (h x h), b2, W3 (out x h), b3
class ParamFunction {
 public:
  // All parameters start at zero.
  ParamFunction(Topology topology, int input_dim, int output_dim);

  static std::size_t param_count_for(const Topology& topology, int input_dim,
                                     int output_dim);

  // Weights uniform in [-a, a] with a = sqrt(6 / (fan_in + fan_out)); biases 0.
  void init_glorot(Rng& rng);

  const Topology& topology() const { return topology_; }
  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }
  std::size_t param_count() const { return static_cast<std::size_t>(params_.size()); }

  Vector& params() { return params_; }
  const Vector& params() const { return params_; }

  Vector forward(const Eigen::Ref<const Vector>& x) const;
  // Columns of `inputs` are samples; returns output_dim x n.
  Matrix forward_batch(const Eigen::Ref<const Matrix>& inputs) const;

  // Gradient of <upstream, forward(x)> with respect to the parameters.
  Vector backward(const Eigen::Ref<const Vector>& x,
                  const Eigen::Ref<const Vector>& upstream) const;
  // Adds sum_j gradient of <upstream.col(j), forward(inputs.col(j))> to grad.
  void accumulate_gradient(const Eigen::Ref<const Matrix>& inputs,
                           const Eigen::Ref<const Matrix>& upstream,
                           Vector& grad) const;

  // Same topology, dimensions and bit-identical parameters.
  friend bool operator==(const ParamFunction& a, const ParamFunction& b);

 private:
  struct Layer {
    int rows;
    int cols;
    std::size_t offset;  // weights at offset, bias at offset + rows * cols
  };
  std::array<Layer, 3> layers() const;
  int layer_count() const { return topology_.kind == TopologyKind::Linear ? 1 : 3; }

  Topology topology_;
  int input_dim_;
  int output_dim_;
  Vector params_;
};

enum class OptimizerKind { Sgd, Adam };

// Gradient-descent state for one parameter vector. Moment buffers are sized
// on the first update and must keep that size afterwards.
class Optimizer {
 public:
  static Optimizer sgd(double learning_rate);
  static Optimizer adam(double learning_rate, double beta1 = 0.9,
                        double beta2 = 0.999, double epsilon = 1e-8);

  // params <- params - step(gradient)
  void apply(Vector& params, const Vector& gradient);

  OptimizerKind kind() const { return kind_; }
  double learning_rate() const { return lr_; }
  std::int64_t step_count() const { return steps_; }
  const Vector& first_moment() const { return m_; }
  const Vector& second_moment() const { return v_; }

 private:
  Optimizer(OptimizerKind kind, double lr, double b1, double b2, double eps);

  OptimizerKind kind_;
  double lr_;
  double beta1_;
  double beta2_;
  double epsilon_;
  std::int64_t steps_ = 0;
  Vector m_;
  Vector v_;
};

// Central finite differences of a scalar objective at x, only over the
// listed coordinates (all coordinates when empty). Entries not listed are 0.
Vector central_difference(const std::function<double(const Vector&)>& objective,
                          const Vector& x, double epsilon,
                          std::span<const int> coords = {});

// ||a - b|| / max(||a||, ||b||), 0 when both vanish.
double relative_error(const Vector& a, const Vector& b);

// Binary checkpoint: 8-byte magic, then little-endian u32 fields (version,
// topology tag, hidden, input_dim, output_dim, extra[0], extra[1]), a u64
// parameter count, and the parameters as f64. `extra` carries the owner's
// header fields (skill count, action count).
using CheckpointExtra = std::array<std::uint32_t, 2>;

struct Checkpoint {
  ParamFunction function;
  CheckpointExtra extra{};
};

std::string serialize_checkpoint(const ParamFunction& fn, CheckpointExtra extra = {});
Checkpoint deserialize_checkpoint(std::string_view bytes);
void write_checkpoint(const std::string& path, const ParamFunction& fn,
                      CheckpointExtra extra = {});
Checkpoint read_checkpoint(const std::string& path);

}  // namespace wic
