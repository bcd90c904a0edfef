#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wic/diffnum.hpp"
#include "wic/gridworld.hpp"
#include "wic/potential.hpp"
#include "wic/skill_runtime.hpp"

namespace wic {

enum class EnvironmentKind { Tabular15, FourRooms };
enum class Method { Wic, Vic };
enum class NetworkKind { Linear, Mlp };

std::string_view to_string(EnvironmentKind e);
std::string_view to_string(Method m);
std::string_view to_string(NetworkKind n);
std::string_view to_string(OptimizerKind o);

struct ExperimentConfig {
  EnvironmentKind environment = EnvironmentKind::Tabular15;
  Method method = Method::Wic;
  // Optional text map replacing the built-in layout of `environment`.
  std::string layout;
  int skill_count = 4;
  int horizon = 10;
  double eta = 0.9;
  double entropy_weight = 0.01;
  OptimizerKind optimizer = OptimizerKind::Sgd;
  double learning_rate = 0.003;
  NetworkKind network = NetworkKind::Linear;
  int hidden_units = 128;
  double lipschitz_weight = 10.0;
  int visitation_samples = 16;
  int episodes_per_update = 16;
  int total_updates = 5000;
  std::uint64_t seed = 0;
  int episodes_between_resets = 1;
  // Evaluation rollouts per skill from the canonical start after training.
  int eval_rollouts = 50;

  static ExperimentConfig defaults(EnvironmentKind env, Method method);

  // Throws ConfigError naming the first invalid field.
  void validate() const;

  // Assigns one field from its text form; unknown keys are rejected.
  void set(std::string_view key, std::string_view value);

  // Canonical "key = value" lines, one per field, in a fixed order.
  std::string to_text() const;

  GridSpec grid() const;
  Topology topology() const;
  WicConfig wic() const;
  ChainSchedule schedule() const;
  Optimizer make_optimizer() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

// Parses flat "key = value" text ('#' starts a comment). Defaults come from
// ExperimentConfig::defaults for the environment and method named in the text
// or overrides; every other key is then applied in order, file first.
ExperimentConfig parse_config(std::string_view text, const ConfigOverrides& overrides = {});
ExperimentConfig load_config_file(const std::string& path,
                                  const ConfigOverrides& overrides = {});

// Parses "--key=value" arguments.
ConfigOverrides parse_overrides(const std::vector<std::string>& args);

// FNV-1a over to_text() with the seed removed, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace wic
