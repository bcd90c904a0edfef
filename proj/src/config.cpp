#include "wic/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wic/errors.hpp"

namespace wic {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view value) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(value) + "'");
  return out;
}

double parse_double(std::string_view key, std::string_view value) {
  const std::string text(value);
  char* end = nullptr;
  const double out = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size())
    throw ConfigError(std::string(key) + ": expected a number, got '" + text + "'");
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view key, std::string_view value,
                const std::pair<std::string_view, Enum> (&options)[N]) {
  for (const auto& [name, e] : options)
    if (name == value) return e;
  std::string allowed;
  for (const auto& [name, e] : options) allowed += (allowed.empty() ? "" : ", ") + std::string(name);
  throw ConfigError(std::string(key) + ": unknown value '" + std::string(value) +
                    "' (expected one of: " + allowed + ")");
}

constexpr std::pair<std::string_view, EnvironmentKind> kEnvironments[] = {
    {"tabular15", EnvironmentKind::Tabular15}, {"four_rooms", EnvironmentKind::FourRooms}};
constexpr std::pair<std::string_view, Method> kMethods[] = {{"wic", Method::Wic},
                                                            {"vic", Method::Vic}};
constexpr std::pair<std::string_view, OptimizerKind> kOptimizers[] = {
    {"sgd", OptimizerKind::Sgd}, {"adam", OptimizerKind::Adam}};
constexpr std::pair<std::string_view, NetworkKind> kNetworks[] = {{"linear", NetworkKind::Linear},
                                                                  {"mlp", NetworkKind::Mlp}};

}  // namespace

std::string_view to_string(EnvironmentKind e) {
  return e == EnvironmentKind::Tabular15 ? "tabular15" : "four_rooms";
}
std::string_view to_string(Method m) { return m == Method::Wic ? "wic" : "vic"; }
std::string_view to_string(NetworkKind n) { return n == NetworkKind::Linear ? "linear" : "mlp"; }
std::string_view to_string(OptimizerKind o) { return o == OptimizerKind::Sgd ? "sgd" : "adam"; }

ExperimentConfig ExperimentConfig::defaults(EnvironmentKind env, Method method) {
  ExperimentConfig cfg;
  cfg.environment = env;
  cfg.method = method;
  if (env == EnvironmentKind::FourRooms) {
    cfg.horizon = 40;
    cfg.episodes_between_resets = 17;
    cfg.optimizer = OptimizerKind::Adam;
    cfg.learning_rate = 0.001;
    cfg.network = NetworkKind::Mlp;
    cfg.total_updates = 20000;
  }
  return cfg;
}

void ExperimentConfig::validate() const {
  if (skill_count < 1) throw ConfigError("skill_count: must be at least 1");
  if (horizon < 1) throw ConfigError("horizon: must be at least 1");
  if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("eta: must lie in [0, 1]");
  if (!(entropy_weight >= 0.0)) throw ConfigError("entropy_weight: must be non-negative");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate: must be positive");
  if (hidden_units < 1) throw ConfigError("hidden_units: must be at least 1");
  if (!(lipschitz_weight > 0.0)) throw ConfigError("lipschitz_weight: must be positive");
  if (visitation_samples < 1) throw ConfigError("visitation_samples: must be at least 1");
  if (episodes_per_update < 1) throw ConfigError("episodes_per_update: must be at least 1");
  if (total_updates < 0) throw ConfigError("total_updates: must be non-negative");
  if (episodes_between_resets < 1)
    throw ConfigError("episodes_between_resets: must be at least 1");
  if (eval_rollouts < 0) throw ConfigError("eval_rollouts: must be non-negative");
  (void)grid();
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  if (key == "environment") environment = parse_enum(key, value, kEnvironments);
  else if (key == "method") method = parse_enum(key, value, kMethods);
  else if (key == "layout") layout = std::string(value);
  else if (key == "skill_count") skill_count = parse_int<int>(key, value);
  else if (key == "horizon") horizon = parse_int<int>(key, value);
  else if (key == "eta") eta = parse_double(key, value);
  else if (key == "entropy_weight") entropy_weight = parse_double(key, value);
  else if (key == "optimizer") optimizer = parse_enum(key, value, kOptimizers);
  else if (key == "learning_rate") learning_rate = parse_double(key, value);
  else if (key == "network") network = parse_enum(key, value, kNetworks);
  else if (key == "hidden_units") hidden_units = parse_int<int>(key, value);
  else if (key == "lipschitz_weight") lipschitz_weight = parse_double(key, value);
  else if (key == "visitation_samples") visitation_samples = parse_int<int>(key, value);
  else if (key == "episodes_per_update") episodes_per_update = parse_int<int>(key, value);
  else if (key == "total_updates") total_updates = parse_int<int>(key, value);
  else if (key == "seed") seed = parse_int<std::uint64_t>(key, value);
  else if (key == "episodes_between_resets") episodes_between_resets = parse_int<int>(key, value);
  else if (key == "eval_rollouts") eval_rollouts = parse_int<int>(key, value);
  else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream out;
  out << "environment = " << to_string(environment) << '\n'
      << "method = " << to_string(method) << '\n';
  if (!layout.empty()) out << "layout = " << layout << '\n';
  out << "skill_count = " << skill_count << '\n'
      << "horizon = " << horizon << '\n'
      << "eta = " << format_double(eta) << '\n'
      << "entropy_weight = " << format_double(entropy_weight) << '\n'
      << "optimizer = " << to_string(optimizer) << '\n'
      << "learning_rate = " << format_double(learning_rate) << '\n'
      << "network = " << to_string(network) << '\n'
      << "hidden_units = " << hidden_units << '\n'
      << "lipschitz_weight = " << format_double(lipschitz_weight) << '\n'
      << "visitation_samples = " << visitation_samples << '\n'
      << "episodes_per_update = " << episodes_per_update << '\n'
      << "total_updates = " << total_updates << '\n'
      << "seed = " << seed << '\n'
      << "episodes_between_resets = " << episodes_between_resets << '\n'
      << "eval_rollouts = " << eval_rollouts << '\n';
  return out.str();
}

GridSpec ExperimentConfig::grid() const {
  const FeatureMode mode = environment == EnvironmentKind::Tabular15 ? FeatureMode::OneHot
                                                                     : FeatureMode::ScaledXY;
  if (!layout.empty()) return load_layout_file(layout, mode);
  return environment == EnvironmentKind::Tabular15 ? tabular15_spec() : four_rooms_spec();
}

Topology ExperimentConfig::topology() const {
  return network == NetworkKind::Linear ? Topology::linear() : Topology::mlp(hidden_units);
}

WicConfig ExperimentConfig::wic() const {
  return {eta, lipschitz_weight, visitation_samples};
}

ChainSchedule ExperimentConfig::schedule() const {
  return {skill_count, horizon, episodes_between_resets};
}

Optimizer ExperimentConfig::make_optimizer() const {
  return optimizer == OptimizerKind::Sgd ? Optimizer::sgd(learning_rate)
                                         : Optimizer::adam(learning_rate);
}

ExperimentConfig parse_config(std::string_view text, const ConfigOverrides& overrides) {
  ConfigOverrides entries;
  std::istringstream in{std::string(text)};
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    entries.emplace_back(std::string(trim(view.substr(0, eq))),
                         std::string(trim(view.substr(eq + 1))));
  }
  entries.insert(entries.end(), overrides.begin(), overrides.end());

  ExperimentConfig probe;
  for (const auto& [key, value] : entries) {
    if (key == "environment" || key == "method") probe.set(key, value);
  }
  ExperimentConfig cfg = ExperimentConfig::defaults(probe.environment, probe.method);
  for (const auto& [key, value] : entries) cfg.set(key, value);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

ConfigOverrides parse_overrides(const std::vector<std::string>& args) {
  ConfigOverrides out;
  for (const std::string& arg : args) {
    std::string_view view = arg;
    const auto eq = view.find('=');
    if (view.substr(0, 2) != "--" || eq == std::string_view::npos)
      throw ConfigError("override '" + arg + "': expected --key=value");
    out.emplace_back(std::string(view.substr(2, eq - 2)), std::string(view.substr(eq + 1)));
  }
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  ExperimentConfig unseeded = cfg;
  unseeded.seed = 0;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : unseeded.to_text()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace wic
