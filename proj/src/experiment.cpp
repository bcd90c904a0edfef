#include "wic/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "wic/discriminator.hpp"
#include "wic/errors.hpp"
#include "wic/figures.hpp"
#include "wic/policy.hpp"
#include "wic/potential.hpp"

namespace wic {

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Evaluation draws use their own stream so that changing eval_rollouts never
// perturbs training.
Rng eval_rng(std::uint64_t seed) { return Rng(seed ^ 0xa0761d6478bd642fULL); }

std::vector<Matrix> objective_heatmap(const ExperimentConfig& cfg, const GridSpec& spec,
                                      const ParamFunction& objective) {
  if (cfg.method == Method::Wic)
    return reward_heatmap(PotentialBank(spec, objective, cfg.skill_count), spec.start());
  return reward_heatmap(Discriminator(spec, objective, cfg.skill_count), spec.start());
}

void write_report_files(const fs::path& dir, const ExperimentConfig& cfg, const GridSpec& spec,
                        const ReportResult& report) {
  const std::string tag = std::string(to_string(cfg.method)) + " / " +
                          std::string(to_string(cfg.environment)) + " / seed " +
                          std::to_string(cfg.seed);
  write_file(dir / "endpoints.csv", endpoints_csv(report.endpoints));
  write_file(dir / "endpoints.svg",
             endpoints_svg(spec, report.endpoints, cfg.skill_count, "Skill endpoints: " + tag));
  write_file(dir / "heatmap.csv", heatmap_csv(report.heatmaps));
  write_file(dir / "heatmap.svg", heatmap_svg(spec, report.heatmaps, "Reward maps: " + tag));
}

Curve single_curve(const RunRecord& record, const std::string& label,
                   double MetricsRow::*field) {
  Curve c{label, {}, {}, {}};
  for (const auto& row : record.rows()) {
    c.x.push_back(row.update);
    c.mean.push_back(row.*field);
  }
  return c;
}

double mean_skipping_nan(const std::vector<double>& v) {
  double sum = 0.0;
  int n = 0;
  for (double x : v) {
    if (std::isnan(x)) continue;
    sum += x;
    ++n;
  }
  return n ? sum / n : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

fs::path default_output_root() {
  if (const char* env = std::getenv("WICLAB_OUTPUT_ROOT"); env && *env) return env;
  return "runs";
}

std::string run_directory_name(const ExperimentConfig& cfg) {
  return config_hash(cfg) + "_seed" + std::to_string(cfg.seed);
}

std::string objective_checkpoint_name(Method method) {
  return method == Method::Wic ? "potential.ckpt" : "discriminator.ckpt";
}

ReportResult make_report(const ExperimentConfig& cfg, const ParamFunction& policy,
                         const ParamFunction& objective, int n_rollouts, Rng& rng) {
  const GridSpec spec = cfg.grid();
  const SkillPolicy pi(spec, policy, cfg.skill_count);
  ReportResult out;
  out.endpoints = endpoint_report(pi, cfg.horizon, n_rollouts, rng);
  out.heatmaps = objective_heatmap(cfg, spec, objective);
  return out;
}

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  const GridSpec spec = cfg.grid();
  const Topology topo = cfg.topology();
  const int K = cfg.skill_count;
  Rng rng(cfg.seed);

  SkillPolicy policy = SkillPolicy::zeros(spec, topo, K);
  policy.net().init_glorot(rng);
  Baseline baseline = Baseline::zeros(spec, topo);
  baseline.net().init_glorot(rng);
  std::optional<PotentialBank> bank;
  std::optional<Discriminator> disc;
  if (cfg.method == Method::Wic) {
    bank.emplace(PotentialBank::zeros(spec, topo, K));
    bank->net().init_glorot(rng);
  } else {
    disc.emplace(Discriminator::zeros(spec, topo, K));
    disc->net().init_glorot(rng);
  }
  Optimizer policy_opt = cfg.make_optimizer();
  Optimizer baseline_opt = cfg.make_optimizer();
  Optimizer objective_opt = cfg.make_optimizer();
  const WicConfig wic_cfg = cfg.wic();

  EpisodeChain chain(spec, cfg.schedule());
  LifetimeCoverage lifetime(spec);
  const DistanceTable distances(spec);
  RunRecord record(K);

  std::vector<SkillEpisode> batch;
  std::vector<EndpointSample> endpoints;
  for (int update = 1; update <= cfg.total_updates; ++update) {
    const ActionTable table = policy.table();
    const SkillPolicyFn act = table.as_policy();
    batch.clear();
    for (int i = 0; i < cfg.episodes_per_update; ++i) batch.push_back(chain.next(act, rng));

    MetricsRow row;
    row.update = update;
    if (bank) {
      label_episode_rewards(*bank, batch, cfg.eta);
      const auto loss = train_potential_step(*bank, batch, wic_cfg, objective_opt, rng);
      row.objective_loss = loss.potential_loss + cfg.lipschitz_weight * loss.lipschitz_loss;
    } else {
      label_vic_rewards(*disc, batch);
      endpoints.clear();
      for (const auto& ep : batch) endpoints.push_back(endpoint_of(ep));
      row.objective_loss = train_discriminator_step(*disc, endpoints, objective_opt);
    }
    const ReinforceReport rep = reinforce_update(policy, baseline, batch, cfg.entropy_weight,
                                                 policy_opt, baseline_opt);

    std::vector<double> dist_sum(K, 0.0);
    std::vector<int> dist_count(K, 0);
    double coverage = 0.0;
    for (const auto& ep : batch) {
      lifetime.add(ep);
      coverage += episodic_coverage(ep);
      dist_sum[ep.skill.index] += distances(ep.start, ep.end());
      ++dist_count[ep.skill.index];
    }
    row.episodic_coverage = coverage / static_cast<double>(batch.size());
    row.lifetime_coverage = lifetime.count();
    row.mean_return = rep.mean_return;
    row.policy_entropy = rep.mean_entropy;
    for (int w = 0; w < K; ++w)
      row.endpoint_distance.push_back(dist_count[w] ? dist_sum[w] / dist_count[w]
                                                    : std::numeric_limits<double>::quiet_NaN());
    record.append(row);
    if (options.on_update) options.on_update(record.rows().back());
  }

  RunResult result{cfg,
                   std::move(record),
                   policy.net(),
                   baseline.net(),
                   bank ? bank->net() : disc->net(),
                   {},
                   {}};
  std::optional<ReportResult> report;
  if (cfg.total_updates > 0 && cfg.eval_rollouts > 0) {
    Rng erng = eval_rng(cfg.seed);
    report = make_report(cfg, result.policy, result.objective, cfg.eval_rollouts, erng);
    result.endpoints = report->endpoints;
  }

  if (options.output_root) {
    const fs::path dir = *options.output_root / run_directory_name(cfg);
    fs::create_directories(dir);
    result.run_dir = dir;
    write_file(dir / "config.txt", cfg.to_text());
    write_file(dir / "metrics.csv", result.record.to_csv());
    write_checkpoint((dir / "policy.ckpt").string(), result.policy,
                     {static_cast<std::uint32_t>(K), static_cast<std::uint32_t>(kNumActions)});
    write_checkpoint((dir / "baseline.ckpt").string(), result.baseline);
    write_checkpoint((dir / objective_checkpoint_name(cfg.method)).string(), result.objective,
                     {static_cast<std::uint32_t>(K), 0});
    if (report) {
      write_report_files(dir, cfg, spec, *report);
      write_file(dir / "curves.svg",
                 curves_svg({single_curve(result.record, "episodic coverage",
                                          &MetricsRow::episodic_coverage),
                             single_curve(result.record, "mean return", &MetricsRow::mean_return)},
                            "Training curves", "value"));
    }
  }
  return result;
}

ReportResult report_run(const fs::path& run_dir, int n_rollouts, std::uint64_t seed) {
  const ExperimentConfig cfg = parse_config(read_file(run_dir / "config.txt"));
  const Checkpoint policy = read_checkpoint((run_dir / "policy.ckpt").string());
  const Checkpoint objective =
      read_checkpoint((run_dir / objective_checkpoint_name(cfg.method)).string());
  if (policy.extra[0] != static_cast<std::uint32_t>(cfg.skill_count) ||
      policy.extra[1] != static_cast<std::uint32_t>(kNumActions))
    throw ConfigError("policy.ckpt: header does not match config (K, |A|)");
  if (objective.extra[0] != static_cast<std::uint32_t>(cfg.skill_count))
    throw ConfigError(objective_checkpoint_name(cfg.method) + ": header K does not match config");
  Rng rng(seed);
  ReportResult report = make_report(cfg, policy.function, objective.function, n_rollouts, rng);
  write_report_files(run_dir, cfg, cfg.grid(), report);
  return report;
}

const AggregateSeries& AggregateReport::get(const std::string& metric) const {
  for (const auto& s : series)
    if (s.metric == metric) return s;
  throw ContractViolation("aggregate: no metric named " + metric);
}

std::string AggregateReport::to_csv() const {
  std::string out = "update";
  for (const auto& s : series) out += "," + s.metric + "_mean," + s.metric + "_std";
  out += '\n';
  char buf[40];
  for (std::size_t i = 0; i < updates.size(); ++i) {
    out += std::to_string(updates[i]);
    for (const auto& s : series) {
      std::snprintf(buf, sizeof(buf), ",%.17g", s.mean[i]);
      out += buf;
      std::snprintf(buf, sizeof(buf), ",%.17g", s.stddev[i]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

AggregateReport multi_seed(const ExperimentConfig& cfg, std::span<const std::uint64_t> seeds,
                           const RunOptions& options, unsigned workers) {
  require(!seeds.empty(), "multi_seed: at least one seed is required");
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(seeds.size()));

  AggregateReport report;
  report.seeds.assign(seeds.begin(), seeds.end());
  std::vector<std::optional<RunResult>> results(seeds.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      ExperimentConfig run_cfg = cfg;
      run_cfg.seed = seeds[i];
      results[i] = run_experiment(run_cfg, options);
    }
  };
  std::vector<std::future<void>> pool;
  for (unsigned w = 0; w < workers; ++w) pool.push_back(std::async(std::launch::async, work));
  for (auto& f : pool) f.get();
  for (auto& r : results) report.runs.push_back(std::move(*r));

  // Aggregate over the update indices every run logged.
  std::size_t n_rows = report.runs.front().record.rows().size();
  for (const auto& r : report.runs) n_rows = std::min(n_rows, r.record.rows().size());
  for (std::size_t i = 0; i < n_rows; ++i)
    report.updates.push_back(report.runs.front().record.rows()[i].update);

  using Getter = std::function<double(const MetricsRow&)>;
  const std::vector<std::pair<std::string, Getter>> metrics = {
      {"episodic_coverage", [](const MetricsRow& r) { return r.episodic_coverage; }},
      {"lifetime_coverage", [](const MetricsRow& r) { return double(r.lifetime_coverage); }},
      {"mean_return", [](const MetricsRow& r) { return r.mean_return; }},
      {"objective_loss", [](const MetricsRow& r) { return r.objective_loss; }},
      {"policy_entropy", [](const MetricsRow& r) { return r.policy_entropy; }},
      {"endpoint_distance", [](const MetricsRow& r) { return mean_skipping_nan(r.endpoint_distance); }},
  };
  for (const auto& [name, get] : metrics) {
    AggregateSeries s{name, {}, {}};
    for (std::size_t i = 0; i < n_rows; ++i) {
      std::vector<double> values;
      for (const auto& r : report.runs) {
        const double v = get(r.record.rows()[i]);
        if (!std::isnan(v)) values.push_back(v);
      }
      double mean = std::numeric_limits<double>::quiet_NaN();
      double var = std::numeric_limits<double>::quiet_NaN();
      if (!values.empty()) {
        mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        var /= static_cast<double>(values.size());
      }
      s.mean.push_back(mean);
      s.stddev.push_back(std::sqrt(var));
    }
    report.series.push_back(std::move(s));
  }

  if (options.output_root) {
    const fs::path dir = *options.output_root / ("sweep_" + config_hash(cfg));
    fs::create_directories(dir);
    write_file(dir / "aggregate.csv", report.to_csv());
    std::vector<Curve> curves;
    for (const char* name : {"episodic_coverage", "endpoint_distance", "mean_return"}) {
      const auto& s = report.get(name);
      std::vector<double> x(report.updates.begin(), report.updates.end());
      curves.push_back({name, x, s.mean, s.stddev});
    }
    write_file(dir / "aggregate.svg",
               curves_svg(curves, "Mean +/- std over " + std::to_string(seeds.size()) + " seeds",
                          "value"));
  }
  return report;
}

}  // namespace wic
