#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wic/config.hpp"
#include "wic/diffnum.hpp"
#include "wic/metrics.hpp"
#include "wic/run_record.hpp"

namespace wic {

struct RunOptions {
  // Root under which the run directory is created; nothing is written when
  // unset.
  std::optional<std::filesystem::path> output_root;
  // Called after every update with the freshly logged row.
  std::function<void(const MetricsRow&)> on_update;
};

struct RunResult {
  ExperimentConfig config;
  RunRecord record;
  ParamFunction policy;
  ParamFunction baseline;
  // Potential bank (wic) or discriminator (vic) network.
  ParamFunction objective;
  // Evaluation endpoints from the canonical start after training.
  std::vector<EndpointRow> endpoints;
  std::filesystem::path run_dir;
};

// $WICLAB_OUTPUT_ROOT, or ./runs when unset.
std::filesystem::path default_output_root();

// "<config hash>_seed<seed>".
std::string run_directory_name(const ExperimentConfig& cfg);

// Trains one seeded run. Each update collects a batch of chained skill
// episodes under the current policy, labels their rewards with the current
// objective, takes one objective step, then one policy and one baseline step.
// Bit-reproducible for a given config.
//
// Files (when output_root is set): config.txt, metrics.csv, policy.ckpt,
// baseline.ckpt, potential.ckpt or discriminator.ckpt, and, after a
// non-empty run, endpoints.csv/svg, heatmap.csv/svg and curves.svg.
RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

struct ReportResult {
  std::vector<EndpointRow> endpoints;
  std::vector<Matrix> heatmaps;
};

// Endpoints and reward heatmaps for a trained policy/objective pair.
ReportResult make_report(const ExperimentConfig& cfg, const ParamFunction& policy,
                         const ParamFunction& objective, int n_rollouts, Rng& rng);

// Loads config.txt and checkpoints from a run directory, regenerates the
// report, and writes endpoints.csv/svg and heatmap.csv/svg into it.
ReportResult report_run(const std::filesystem::path& run_dir, int n_rollouts,
                        std::uint64_t seed);

std::string objective_checkpoint_name(Method method);

struct AggregateSeries {
  std::string metric;
  std::vector<double> mean;
  std::vector<double> stddev;  // population standard deviation across seeds
};

struct AggregateReport {
  std::vector<std::uint64_t> seeds;
  std::vector<int> updates;
  std::vector<AggregateSeries> series;
  std::vector<RunResult> runs;

  const AggregateSeries& get(const std::string& metric) const;
  std::string to_csv() const;
};

// Runs the config once per seed on up to `workers` threads (0 = hardware
// concurrency) and aggregates each logged metric across seeds. When the
// options carry an output root, also writes sweep_<hash>/aggregate.csv and
// aggregate.svg there.
AggregateReport multi_seed(const ExperimentConfig& cfg, std::span<const std::uint64_t> seeds,
                           const RunOptions& options = {}, unsigned workers = 0);

}  // namespace wic
