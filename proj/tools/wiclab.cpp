#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wic/errors.hpp"
#include "wic/experiment.hpp"

namespace {

wic::ConfigOverrides collect_overrides(const std::vector<std::string>& extras) {
  return wic::parse_overrides(extras);
}

void print_summary(const wic::RunResult& r) {
  const auto& rows = r.record.rows();
  if (!rows.empty()) {
    const auto& last = rows.back();
    std::printf("update %d: episodic coverage %.3f, lifetime coverage %d, mean return %.4f\n",
                last.update, last.episodic_coverage, last.lifetime_coverage, last.mean_return);
  }
  if (!r.endpoints.empty())
    std::printf("eval endpoints: mean BFS distance %.3f over %zu rollouts\n",
                wic::mean_endpoint_distance(r.endpoints), r.endpoints.size());
  if (!r.run_dir.empty()) std::printf("wrote %s\n", r.run_dir.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"WIC / VIC intrinsic-control lab"};
  app.require_subcommand(1);

  std::string run_config;
  int log_every = 0;
  auto* run = app.add_subcommand("run", "train one seeded run; extra --key=value flags override the config");
  run->add_option("config", run_config, "config file (key = value lines)")->required();
  run->add_option("--log-every", log_every, "print a metrics line every N updates (0 = quiet)");
  run->allow_extras();

  std::string report_dir;
  int rollouts = 50;
  std::uint64_t report_seed = 0;
  auto* report = app.add_subcommand("report", "regenerate endpoints and heatmaps from a run directory");
  report->add_option("run_dir", report_dir, "directory written by `run`")->required();
  report->add_option("--rollouts", rollouts, "evaluation rollouts per skill");
  report->add_option("--eval-seed", report_seed, "seed for the evaluation rollouts");

  std::string sweep_config;
  std::vector<std::uint64_t> seeds;
  unsigned workers = 0;
  auto* sweep = app.add_subcommand("sweep", "run a config over several seeds and aggregate");
  sweep->add_option("config", sweep_config, "config file")->required();
  sweep->add_option("--seeds", seeds, "seeds, comma separated")->delimiter(',')->required();
  sweep->add_option("--workers", workers, "worker threads (0 = hardware concurrency)");
  sweep->allow_extras();

  CLI11_PARSE(app, argc, argv);

  try {
    const wic::RunOptions base{wic::default_output_root(), {}};
    if (*run) {
      const auto cfg = wic::load_config_file(run_config, collect_overrides(run->remaining()));
      wic::RunOptions options = base;
      if (log_every > 0)
        options.on_update = [log_every](const wic::MetricsRow& row) {
          if (row.update % log_every == 0)
            std::printf("%6d  cov %.3f  life %3d  ret %+.4f  loss %+.4f  ent %.3f\n", row.update,
                        row.episodic_coverage, row.lifetime_coverage, row.mean_return,
                        row.objective_loss, row.policy_entropy);
        };
      print_summary(wic::run_experiment(cfg, options));
    } else if (*report) {
      const auto r = wic::report_run(report_dir, rollouts, report_seed);
      std::printf("mean endpoint BFS distance %.3f over %zu rollouts\n",
                  wic::mean_endpoint_distance(r.endpoints), r.endpoints.size());
    } else if (*sweep) {
      const auto cfg = wic::load_config_file(sweep_config, collect_overrides(sweep->remaining()));
      const auto agg = wic::multi_seed(cfg, seeds, base, workers);
      for (const auto& r : agg.runs) {
        std::printf("seed %llu: ", static_cast<unsigned long long>(r.config.seed));
        print_summary(r);
      }
    }
  } catch (const wic::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
