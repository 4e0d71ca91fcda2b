#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dtm/error.hpp"
#include "dtm/harness/report.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

void print_report(const dtm::harness::RunOutput& out) {
  const auto& r = out.report;
  fmt::print("phi_baseline={} phi_treated={} improvement_pct={} trades={} total_spend={}\n",
             dtm::harness::format_seconds(r.phi_baseline), dtm::harness::format_seconds(r.phi_treated),
             dtm::harness::format_seconds(r.improvement_pct), r.trades, r.total_spend.str());
  for (const auto& f : out.backend_failures) fmt::print(stderr, "backend failure: {}\n", f);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traffic data market simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::vector<double> flows;
  unsigned threads = 0;
  long trade_time = 0;

  auto* run = app.add_subcommand("run", "Run one scenario and write trades, metrics and negotiations");
  run->add_option("config", config_path, "Scenario config (key=value)")->required();
  run->add_option("--out", out_dir, "Output directory")->required();

  auto* sweep = app.add_subcommand("sweep", "Run flow x preference cells and write heatmap.csv and price_value.csv");
  sweep->add_option("config", config_path, "Base scenario config")->required();
  sweep->add_option("--flows", flows, "Comma-separated flows in veh/h")->delimiter(',')->required();
  sweep->add_option("--out", out_dir, "Output directory")->required();
  sweep->add_option("--threads", threads, "Worker threads (0 = all cores)");

  auto* oracle = app.add_subcommand("oracle", "Print the twin-run value of the configured accident report");
  oracle->add_option("config", config_path, "Scenario config")->required();
  oracle->add_option("--trade-time", trade_time, "Trade time in seconds")->required();

  auto* replay = app.add_subcommand("replay", "Run a scripted-decision fixture (no model calls)");
  replay->add_option("fixture", config_path, "Replay fixture")->required();
  replay->add_option("--out", out_dir, "Output directory")->default_val("replay_out");

  auto* validate = app.add_subcommand("validate", "Check a config and echo its effective values");
  validate->add_option("config", config_path, "Scenario config")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      fmt::print("{}", dtm::harness::echo_config(dtm::harness::load_config(config_path)));
    } else if (*run) {
      const auto out = dtm::harness::run_once(dtm::harness::load_config(config_path));
      dtm::harness::write_run_output(out, out_dir);
      print_report(out);
    } else if (*sweep) {
      dtm::harness::SweepSpec spec;
      spec.base = dtm::harness::load_config(config_path);
      spec.flows = flows;
      spec.threads = threads;
      const auto result = dtm::harness::run_sweep(spec);
      dtm::harness::write_sweep_output(result, out_dir);
      for (const auto& cell : result.cells)
        if (cell.error) fmt::print(stderr, "cell flow={} {}/{}: {}\n", cell.flow_vph, dtm::agents::to_string(cell.risk),
                                   dtm::agents::to_string(cell.sensitivity), *cell.error);
    } else if (*oracle) {
      const auto r = dtm::harness::oracle_for_config(dtm::harness::load_config(config_path), trade_time);
      fmt::print("phi_baseline={}\nphi_adjusted={}\nseconds_saved={}\n", r.phi_baseline, r.phi_adjusted,
                 r.value.seconds_saved);
    } else if (*replay) {
      const auto out = dtm::harness::run_replay(dtm::harness::load_replay_fixture(config_path));
      dtm::harness::write_run_output(out, out_dir);
      print_report(out);
    }
  } catch (const dtm::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
