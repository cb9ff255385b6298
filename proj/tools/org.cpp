// org: command-line driver for experiments, batches, comparisons and the
// standalone RIC / xApp processes.

#include <csignal>
#include <iostream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "orgym/core/config.hpp"
#include "orgym/core/kpm_csv.hpp"
#include "orgym/orch/batch.hpp"
#include "orgym/orch/compare.hpp"
#include "orgym/orch/experiment.hpp"
#include "orgym/ric/ric_service.hpp"
#include "orgym/xapp/runtime.hpp"

using namespace orgym;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

orch::Transport parse_transport(const std::string& t) {
  if (t == "tcp") return orch::Transport::Tcp;
  if (t == "inproc") return orch::Transport::Inproc;
  throw ConfigError(ConfigError::Kind::Validation, "transport", fmt::format("unknown transport '{}'", t));
}

// Blocks SIGINT/SIGTERM in every thread spawned afterwards so that
// wait_for_signal() can collect them synchronously.
sigset_t block_stop_signals() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  return set;
}

void wait_for_signal(const sigset_t& set) {
  int sig = 0;
  sigwait(&set, &sig);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OpenRAN-style closed-loop experiment toolkit"};
  app.require_subcommand(1);

  std::string scenario_path, xapp_path = "none", out_dir, transport = "tcp";
  double duration_s = 0.0;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  run->add_option("--xapp", xapp_path, "xApp config JSON or 'none'");
  run->add_option("--duration", duration_s, "Simulated seconds")->required();
  run->add_option("--seed", seed, "RNG seed (defaults to the scenario's rng-seed)");
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--transport", transport, "tcp or inproc");

  std::string jobs_path;
  auto* batch = app.add_subcommand("batch", "Run a batch file of jobs");
  batch->add_option("--jobs", jobs_path, "Batch JSON")->required();
  batch->add_option("--transport", transport, "tcp or inproc");

  std::string dir_a, dir_b, metric, cdf_out = "compare-out";
  unsigned slice = 0;
  auto* compare = app.add_subcommand("compare", "Compare two runs on one slice metric");
  compare->add_option("A", dir_a, "Run or job directory")->required();
  compare->add_option("B", dir_b, "Run or job directory")->required();
  compare->add_option("--slice", slice, "Slice id")->required();
  compare->add_option("--metric", metric, "KPM column")->required();
  compare->add_option("--out", cdf_out, "Directory for CDF files");

  ric::RicConfig ric_config;
  std::string snapshot;
  auto* ric_cmd = app.add_subcommand("ric", "Run the RIC until interrupted");
  ric_cmd->add_option("--e2", ric_config.e2_listen, "Node listener host:port");
  ric_cmd->add_option("--xapps", ric_config.xapp_listen, "xApp listener host:port");
  ric_cmd->add_option("--snapshot", snapshot, "Registry snapshot file");
  ric_cmd->add_option("--liveness-timeout-ms", ric_config.liveness_timeout_ms, "0 disables");

  std::string xapp_config_path;
  auto* xapp_cmd = app.add_subcommand("xapp", "Run one xApp until interrupted");
  xapp_cmd->add_option("--config", xapp_config_path, "xApp config JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      orch::ExperimentSpec spec;
      spec.scenario = load_scenario_file(scenario_path);
      if (xapp_path != "none") spec.xapp = xapp::load_xapp_config(xapp_path);
      spec.duration_s = duration_s;
      spec.seed = seed.value_or(spec.scenario.rng_seed);
      spec.out = out_dir;
      spec.transport = parse_transport(transport);
      auto result = orch::run_experiment(spec);
      std::cout << fmt::format("ran {} TTIs; outputs in {}\n", result.ticks, out_dir);
      for (const auto& s : result.summary.slices) {
        std::cout << fmt::format("slice {}: median tx_tbs rate {:.1f}/s, median dl_buffer {:.0f} B\n", s.slice,
                                 s.median_tx_tbs_rate, s.median_dl_buffer_bytes);
      }
      return 0;
    }
    if (*batch) {
      auto spec = orch::load_batch_file(jobs_path);
      auto report = orch::run_batch(spec, parse_transport(transport));
      for (const auto& r : report.runs) {
        std::cout << fmt::format("{} seed {}: {}{}\n", r.job, r.seed, r.ok ? "ok" : "FAILED",
                                 r.ok ? "" : " (" + r.error + ")");
      }
      return report.failures() == 0 ? 0 : kExitRuntime;
    }
    if (*compare) {
      auto c = orch::compare_runs(dir_a, dir_b, static_cast<SliceId>(slice), metric, cdf_out);
      std::cout << orch::format_comparison(c);
      return 0;
    }
    if (*ric_cmd) {
      if (!snapshot.empty()) ric_config.registry_snapshot = snapshot;
      auto signals = block_stop_signals();
      EventLog log("RIC", log_level_from_env(LogLevel::Info));
      ric::RicService service(ric_config, log);
      service.start();
      wait_for_signal(signals);
      service.stop();
      return 0;
    }
    if (*xapp_cmd) {
      auto config = xapp::load_xapp_config(xapp_config_path);
      auto signals = block_stop_signals();
      EventLog log("XAPP", log_level_from_env(LogLevel::Info));
      xapp::XappRuntime::Options opts;
      opts.log = &log;
      xapp::XappRuntime runtime(config, std::move(opts));
      runtime.start();
      wait_for_signal(signals);
      runtime.stop();
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const orch::BatchError& e) {
    std::cerr << "batch error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CsvSchemaError& e) {
    std::cerr << "schema mismatch at column " << e.column() << ": " << e.what() << "\n";
    return kExitRuntime;
  } catch (const orch::ExperimentError& e) {
    std::cerr << e.component() << ": " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
