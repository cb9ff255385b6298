#include "orgym/orch/experiment.hpp"

#include <cmath>
#include <fstream>
#include <memory>

#include <fmt/format.h>

#include "json.hpp"
#include "orgym/ran/e2_node.hpp"
#include "orgym/ric/ric_service.hpp"

namespace orgym::orch {

using nlohmann::ordered_json;

std::string node_metrics_file(const NodeId& node) { return node.file_stem() + "_metrics.csv"; }
std::string xapp_kpm_file(const NodeId& node) { return "xapp_" + node.file_stem() + "_kpm.csv"; }
std::string xapp_controls_file(const NodeId& node) { return "xapp_" + node.file_stem() + "_controls.csv"; }

namespace {

std::string run_metadata(const ExperimentSpec& spec, const ScenarioConfig& scenario) {
  ordered_json meta;
  meta["seed"] = spec.seed;
  meta["duration-s"] = spec.duration_s;
  meta["transport"] = spec.transport == Transport::Tcp ? "tcp" : "inproc";
  meta["scenario"] = ordered_json::parse(serialize_scenario_config(scenario));
  if (spec.xapp) {
    const auto& x = *spec.xapp;
    meta["xapp"] = ordered_json{{"logic", x.logic},
                                {"report-period-ms", x.report_period_ms},
                                {"control-period-ms", x.control_period_ms},
                                {"epsilon", x.epsilon},
                                {"reward-weights", x.reward_weights}};
  } else {
    meta["xapp"] = "none";
  }
  return meta.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (!(spec.duration_s >= 0.0) || !std::isfinite(spec.duration_s)) {
    throw ConfigError(ConfigError::Kind::Validation, "duration", "duration must be a non-negative number");
  }
  ScenarioConfig scenario = spec.scenario;
  scenario.rng_seed = spec.seed;
  validate_scenario_config(scenario);
  std::filesystem::create_directories(spec.out);

  std::ofstream ric_log_file(spec.out / "ric.log");
  EventLog ric_log("RIC");
  ric_log.add_sink(&ric_log_file);
  EventLog ran_log("RAN");
  EventLog xapp_log("XAPP");

  ric::RicConfig rc;
  if (spec.transport == Transport::Tcp) {
    rc.e2_listen = "127.0.0.1:0";
    rc.xapp_listen = "127.0.0.1:0";
  } else {
    rc.e2_listen = "inproc://";
    rc.xapp_listen = "inproc://";
  }
  ric::RicService ric(rc, ric_log);
  try {
    ric.start();
  } catch (const std::exception& e) {
    throw ExperimentError("ric", fmt::format("RIC failed to start: {}", e.what()));
  }

  std::vector<std::unique_ptr<ran::E2NodeAgent>> nodes;
  std::vector<std::unique_ptr<xapp::XappRuntime>> xapps;
  // Destroyed in reverse: xApps, then nodes, then the RIC.
  auto teardown = [&] {
    for (auto it = xapps.rbegin(); it != xapps.rend(); ++it) (*it)->stop();
    for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) (*it)->disconnect();
    xapps.clear();
    nodes.clear();
    ric.stop();
  };

  ExperimentResult result;
  try {
    for (std::uint32_t b = 0; b < scenario.num_bs; ++b) {
      ran::Cell cell(scenario, b, spec.seed);
      const NodeId id = cell.node();
      ran::E2NodeAgent::Options opts;
      opts.report_period_ms = scenario.report_period_ms;
      opts.csv_path = spec.out / node_metrics_file(id);
      opts.log = &ran_log;
      auto agent = std::make_unique<ran::E2NodeAgent>(std::move(cell), opts);
      try {
        agent->connect(ric.e2_endpoint());
      } catch (const std::exception& e) {
        throw ExperimentError("ran-sim", fmt::format("base station {} failed E2 setup: {}", id.str(), e.what()));
      }
      nodes.push_back(std::move(agent));
    }

    if (spec.xapp) {
      for (std::uint32_t b = 0; b < nodes.size(); ++b) {
        const NodeId& id = nodes[b]->node();
        xapp::XappConfig xc = *spec.xapp;
        xc.ric = ric.xapp_endpoint();
        xc.node = id.str();
        xc.kpm_log = spec.out / xapp_kpm_file(id);
        xc.seed = ran::derive_seed(spec.seed, {b, 0x78617070});
        xc.total_rbgs = scenario.slice_allocation.total_rbgs;
        xapp::XappRuntime::Options xo;
        xo.log = &xapp_log;
        xo.initial_action = scenario.initial_action();
        xo.control_log = spec.out / xapp_controls_file(id);
        try {
          auto rt = std::make_unique<xapp::XappRuntime>(xc, std::move(xo));
          rt->start();
          xapps.push_back(std::move(rt));
        } catch (const std::exception& e) {
          throw ExperimentError("xapp", fmt::format("xApp for {} failed to start: {}", id.str(), e.what()));
        }
      }
    }

    const auto ticks = static_cast<std::uint64_t>(std::llround(spec.duration_s * 1000.0)) / scenario.tti_ms;
    std::vector<std::uint64_t> expected(nodes.size(), 0);
    for (std::uint64_t t = 0; t < ticks; ++t) {
      bool any = false;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        auto sent = nodes[i]->tick();
        expected[i] += sent;
        any = any || sent > 0;
      }
      if (!any) continue;
      for (std::size_t i = 0; i < xapps.size(); ++i) {
        if (!xapps[i]->wait_processed(expected[i], spec.barrier_timeout)) {
          throw ExperimentError("xapp", fmt::format("xApp for {} stalled at t={} ms ({} of {} indications)",
                                                    nodes[i]->node().str(), nodes[i]->now_ms(),
                                                    xapps[i]->processed(), expected[i]));
        }
      }
    }
    result.ticks = ticks;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      NodeReport r;
      r.node = nodes[i]->node().str();
      r.indications_sent = nodes[i]->indications_sent();
      if (i < xapps.size()) r.controls = xapps[i]->controls();
      result.nodes.push_back(std::move(r));
    }
  } catch (...) {
    teardown();
    throw;
  }
  teardown();

  write_text(spec.out / "run.json", run_metadata(spec, scenario));
  result.summary = summarize_run_dir(spec.out);
  write_text(spec.out / "summary.json", summary_to_json(result.summary));
  return result;
}

}  // namespace orgym::orch
