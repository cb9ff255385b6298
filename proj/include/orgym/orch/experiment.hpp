#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "orgym/core/config.hpp"
#include "orgym/orch/summary.hpp"
#include "orgym/xapp/runtime.hpp"

namespace orgym::orch {

enum class Transport { Tcp, Inproc };

/// A component failed to start or stalled; `component()` names it.
class ExperimentError : public std::runtime_error {
 public:
  ExperimentError(std::string component, const std::string& what)
      : std::runtime_error(what), component_(std::move(component)) {}
  const std::string& component() const { return component_; }

 private:
  std::string component_;
};

struct ExperimentSpec {
  ScenarioConfig scenario;
  /// One xApp per base station; its `ric`, `node` and `kpm-log` are filled in.
  std::optional<xapp::XappConfig> xapp;
  double duration_s = 0.0;
  std::uint64_t seed = 1;
  std::filesystem::path out;
  Transport transport = Transport::Tcp;
  /// Upper bound on waiting for an xApp to absorb one TTI's indications.
  std::chrono::milliseconds barrier_timeout{30000};
};

struct NodeReport {
  std::string node;
  std::uint64_t indications_sent = 0;
  std::vector<xapp::ControlTrace> controls;
};

struct ExperimentResult {
  RunSummary summary;
  std::uint64_t ticks = 0;
  std::vector<NodeReport> nodes;
};

/// File names inside a run directory.
std::string node_metrics_file(const NodeId& node);
std::string xapp_kpm_file(const NodeId& node);
std::string xapp_controls_file(const NodeId& node);

/// Starts a RIC, one simulated base station per `scenario.num_bs` and the
/// optional xApps; drives the simulated clock in lockstep for `duration_s`;
/// tears everything down in reverse order and writes the run directory:
/// per-node KPM CSVs, xApp KPM and control logs, ric.log, run.json and
/// summary.json. Outputs other than ric.log depend only on the inputs.
ExperimentResult run_experiment(const ExperimentSpec& spec);

}  // namespace orgym::orch
