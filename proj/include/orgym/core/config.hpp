#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "orgym/core/types.hpp"

namespace orgym {

class ConfigError : public std::runtime_error {
 public:
  enum class Kind { Syntax, Validation };

  ConfigError(Kind kind, std::string key, const std::string& what)
      : std::runtime_error(what), kind_(kind), key_(std::move(key)) {}

  Kind kind() const { return kind_; }
  /// Offending config key; empty for syntax errors.
  const std::string& key() const { return key_; }

 private:
  Kind kind_;
  std::string key_;
};

/// Poisson packet arrivals with a fixed packet size.
struct SliceTraffic {
  double rate_pps = 0.0;
  std::uint32_t packet_bytes = 0;
  friend bool operator==(const SliceTraffic&, const SliceTraffic&) = default;
};

/// eMBB, MTC, URLLC defaults; slices past the third reuse the eMBB profile.
SliceTraffic default_traffic(SliceId slice);

struct ChannelParams {
  double cqi_step_prob = 0.05;
  int initial_cqi_min = 6;
  int initial_cqi_max = 15;
  friend bool operator==(const ChannelParams&, const ChannelParams&) = default;
};

inline constexpr std::uint32_t kMinReportPeriodMs = 10;
inline constexpr std::uint32_t kMaxReportPeriodMs = 1000;

struct ScenarioConfig {
  bool network_slicing = true;
  SliceAllocation slice_allocation;
  std::vector<SchedulingPolicy> slice_scheduling_policy;
  std::map<SliceId, std::vector<UeId>> slice_users;
  std::uint32_t num_bs = 1;
  std::uint32_t ues_per_bs = 0;
  std::uint32_t tti_ms = 1;
  std::uint32_t report_period_ms = 250;
  std::uint32_t control_period_ms = 1000;
  std::vector<SliceTraffic> traffic;
  ChannelParams channel;
  double pf_alpha = 0.05;
  double pf_epsilon = 1.0;
  std::uint64_t rng_seed = 1;

  std::size_t num_slices() const { return slice_scheduling_policy.size(); }
  /// All UE ids of one base station, ascending.
  std::vector<UeId> ue_ids() const;
  SliceId slice_of(UeId ue) const;
  ControlAction initial_action() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Parses and validates a scenario document. Keys use the dashed radio.conf
/// names (`network-slicing`, `slice-allocation`, ...); unknown keys are
/// rejected. `slice-allocation` and `slice-users` accept either a JSON object
/// with integer-string keys or a string in the compact `{0:[0,3],1:[5,7]}`
/// notation.
ScenarioConfig parse_scenario_config(std::string_view text);

/// Throws ConfigError(Validation) if `config` breaks a scenario invariant.
void validate_scenario_config(const ScenarioConfig& config);

/// Canonical JSON form; parse_scenario_config(serialize_scenario_config(c)) == c.
std::string serialize_scenario_config(const ScenarioConfig& config);

ScenarioConfig load_scenario_file(const std::string& path);

/// Throws ConfigError(Validation) naming `key` unless `period_ms` lies in the
/// near-RT band [10, 1000] ms.
void check_report_period(std::uint32_t period_ms, const std::string& key);

}  // namespace orgym
