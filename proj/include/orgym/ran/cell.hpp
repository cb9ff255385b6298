#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "orgym/core/config.hpp"
#include "orgym/core/types.hpp"
#include "orgym/ran/channel.hpp"
#include "orgym/ran/schedulers.hpp"

namespace orgym::ran {

/// Cumulative per-UE counters; KPM windows are differences of these.
struct UeCounters {
  std::uint64_t tx_bytes = 0;
  std::uint64_t tx_tbs = 0;
  std::uint64_t granted_rbgs = 0;
};

struct UeState {
  UeId ue_id = 0;
  SliceId slice = 0;
  std::uint64_t dl_buffer_bytes = 0;
  int cqi = 1;
  double avg_tput = 0.0;
  Rng traffic_rng;
  Rng channel_rng;
  UeCounters totals;
};

struct CellParams {
  SliceAllocation allocation;
  std::vector<SchedulingPolicy> policies;
  bool network_slicing = true;
  TrafficModel traffic;
  ChannelModel channel;
  double pf_alpha = 0.05;
  double pf_epsilon = 1.0;
  std::uint32_t tti_ms = 1;
};

struct UeTti {
  UeId ue_id = 0;
  SliceId slice = 0;
  std::uint64_t arrivals = 0;
  std::uint64_t served = 0;
  std::uint32_t granted_rbgs = 0;
};

/// What happened in one TTI; `rbg_owner` is indexed by absolute RBG number.
struct TtiOutcome {
  std::uint64_t clock_tti = 0;
  std::vector<UeTti> ues;
  std::vector<std::optional<UeId>> rbg_owner;
};

/// Baseline for one consumer of KPM windows (the CSV logger or one
/// subscription).
class KpmAccumulator {
 public:
  UeCounters take_delta(UeId ue, const UeCounters& now);

 private:
  std::map<UeId, UeCounters> baseline_;
};

/// One simulated base station. Single owner; not thread-safe.
class Cell {
 public:
  /// Builds base station `bs_index` of `config`, drawing every random
  /// quantity from per-UE substreams of `seed`.
  Cell(const ScenarioConfig& config, std::uint32_t bs_index, std::uint64_t seed);
  Cell(NodeId node, CellParams params, std::vector<UeState> ues);

  /// Arrivals, channel update, per-slice scheduling, transmission, counters;
  /// advances the clock by one TTI.
  TtiOutcome step_tti();

  /// Replaces allocation and policies for the following TTIs. A rejected
  /// action leaves the cell untouched.
  std::optional<Rejection> apply_control(const ControlAction& action);
  std::optional<Rejection> check_control(const ControlAction& action) const;

  /// One record per UE with counters since the previous call, then resets.
  std::vector<KpmRecord> collect_kpms();
  std::vector<KpmRecord> collect_kpms(KpmAccumulator& window) const;

  const NodeId& node() const { return node_; }
  std::uint64_t clock_tti() const { return clock_tti_; }
  std::uint64_t now_ms() const { return clock_tti_ * params_.tti_ms; }
  std::uint32_t tti_ms() const { return params_.tti_ms; }
  const SliceAllocation& allocation() const { return params_.allocation; }
  const std::vector<SchedulingPolicy>& policies() const { return params_.policies; }
  std::size_t num_slices() const { return params_.policies.size(); }
  const std::vector<UeState>& ues() const { return ues_; }
  UeState& mutable_ue(UeId ue);
  std::size_t rr_cursor(SliceId group) const { return cursors_.at(group); }

 private:
  struct Group {
    std::vector<std::uint32_t> rbgs;
    std::vector<std::size_t> ue_index;
    SchedulingPolicy policy;
  };

  std::vector<Group> groups() const;
  std::uint32_t slice_rbg_count(SliceId slice) const;
  SchedulingPolicy slice_policy(SliceId slice) const;

  NodeId node_;
  CellParams params_;
  std::vector<UeState> ues_;
  std::vector<std::size_t> cursors_;
  std::uint64_t clock_tti_ = 0;
  KpmAccumulator default_window_;
};

}  // namespace orgym::ran
