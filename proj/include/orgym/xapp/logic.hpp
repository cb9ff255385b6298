#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "orgym/core/types.hpp"

namespace orgym::xapp {

/// Per-slice objective. Slice 0 is eMBB (maximize tx_bytes), slice 1 MTC
/// (maximize tx_tbs), slice 2 URLLC (minimize dl_buffer_bytes); further
/// slices use the eMBB objective. Rewards are per-record means scaled by a
/// non-negative per-slice weight (missing weights are 1).
struct RewardSpec {
  std::vector<double> weights = {1.0, 1.0, 1.0};

  double weight(SliceId slice) const { return slice < weights.size() ? weights[slice] : 1.0; }
  double reward(SliceId slice, std::span<const KpmRecord* const> records) const;
};

/// Data-driven logic unit fed one control-period window of KPMs at a time.
class LogicUnit {
 public:
  virtual ~LogicUnit() = default;

  /// Returns the action to send, or nullopt for "no change".
  virtual std::optional<ControlAction> decide(std::span<const KpmRecord> window) = 0;
  /// Result of sending the last returned action.
  virtual void on_outcome(const ControlAction& /*sent*/, bool /*applied*/) {}
};

/// Never acts: the KPM-logger xApp.
class NullLogic final : public LogicUnit {
 public:
  std::optional<ControlAction> decide(std::span<const KpmRecord>) override { return std::nullopt; }
};

struct ArmStats {
  double sum = 0.0;
  std::uint64_t pulls = 0;
  double mean() const { return pulls ? sum / static_cast<double>(pulls) : 0.0; }
};

using SliceArms = std::array<ArmStats, kNumPolicies>;

/// `sched`: per-slice epsilon-greedy choice among the scheduling policies.
///
/// Each window's reward is credited to the policy its records report. Untried
/// policies are chosen first in code order; afterwards the best running mean
/// wins (lowest code on ties) except with probability epsilon, when a policy
/// is drawn uniformly. The slice allocation is echoed unchanged.
class SchedLogic : public LogicUnit {
 public:
  SchedLogic(ControlAction initial, std::uint32_t total_rbgs, double epsilon, std::uint64_t seed,
             RewardSpec reward = {});

  std::optional<ControlAction> decide(std::span<const KpmRecord> window) override;
  void on_outcome(const ControlAction& sent, bool applied) override;

  const ControlAction& current() const { return current_; }
  const SliceArms& arms(SliceId slice) const { return arms_.at(slice); }

 protected:
  /// Bandit step; updates current_ policies and returns the proposed action.
  ControlAction choose_policies(std::span<const KpmRecord> window);
  /// Brings current_ in line with the per-slice RBG counts the node reports.
  void sync_allocation(std::span<const KpmRecord> window);
  std::optional<ControlAction> finish(ControlAction proposed);

  std::uint32_t total_rbgs_;
  ControlAction current_;
  ControlAction confirmed_;

 private:
  double epsilon_;
  std::mt19937_64 rng_;
  RewardSpec reward_;
  std::map<SliceId, SliceArms> arms_;
};

/// `sched-slicing`: the sched policy step followed by one hill-climbing move
/// of a single RBG from the least to the most pressured slice.
class SchedSlicingLogic final : public SchedLogic {
 public:
  static constexpr double kMinPressureRatio = 1.5;

  using SchedLogic::SchedLogic;

  std::optional<ControlAction> decide(std::span<const KpmRecord> window) override;
};

/// Per-slice pressure: mean dl_buffer_bytes over the slice's records divided
/// by its RBG count (at least 1). Only slices present in `window` appear.
std::map<SliceId, double> slice_pressure(std::span<const KpmRecord> window,
                                         const SliceAllocation& allocation);

/// Moves one RBG from the least to the most pressured slice when the
/// max/min pressure ratio is at least 1.5 and the donor keeps one RBG; then
/// packs ranges contiguously from RBG 0 in slice-id order. Returns nullopt
/// when no move is made.
std::optional<SliceAllocation> hill_climb_step(const std::map<SliceId, double>& pressure,
                                               const SliceAllocation& allocation);

/// Contiguous layout of `counts` from RBG 0 in slice-id order; zero counts
/// get no range.
SliceAllocation pack_allocation(const std::map<SliceId, std::uint32_t>& counts,
                                std::uint32_t total_rbgs);

}  // namespace orgym::xapp
