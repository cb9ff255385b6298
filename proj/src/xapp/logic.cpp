#include "orgym/xapp/logic.hpp"

#include <algorithm>

namespace orgym::xapp {

namespace {

using SliceRecords = std::map<SliceId, std::vector<const KpmRecord*>>;

SliceRecords group_by_slice(std::span<const KpmRecord> window) {
  SliceRecords out;
  for (const auto& r : window) out[r.slice_id].push_back(&r);
  return out;
}

double mean_of(std::span<const KpmRecord* const> records, auto field) {
  if (records.empty()) return 0.0;
  double sum = 0.0;
  for (const auto* r : records) sum += static_cast<double>(field(*r));
  return sum / static_cast<double>(records.size());
}

}  // namespace

double RewardSpec::reward(SliceId slice, std::span<const KpmRecord* const> records) const {
  double value = 0.0;
  switch (slice) {
    case 1:
      value = mean_of(records, [](const KpmRecord& r) { return r.tx_tbs; });
      break;
    case 2:
      value = -mean_of(records, [](const KpmRecord& r) { return r.dl_buffer_bytes; });
      break;
    default:
      value = mean_of(records, [](const KpmRecord& r) { return r.tx_bytes; });
      break;
  }
  return weight(slice) * value;
}

SchedLogic::SchedLogic(ControlAction initial, std::uint32_t total_rbgs, double epsilon,
                       std::uint64_t seed, RewardSpec reward)
    : total_rbgs_(total_rbgs),
      current_(initial),
      confirmed_(std::move(initial)),
      epsilon_(epsilon),
      rng_(seed),
      reward_(std::move(reward)) {}

void SchedLogic::sync_allocation(std::span<const KpmRecord> window) {
  std::map<SliceId, std::pair<std::uint64_t, std::uint32_t>> latest;  // slice -> (ts, count)
  for (const auto& r : window) {
    auto& slot = latest[r.slice_id];
    if (r.timestamp_ms >= slot.first) slot = {r.timestamp_ms, r.slice_rbg_count};
  }
  bool differs = false;
  std::map<SliceId, std::uint32_t> counts;
  for (const auto& [slice, _] : current_.slice_allocation.ranges) {
    counts[slice] = current_.slice_allocation.rbg_count(slice);
  }
  for (const auto& [slice, seen] : latest) {
    if (current_.slice_allocation.rbg_count(slice) != seen.second) differs = true;
    counts[slice] = seen.second;
  }
  if (!differs) return;
  current_.slice_allocation = pack_allocation(counts, total_rbgs_);
  confirmed_.slice_allocation = current_.slice_allocation;
}

ControlAction SchedLogic::choose_policies(std::span<const KpmRecord> window) {
  ControlAction proposed = current_;
  for (const auto& [slice, records] : group_by_slice(window)) {
    std::map<SchedulingPolicy, std::vector<const KpmRecord*>> by_policy;
    for (const auto* r : records) by_policy[r->policy].push_back(r);
    auto& arms = arms_[slice];
    for (const auto& [policy, group] : by_policy) {
      auto& arm = arms[policy_code(policy)];
      arm.sum += reward_.reward(slice, group);
      ++arm.pulls;
    }
    if (slice >= proposed.slice_scheduling_policy.size()) continue;

    std::size_t choice = kNumPolicies;
    for (std::size_t p = 0; p < kNumPolicies; ++p) {
      if (arms[p].pulls == 0) {
        choice = p;
        break;
      }
    }
    if (choice == kNumPolicies) {
      if (std::bernoulli_distribution(epsilon_)(rng_)) {
        choice = std::uniform_int_distribution<std::size_t>(0, kNumPolicies - 1)(rng_);
      } else {
        choice = 0;
        for (std::size_t p = 1; p < kNumPolicies; ++p) {
          if (arms[p].mean() > arms[choice].mean()) choice = p;
        }
      }
    }
    proposed.slice_scheduling_policy[slice] = *policy_from_code(static_cast<long long>(choice));
  }
  return proposed;
}

std::optional<ControlAction> SchedLogic::finish(ControlAction proposed) {
  if (validate_control_action(proposed, total_rbgs_)) return std::nullopt;
  if (proposed == current_) return std::nullopt;
  current_ = proposed;
  return proposed;
}

std::optional<ControlAction> SchedLogic::decide(std::span<const KpmRecord> window) {
  if (window.empty()) return std::nullopt;
  sync_allocation(window);
  return finish(choose_policies(window));
}

void SchedLogic::on_outcome(const ControlAction& sent, bool applied) {
  if (applied) {
    confirmed_ = sent;
  } else {
    current_ = confirmed_;
  }
}

std::optional<ControlAction> SchedSlicingLogic::decide(std::span<const KpmRecord> window) {
  if (window.empty()) return std::nullopt;
  sync_allocation(window);
  auto proposed = choose_policies(window);
  if (auto moved = hill_climb_step(slice_pressure(window, proposed.slice_allocation),
                                   proposed.slice_allocation)) {
    proposed.slice_allocation = *moved;
  }
  return finish(std::move(proposed));
}

std::map<SliceId, double> slice_pressure(std::span<const KpmRecord> window,
                                         const SliceAllocation& allocation) {
  std::map<SliceId, double> out;
  for (const auto& [slice, records] : group_by_slice(window)) {
    double buffer = mean_of(records, [](const KpmRecord& r) { return r.dl_buffer_bytes; });
    out[slice] = buffer / std::max<std::uint32_t>(allocation.rbg_count(slice), 1);
  }
  return out;
}

std::optional<SliceAllocation> hill_climb_step(const std::map<SliceId, double>& pressure,
                                               const SliceAllocation& allocation) {
  if (pressure.size() < 2) return std::nullopt;
  auto receiver = pressure.begin();
  auto donor = pressure.begin();
  for (auto it = pressure.begin(); it != pressure.end(); ++it) {
    if (it->second > receiver->second) receiver = it;
    if (it->second < donor->second) donor = it;
  }
  const double hi = receiver->second;
  const double lo = donor->second;
  if (receiver == donor || hi <= 0.0) return std::nullopt;
  if (lo > 0.0 && hi / lo < SchedSlicingLogic::kMinPressureRatio) return std::nullopt;
  if (allocation.rbg_count(donor->first) < 2) return std::nullopt;

  std::map<SliceId, std::uint32_t> counts;
  for (const auto& [slice, _] : allocation.ranges) counts[slice] = allocation.rbg_count(slice);
  --counts[donor->first];
  ++counts[receiver->first];
  return pack_allocation(counts, allocation.total_rbgs);
}

SliceAllocation pack_allocation(const std::map<SliceId, std::uint32_t>& counts,
                                std::uint32_t total_rbgs) {
  SliceAllocation out;
  out.total_rbgs = total_rbgs;
  std::uint32_t next = 0;
  for (const auto& [slice, count] : counts) {
    if (count == 0) continue;
    out.ranges[slice] = RbgRange{next, next + count - 1};
    next += count;
  }
  return out;
}

}  // namespace orgym::xapp
