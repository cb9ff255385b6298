#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "orgym/core/types.hpp"

namespace orgym::ran {

/// What a slice scheduler sees of one UE for one TTI.
struct SchedUe {
  UeId ue_id = 0;
  std::uint64_t buffer_bytes = 0;
  std::uint32_t bytes_per_rbg = 0;
  double avg_tput = 0.0;
};

/// Per-RBG owners for one scheduling decision. Position i is the i-th RBG
/// of the slice's ordered RBG list; nullopt means unused.
struct Grants {
  std::vector<std::optional<UeId>> rbg_owner;

  std::uint32_t count(UeId ue) const;
  std::map<UeId, std::uint32_t> counts() const;
  std::uint32_t total() const;
};

struct RoundRobinResult {
  Grants grants;
  /// Index into the UE list where the next TTI starts.
  std::size_t cursor = 0;
};

/// Hands out RBGs one at a time, cycling through backlogged UEs starting at
/// `cursor` (an index into `ues`). UEs with empty buffers are skipped.
RoundRobinResult schedule_round_robin(std::span<const SchedUe> ues, std::size_t num_rbgs,
                                      std::size_t cursor);

/// Demand-capped max-min fairness in delivered bytes. A UE with c RBGs
/// delivers min(buffer, c * bytes_per_rbg); the allocation maximizes the
/// ascending-sorted delivered vector lexicographically (exact, by dynamic
/// programming over UEs). Among optimal allocations lower UE ids receive
/// more RBGs; each UE's RBGs are contiguous, in UE id order.
Grants schedule_waterfilling(std::span<const SchedUe> ues, std::size_t num_rbgs);

/// Each RBG goes to the backlogged UE maximizing
/// bytes_per_rbg / max(avg_tput, epsilon), lowest id on ties.
Grants schedule_proportional_fair(std::span<const SchedUe> ues, std::size_t num_rbgs,
                                  double epsilon);

/// avg <- (1 - alpha) * avg + alpha * served
double ewma_update(double avg, double served_bytes, double alpha);

}  // namespace orgym::ran
