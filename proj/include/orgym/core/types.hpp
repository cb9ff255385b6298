#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace orgym {

using SliceId = std::uint8_t;
using UeId = std::uint16_t;

/// Identifier of a RAN node, e.g. `gnb:311-048-01000501`.
///
/// Only well-formed ids can be constructed; wire messages that carry
/// unvalidated ids keep them as plain strings until the RIC checks them.
class NodeId {
 public:
  static std::optional<NodeId> parse(std::string_view text);
  static bool is_valid(std::string_view text);

  /// Id of the `index`-th base station of a simulated deployment,
  /// `gnb:311-048-<01000500 + index>`.
  static NodeId for_base_station(std::uint32_t index);

  const std::string& str() const { return value_; }

  /// Filesystem-safe form: colons replaced by underscores.
  std::string file_stem() const;

  friend bool operator==(const NodeId&, const NodeId&) = default;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;

 private:
  explicit NodeId(std::string value) : value_(std::move(value)) {}
  std::string value_;
};

enum class SchedulingPolicy : std::uint8_t {
  RoundRobin = 0,
  Waterfilling = 1,
  ProportionallyFair = 2,
};

inline constexpr std::size_t kNumPolicies = 3;

std::optional<SchedulingPolicy> policy_from_code(long long code);
inline std::uint8_t policy_code(SchedulingPolicy p) { return static_cast<std::uint8_t>(p); }
std::string_view policy_name(SchedulingPolicy p);

/// Inclusive RBG range `[first, last]`.
struct RbgRange {
  std::uint32_t first = 0;
  std::uint32_t last = 0;

  std::uint32_t size() const { return last - first + 1; }
  bool contains(std::uint32_t rbg) const { return rbg >= first && rbg <= last; }
  friend bool operator==(const RbgRange&, const RbgRange&) = default;
};

inline constexpr std::uint32_t kDefaultTotalRbgs = 25;

struct SliceAllocation {
  std::map<SliceId, RbgRange> ranges;
  std::uint32_t total_rbgs = kDefaultTotalRbgs;

  /// Number of RBGs owned by `slice`; 0 when the slice has no range.
  std::uint32_t rbg_count(SliceId slice) const;
  std::uint32_t allocated_rbgs() const;
  std::optional<SliceId> owner_of(std::uint32_t rbg) const;

  friend bool operator==(const SliceAllocation&, const SliceAllocation&) = default;
};

struct ControlAction {
  SliceAllocation slice_allocation;
  std::vector<SchedulingPolicy> slice_scheduling_policy;

  friend bool operator==(const ControlAction&, const ControlAction&) = default;
};

/// Machine-readable reason carried in control acks.
enum class RejectReason : std::uint8_t {
  None = 0,
  Overlap = 1,
  OutOfRange = 2,
  MissingPolicy = 3,
  NodeUnknown = 4,
};

std::string_view reject_reason_name(RejectReason r);

struct Rejection {
  RejectReason reason = RejectReason::None;
  std::string detail;
};

std::optional<Rejection> validate_allocation(const SliceAllocation& alloc, std::uint32_t total_rbgs);

/// Checks range bounds and disjointness against `total_rbgs` and that every
/// allocated slice has a policy. Returns the first violation found.
std::optional<Rejection> validate_control_action(const ControlAction& action,
                                                 std::uint32_t total_rbgs);

/// One per-UE per-report-period row of RAN telemetry.
struct KpmRecord {
  std::uint64_t timestamp_ms = 0;
  std::string bs_id;
  UeId ue_id = 0;
  SliceId slice_id = 0;
  std::uint64_t dl_buffer_bytes = 0;
  std::uint64_t tx_bytes = 0;
  std::uint32_t tx_tbs = 0;
  std::uint8_t dl_cqi = 1;
  std::uint32_t granted_rbgs = 0;
  SchedulingPolicy policy = SchedulingPolicy::RoundRobin;
  std::uint32_t slice_rbg_count = 0;

  friend bool operator==(const KpmRecord&, const KpmRecord&) = default;
};

}  // namespace orgym
