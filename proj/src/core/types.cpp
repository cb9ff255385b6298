#include "orgym/core/types.hpp"

#include <algorithm>
#include <iterator>
#include <regex>

#include <fmt/format.h>

namespace orgym {

bool NodeId::is_valid(std::string_view text) {
  static const std::regex kPattern("gnb:[0-9]{3}-[0-9]{3}-[0-9A-Fa-f]{8}");
  return std::regex_match(text.begin(), text.end(), kPattern);
}

std::optional<NodeId> NodeId::parse(std::string_view text) {
  if (!is_valid(text)) return std::nullopt;
  return NodeId(std::string(text));
}

NodeId NodeId::for_base_station(std::uint32_t index) {
  return NodeId(fmt::format("gnb:311-048-{:08d}", 1000500 + index));
}

std::string NodeId::file_stem() const {
  std::string out = value_;
  for (auto& c : out) {
    if (c == ':') c = '_';
  }
  return out;
}

std::optional<SchedulingPolicy> policy_from_code(long long code) {
  if (code < 0 || code >= static_cast<long long>(kNumPolicies)) return std::nullopt;
  return static_cast<SchedulingPolicy>(code);
}

std::string_view policy_name(SchedulingPolicy p) {
  switch (p) {
    case SchedulingPolicy::RoundRobin: return "round-robin";
    case SchedulingPolicy::Waterfilling: return "waterfilling";
    case SchedulingPolicy::ProportionallyFair: return "proportionally-fair";
  }
  return "unknown";
}

std::string_view reject_reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::None: return "none";
    case RejectReason::Overlap: return "overlap";
    case RejectReason::OutOfRange: return "out-of-range";
    case RejectReason::MissingPolicy: return "missing-policy";
    case RejectReason::NodeUnknown: return "node-unknown";
  }
  return "unknown";
}

std::uint32_t SliceAllocation::rbg_count(SliceId slice) const {
  auto it = ranges.find(slice);
  return it == ranges.end() ? 0 : it->second.size();
}

std::uint32_t SliceAllocation::allocated_rbgs() const {
  std::uint32_t n = 0;
  for (const auto& [slice, range] : ranges) n += range.size();
  return n;
}

std::optional<SliceId> SliceAllocation::owner_of(std::uint32_t rbg) const {
  for (const auto& [slice, range] : ranges) {
    if (range.contains(rbg)) return slice;
  }
  return std::nullopt;
}

std::optional<Rejection> validate_allocation(const SliceAllocation& alloc, std::uint32_t total_rbgs) {
  for (const auto& [slice, r] : alloc.ranges) {
    if (r.first > r.last || r.last >= total_rbgs) {
      return Rejection{RejectReason::OutOfRange,
                       fmt::format("slice {} range [{},{}] outside 0..{}", slice, r.first, r.last,
                                   total_rbgs == 0 ? 0 : total_rbgs - 1)};
    }
  }
  for (auto a = alloc.ranges.begin(); a != alloc.ranges.end(); ++a) {
    for (auto b = std::next(a); b != alloc.ranges.end(); ++b) {
      const auto& ra = a->second;
      const auto& rb = b->second;
      if (ra.first <= rb.last && rb.first <= ra.last) {
        return Rejection{RejectReason::Overlap,
                         fmt::format("slices {} and {} share RBGs {}..{}", a->first, b->first,
                                     std::max(ra.first, rb.first), std::min(ra.last, rb.last))};
      }
    }
  }
  return std::nullopt;
}

std::optional<Rejection> validate_control_action(const ControlAction& action,
                                                 std::uint32_t total_rbgs) {
  if (auto err = validate_allocation(action.slice_allocation, total_rbgs)) return err;
  for (const auto& [slice, r] : action.slice_allocation.ranges) {
    if (slice >= action.slice_scheduling_policy.size()) {
      return Rejection{RejectReason::MissingPolicy, fmt::format("no policy for slice {}", slice)};
    }
  }
  return std::nullopt;
}

}  // namespace orgym
