#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orgym/ric/registry.hpp"

namespace orgym::ric {

struct SubscriptionEntry {
  std::uint32_t request_id = 0;
  PeerId xapp = kNoPeer;
  std::string node;
  std::uint32_t report_period_ms = 0;
};

/// Live subscriptions keyed by request_id. Not synchronized.
class SubscriptionTable {
 public:
  /// False if `entry.request_id` is already taken.
  bool insert(SubscriptionEntry entry);
  bool contains(std::uint32_t request_id) const { return entries_.count(request_id) > 0; }
  std::optional<SubscriptionEntry> find(std::uint32_t request_id) const;
  bool erase(std::uint32_t request_id);

  std::vector<SubscriptionEntry> erase_by_xapp(PeerId xapp);
  std::vector<SubscriptionEntry> erase_by_node(const std::string& node);

  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::uint32_t, SubscriptionEntry> entries_;
};

}  // namespace orgym::ric
