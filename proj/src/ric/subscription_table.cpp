#include "orgym/ric/subscription_table.hpp"

namespace orgym::ric {

bool SubscriptionTable::insert(SubscriptionEntry entry) {
  auto id = entry.request_id;
  return entries_.emplace(id, std::move(entry)).second;
}

std::optional<SubscriptionEntry> SubscriptionTable::find(std::uint32_t request_id) const {
  auto it = entries_.find(request_id);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

bool SubscriptionTable::erase(std::uint32_t request_id) { return entries_.erase(request_id) > 0; }

std::vector<SubscriptionEntry> SubscriptionTable::erase_by_xapp(PeerId xapp) {
  std::vector<SubscriptionEntry> removed;
  for (auto it = entries_.begin(); it != entries_.end();) {
    if (it->second.xapp == xapp) {
      removed.push_back(it->second);
      it = entries_.erase(it);
    } else {
      ++it;
    }
  }
  return removed;
}

std::vector<SubscriptionEntry> SubscriptionTable::erase_by_node(const std::string& node) {
  std::vector<SubscriptionEntry> removed;
  for (auto it = entries_.begin(); it != entries_.end();) {
    if (it->second.node == node) {
      removed.push_back(it->second);
      it = entries_.erase(it);
    } else {
      ++it;
    }
  }
  return removed;
}

}  // namespace orgym::ric
