#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace orgym::ric {

using PeerId = std::uint64_t;
inline constexpr PeerId kNoPeer = 0;

struct NodeEntry {
  std::string node;
  std::vector<std::uint16_t> ran_functions;
  std::int64_t connected_since_ms = 0;  // wall clock, ms since epoch
  std::chrono::steady_clock::time_point last_seen{};
  PeerId peer = kNoPeer;
  /// Restored from a snapshot and not yet re-registered.
  bool stale = false;
};

/// Database of RAN nodes known to the RIC: one entry per node id.
/// Not synchronized; the RIC serializes access.
class NodeRegistry {
 public:
  /// Inserts or replaces the entry for `entry.node`; returns the previous
  /// entry if one existed.
  std::optional<NodeEntry> upsert(NodeEntry entry);

  /// Removes `node` only if it is still bound to `peer`.
  bool remove_if_peer(const std::string& node, PeerId peer);

  const NodeEntry* find(const std::string& node) const;
  /// Registered over a live connection (not stale).
  bool is_live(const std::string& node) const;
  void touch(const std::string& node, std::chrono::steady_clock::time_point now);

  std::vector<NodeEntry> entries() const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, NodeEntry> entries_;
};

/// Writes known node ids and metadata as a JSON list. Throws on I/O failure.
void snapshot_registry(const NodeRegistry& registry, const std::filesystem::path& path);

/// Loads a snapshot with every entry marked stale. A missing file yields an
/// empty registry; unreadable or malformed content throws.
NodeRegistry restore_registry(const std::filesystem::path& path);

}  // namespace orgym::ric
