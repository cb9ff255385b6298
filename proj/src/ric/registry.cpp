#include "orgym/ric/registry.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "json.hpp"

namespace orgym::ric {

using nlohmann::json;

std::optional<NodeEntry> NodeRegistry::upsert(NodeEntry entry) {
  std::optional<NodeEntry> previous;
  auto it = entries_.find(entry.node);
  if (it != entries_.end()) previous = it->second;
  auto key = entry.node;
  entries_.insert_or_assign(std::move(key), std::move(entry));
  return previous;
}

bool NodeRegistry::remove_if_peer(const std::string& node, PeerId peer) {
  auto it = entries_.find(node);
  if (it == entries_.end() || it->second.peer != peer) return false;
  entries_.erase(it);
  return true;
}

const NodeEntry* NodeRegistry::find(const std::string& node) const {
  auto it = entries_.find(node);
  return it == entries_.end() ? nullptr : &it->second;
}

bool NodeRegistry::is_live(const std::string& node) const {
  const auto* e = find(node);
  return e != nullptr && !e->stale && e->peer != kNoPeer;
}

void NodeRegistry::touch(const std::string& node, std::chrono::steady_clock::time_point now) {
  auto it = entries_.find(node);
  if (it != entries_.end()) it->second.last_seen = now;
}

std::vector<NodeEntry> NodeRegistry::entries() const {
  std::vector<NodeEntry> out;
  out.reserve(entries_.size());
  for (const auto& [_, e] : entries_) out.push_back(e);
  return out;
}

void snapshot_registry(const NodeRegistry& registry, const std::filesystem::path& path) {
  json doc = json::array();
  for (const auto& e : registry.entries()) {
    doc.push_back({{"node", e.node},
                   {"ran-functions", e.ran_functions},
                   {"connected-since-ms", e.connected_since_ms}});
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", tmp.string()));
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error(fmt::format("short write to {}", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

NodeRegistry restore_registry(const std::filesystem::path& path) {
  NodeRegistry reg;
  if (!std::filesystem::exists(path)) return reg;
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot read {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  json doc = json::parse(ss.str());
  if (!doc.is_array()) throw std::runtime_error("registry snapshot is not a JSON list");
  for (const auto& item : doc) {
    NodeEntry e;
    e.node = item.at("node").get<std::string>();
    e.ran_functions = item.value("ran-functions", std::vector<std::uint16_t>{});
    e.connected_since_ms = item.value("connected-since-ms", std::int64_t{0});
    e.stale = true;
    reg.upsert(std::move(e));
  }
  return reg;
}

}  // namespace orgym::ric
