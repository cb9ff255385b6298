#include "orgym/ric/ric_service.hpp"

#include <chrono>
#include <deque>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "orgym/core/types.hpp"

namespace orgym::ric {

namespace {

std::int64_t wall_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

/// Bounded per-xApp send queue with its own writer thread. When full, the
/// oldest queued indication is discarded; responses and acks are never
/// dropped.
class RicService::Outbox {
 public:
  Outbox(std::shared_ptr<e2::Connection> conn, std::size_t depth)
      : conn_(std::move(conn)), depth_(depth), writer_([this] { run(); }) {}

  ~Outbox() { close(); }

  /// Returns false if an older indication had to be dropped.
  bool push(std::vector<std::uint8_t> bytes, bool droppable) {
    bool dropped = false;
    {
      std::lock_guard lock(mu_);
      if (closed_) return true;
      if (queue_.size() >= depth_) {
        for (auto it = queue_.begin(); it != queue_.end(); ++it) {
          if (it->droppable) {
            queue_.erase(it);
            dropped = true;
            break;
          }
        }
      }
      queue_.push_back(Item{std::move(bytes), droppable});
    }
    cv_.notify_one();
    return !dropped;
  }

  void close() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    cv_.notify_all();
    if (writer_.joinable() && writer_.get_id() != std::this_thread::get_id()) writer_.join();
  }

 private:
  struct Item {
    std::vector<std::uint8_t> bytes;
    bool droppable = false;
  };

  void run() {
    while (true) {
      Item item;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return closed_ || !queue_.empty(); });
        if (closed_) return;
        item = std::move(queue_.front());
        queue_.pop_front();
      }
      try {
        conn_->send_bytes(item.bytes);
      } catch (const std::exception&) {
        return;
      }
    }
  }

  std::shared_ptr<e2::Connection> conn_;
  std::size_t depth_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Item> queue_;
  bool closed_ = false;
  std::thread writer_;
};

RicService::RicService(RicConfig config, EventLog& log) : config_(std::move(config)), log_(log) {}

RicService::~RicService() { stop(); }

void RicService::start() {
  if (running_) return;
  if (config_.e2_listen == config_.xapp_listen && !config_.e2_listen.ends_with(":0") &&
      !config_.e2_listen.ends_with("://")) {
    throw std::invalid_argument(
        fmt::format("node and xApp listeners must differ (both {})", config_.e2_listen));
  }
  if (!config_.registry_snapshot.empty()) {
    try {
      registry_ = restore_registry(config_.registry_snapshot);
      for (const auto& e : registry_.entries()) log_.info("node_restored", "node={} stale=true", e.node);
    } catch (const std::exception& e) {
      log_.warn("registry_restore_failed", "path={} reason=\"{}\"",
                config_.registry_snapshot.string(), e.what());
    }
  }
  node_listener_ = e2::listen_on(config_.e2_listen);
  xapp_listener_ = e2::listen_on(config_.xapp_listen);
  running_ = true;
  node_acceptor_ = std::thread([this] { accept_loop(*node_listener_, true); });
  xapp_acceptor_ = std::thread([this] { accept_loop(*xapp_listener_, false); });
  if (config_.liveness_timeout_ms > 0) housekeeper_ = std::thread([this] { housekeeping_loop(); });
  log_.info("started", "e2={} xapp={}", e2_endpoint(), xapp_endpoint());
}

void RicService::stop() {
  if (!running_.exchange(false)) return;
  node_listener_->close();
  xapp_listener_->close();
  node_acceptor_.join();
  xapp_acceptor_.join();
  stop_cv_.notify_all();
  if (housekeeper_.joinable()) housekeeper_.join();

  // Snapshot the live registry before the closing links tear it down.
  std::vector<std::shared_ptr<e2::Connection>> conns;
  {
    std::lock_guard lock(mu_);
    persist_registry();
    for (auto& [_, p] : node_peers_) conns.push_back(p.conn);
    for (auto& [_, p] : xapp_peers_) conns.push_back(p.conn);
  }
  for (auto& c : conns) c->close();
  std::vector<std::thread> threads;
  {
    std::lock_guard lock(threads_mu_);
    threads.swap(conn_threads_);
  }
  for (auto& t : threads) t.join();
  log_.event(LogLevel::Info, "stopped");
}

std::string RicService::e2_endpoint() const { return node_listener_ ? node_listener_->endpoint() : ""; }
std::string RicService::xapp_endpoint() const { return xapp_listener_ ? xapp_listener_->endpoint() : ""; }

std::vector<NodeEntry> RicService::nodes() const {
  std::lock_guard lock(mu_);
  return registry_.entries();
}

bool RicService::node_live(const std::string& node) const {
  std::lock_guard lock(mu_);
  return registry_.is_live(node);
}

std::size_t RicService::subscription_count() const {
  std::lock_guard lock(mu_);
  return subscriptions_.size();
}

RicStats RicService::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

void RicService::accept_loop(e2::Listener& listener, bool node_side) {
  while (auto stream = listener.accept()) {
    auto conn = std::make_shared<e2::Connection>(std::move(stream));
    PeerId id;
    {
      std::lock_guard lock(mu_);
      id = next_peer_++;
      if (node_side) {
        node_peers_[id] = NodePeer{id, conn, {}};
      } else {
        xapp_peers_[id] = XappPeer{id, conn, std::make_shared<Outbox>(conn, config_.xapp_queue_depth)};
      }
    }
    log_.debug(node_side ? "node_link_open" : "xapp_connected", "peer={}", id);
    std::lock_guard lock(threads_mu_);
    if (node_side) {
      conn_threads_.emplace_back([this, id, conn] { node_loop(id, conn); });
    } else {
      conn_threads_.emplace_back([this, id, conn] { xapp_loop(id, conn); });
    }
  }
}

// ---------------------------------------------------------------------------
// Node side

void RicService::node_loop(PeerId id, std::shared_ptr<e2::Connection> conn) {
  try {
    while (true) {
      auto frame = conn->receive_frame();
      e2::E2Message m;
      try {
        m = e2::from_frame(frame);
      } catch (const e2::DecodeError& e) {
        log_.warn("decode_error", "peer={} kind={} reason=\"{}\"", id, e2::decode_error_name(e.kind()), e.what());
        continue;
      }
      {
        std::lock_guard lock(mu_);
        auto it = node_peers_.find(id);
        if (it != node_peers_.end() && !it->second.node.empty()) {
          registry_.touch(it->second.node, std::chrono::steady_clock::now());
        }
      }
      if (const auto* setup = std::get_if<e2::E2SetupRequest>(&m)) {
        handle_e2_setup(id, *conn, *setup);
      } else if (const auto* ind = std::get_if<e2::RicIndication>(&m)) {
        route_indication(id, *ind, frame);
      } else if (const auto* resp = std::get_if<e2::RicSubscriptionResponse>(&m)) {
        relay_subscription_response(*resp);
      } else if (const auto* ack = std::get_if<e2::RicControlAck>(&m)) {
        relay_control_ack(*ack);
      } else {
        log_.warn("unexpected_message", "peer={} type={}", id, e2::message_name(e2::type_of(m)));
      }
    }
  } catch (const e2::ConnectionClosed&) {
  } catch (const std::exception& e) {
    log_.warn("node_link_error", "peer={} reason=\"{}\"", id, e.what());
  }
  on_node_closed(id);
}

void RicService::handle_e2_setup(PeerId peer, e2::Connection& conn, const e2::E2SetupRequest& m) {
  if (!NodeId::is_valid(m.node)) {
    log_.warn("setup_rejected", "peer={} node=\"{}\"", peer, m.node);
    conn.send(e2::E2SetupResponse{false});
    return;
  }
  std::vector<SubscriptionEntry> expired;
  {
    std::lock_guard lock(mu_);
    auto& p = node_peers_.at(peer);
    if (!p.node.empty() && p.node != m.node) registry_.remove_if_peer(p.node, peer);
    p.node = m.node;
    NodeEntry e;
    e.node = m.node;
    e.ran_functions = m.ran_functions;
    e.connected_since_ms = wall_ms();
    e.last_seen = std::chrono::steady_clock::now();
    e.peer = peer;
    auto previous = registry_.upsert(std::move(e));
    // A node re-registering over a new connection starts without subscriptions.
    if (previous && previous->peer != peer) expired = subscriptions_.erase_by_node(m.node);
    persist_registry();
  }
  conn.send(e2::E2SetupResponse{true});
  for (const auto& s : expired) log_.info("subscription_expired", "request_id={} node={}", s.request_id, s.node);
  log_.info("node_connected", "node={} ran_functions={}", m.node, fmt::join(m.ran_functions, ","));
}

void RicService::route_indication(PeerId peer, const e2::RicIndication& m, const e2::Frame& frame) {
  std::shared_ptr<Outbox> box;
  {
    std::lock_guard lock(mu_);
    auto sub = subscriptions_.find(m.request_id);
    const auto& from = node_peers_.at(peer).node;
    if (!sub || sub->node != from) {
      ++stats_.indications_orphaned;
    } else {
      box = outbox_of(sub->xapp);
      if (box) ++stats_.indications_routed;
    }
  }
  if (!box) {
    log_.warn("indication_dropped", "request_id={} node={}", m.request_id, m.node);
    return;
  }
  if (!box->push(frame.bytes(), true)) {
    std::lock_guard lock(mu_);
    ++stats_.indications_overflowed;
  }
}

void RicService::relay_subscription_response(const e2::RicSubscriptionResponse& m) {
  std::shared_ptr<Outbox> box;
  bool accepted = false;
  std::string node;
  {
    std::lock_guard lock(mu_);
    auto it = pending_subscriptions_.find(m.request_id);
    if (it == pending_subscriptions_.end()) return;
    auto pending = it->second;
    pending_subscriptions_.erase(it);
    box = outbox_of(pending.xapp);
    node = pending.node;
    if (box && m.accepted) {
      accepted = subscriptions_.insert(
          SubscriptionEntry{m.request_id, pending.xapp, pending.node, pending.report_period_ms});
    }
  }
  if (!box) return;
  box->push(e2::encode(e2::RicSubscriptionResponse{m.request_id, accepted}), false);
  log_.info(accepted ? "subscription_accepted" : "subscription_rejected", "request_id={} node={}",
            m.request_id, node);
}

void RicService::relay_control_ack(const e2::RicControlAck& m) {
  std::shared_ptr<Outbox> box;
  {
    std::lock_guard lock(mu_);
    auto it = pending_controls_.find(m.request_id);
    if (it == pending_controls_.end()) return;
    box = outbox_of(it->second.xapp);
    pending_controls_.erase(it);
  }
  if (box) box->push(e2::encode(m), false);
  log_.debug("control_ack", "request_id={} status={} reason={}", m.request_id,
             m.status == e2::ControlStatus::Applied ? "applied" : "rejected",
             reject_reason_name(m.reason_code));
}

void RicService::on_node_closed(PeerId peer) {
  std::string node;
  std::vector<SubscriptionEntry> expired;
  std::vector<std::pair<std::shared_ptr<Outbox>, std::vector<std::uint8_t>>> notices;
  {
    std::lock_guard lock(mu_);
    auto it = node_peers_.find(peer);
    if (it == node_peers_.end()) return;
    node = it->second.node;
    node_peers_.erase(it);
    if (node.empty() || !registry_.remove_if_peer(node, peer)) return;
    expired = subscriptions_.erase_by_node(node);
    for (auto p = pending_subscriptions_.begin(); p != pending_subscriptions_.end();) {
      if (p->second.node == node) {
        if (auto box = outbox_of(p->second.xapp)) {
          notices.emplace_back(box, e2::encode(e2::RicSubscriptionResponse{p->first, false}));
        }
        p = pending_subscriptions_.erase(p);
      } else {
        ++p;
      }
    }
    for (auto p = pending_controls_.begin(); p != pending_controls_.end();) {
      if (p->second.node == node) {
        if (auto box = outbox_of(p->second.xapp)) {
          notices.emplace_back(box, e2::encode(e2::RicControlAck{p->first, e2::ControlStatus::Rejected,
                                                                 RejectReason::NodeUnknown}));
        }
        p = pending_controls_.erase(p);
      } else {
        ++p;
      }
    }
    if (running_) persist_registry();
  }
  for (auto& [box, bytes] : notices) box->push(std::move(bytes), false);
  for (const auto& s : expired) log_.info("subscription_expired", "request_id={} node={}", s.request_id, s.node);
  log_.info("node_disconnected", "node={}", node);
}

// ---------------------------------------------------------------------------
// xApp side

void RicService::xapp_loop(PeerId id, std::shared_ptr<e2::Connection> conn) {
  try {
    while (true) {
      auto frame = conn->receive_frame();
      e2::E2Message m;
      try {
        m = e2::from_frame(frame);
      } catch (const e2::DecodeError& e) {
        log_.warn("decode_error", "peer={} kind={} reason=\"{}\"", id, e2::decode_error_name(e.kind()), e.what());
        continue;
      }
      if (const auto* sub = std::get_if<e2::RicSubscriptionRequest>(&m)) {
        handle_subscription(id, *sub);
      } else if (const auto* ctl = std::get_if<e2::RicControlRequest>(&m)) {
        route_control(id, *ctl, frame);
      } else {
        log_.warn("unexpected_message", "peer={} type={}", id, e2::message_name(e2::type_of(m)));
      }
    }
  } catch (const e2::ConnectionClosed&) {
  } catch (const std::exception& e) {
    log_.warn("xapp_link_error", "peer={} reason=\"{}\"", id, e.what());
  }
  on_xapp_closed(id);
}

void RicService::handle_subscription(PeerId xapp, const e2::RicSubscriptionRequest& m) {
  std::shared_ptr<Outbox> box;
  std::shared_ptr<e2::Connection> node_conn;
  std::string refusal;
  {
    std::lock_guard lock(mu_);
    box = outbox_of(xapp);
    const auto* entry = registry_.find(m.node);
    if (entry == nullptr) {
      refusal = "unknown-node";
    } else if (!registry_.is_live(m.node)) {
      refusal = "stale-node";
    } else if (subscriptions_.contains(m.request_id) || pending_subscriptions_.count(m.request_id)) {
      refusal = "duplicate-request-id";
    } else {
      pending_subscriptions_[m.request_id] = PendingSubscription{xapp, m.node, m.report_period_ms};
      node_conn = node_peers_.at(entry->peer).conn;
    }
  }
  if (node_conn) {
    try {
      node_conn->send(m);
      log_.debug("subscription_forwarded", "request_id={} node={} period_ms={}", m.request_id, m.node,
                 m.report_period_ms);
      return;
    } catch (const std::exception&) {
      std::lock_guard lock(mu_);
      pending_subscriptions_.erase(m.request_id);
      refusal = "node-unreachable";
    }
  }
  if (box) box->push(e2::encode(e2::RicSubscriptionResponse{m.request_id, false}), false);
  log_.info("subscription_rejected", "request_id={} node={} reason={}", m.request_id, m.node, refusal);
}

void RicService::route_control(PeerId xapp, const e2::RicControlRequest& m, const e2::Frame& frame) {
  std::shared_ptr<Outbox> box;
  std::shared_ptr<e2::Connection> node_conn;
  {
    std::lock_guard lock(mu_);
    box = outbox_of(xapp);
    if (registry_.is_live(m.node)) {
      node_conn = node_peers_.at(registry_.find(m.node)->peer).conn;
      pending_controls_[m.request_id] = PendingControl{xapp, m.node};
      ++stats_.controls_routed;
    }
  }
  if (node_conn) {
    try {
      node_conn->send_bytes(frame.bytes());
      return;
    } catch (const std::exception&) {
      std::lock_guard lock(mu_);
      pending_controls_.erase(m.request_id);
    }
  }
  if (box) {
    box->push(e2::encode(e2::RicControlAck{m.request_id, e2::ControlStatus::Rejected,
                                           RejectReason::NodeUnknown}),
              false);
  }
  log_.info("control_rejected", "request_id={} node={} reason=node-unknown", m.request_id, m.node);
}

void RicService::on_xapp_closed(PeerId xapp) {
  std::shared_ptr<Outbox> box;
  std::vector<SubscriptionEntry> removed;
  {
    std::lock_guard lock(mu_);
    auto it = xapp_peers_.find(xapp);
    if (it == xapp_peers_.end()) return;
    box = it->second.outbox;
    xapp_peers_.erase(it);
    removed = subscriptions_.erase_by_xapp(xapp);
    std::erase_if(pending_subscriptions_, [&](const auto& kv) { return kv.second.xapp == xapp; });
    std::erase_if(pending_controls_, [&](const auto& kv) { return kv.second.xapp == xapp; });
  }
  box->close();
  for (const auto& s : removed) log_.info("subscription_removed", "request_id={} node={}", s.request_id, s.node);
  log_.info("xapp_disconnected", "peer={}", xapp);
}

// ---------------------------------------------------------------------------

std::shared_ptr<RicService::Outbox> RicService::outbox_of(PeerId xapp) const {
  auto it = xapp_peers_.find(xapp);
  return it == xapp_peers_.end() ? nullptr : it->second.outbox;
}

void RicService::persist_registry() {
  if (config_.registry_snapshot.empty()) return;
  try {
    snapshot_registry(registry_, config_.registry_snapshot);
  } catch (const std::exception& e) {
    log_.warn("snapshot_failed", "path={} reason=\"{}\"", config_.registry_snapshot.string(), e.what());
  }
}

void RicService::housekeeping_loop() {
  const auto timeout = std::chrono::milliseconds(config_.liveness_timeout_ms);
  const auto interval = std::max(std::chrono::milliseconds(10), timeout / 4);
  std::unique_lock stop_lock(stop_mu_);
  while (running_) {
    stop_cv_.wait_for(stop_lock, interval);
    if (!running_) break;
    std::vector<std::pair<std::string, std::shared_ptr<e2::Connection>>> silent;
    {
      std::lock_guard lock(mu_);
      const auto now = std::chrono::steady_clock::now();
      for (const auto& e : registry_.entries()) {
        if (e.stale || e.peer == kNoPeer || now - e.last_seen <= timeout) continue;
        auto p = node_peers_.find(e.peer);
        if (p != node_peers_.end()) silent.emplace_back(e.node, p->second.conn);
      }
    }
    for (auto& [node, conn] : silent) {
      log_.warn("node_timeout", "node={}", node);
      conn->close();
    }
  }
}

}  // namespace orgym::ric
