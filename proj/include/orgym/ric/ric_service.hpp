#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "orgym/core/log.hpp"
#include "orgym/e2/framing.hpp"
#include "orgym/ric/registry.hpp"
#include "orgym/ric/subscription_table.hpp"

namespace orgym::ric {

struct RicConfig {
  /// Listener for RAN nodes (E2 termination).
  std::string e2_listen = "127.0.0.1:36421";
  /// Listener for xApps.
  std::string xapp_listen = "127.0.0.1:4560";
  /// Registry snapshot file; empty disables persistence.
  std::filesystem::path registry_snapshot;
  /// Disconnect nodes silent for longer than this; 0 disables the check.
  std::uint32_t liveness_timeout_ms = 0;
  /// Per-xApp outgoing queue depth; indications beyond it drop oldest-first.
  std::size_t xapp_queue_depth = 64;
};

struct RicStats {
  std::uint64_t indications_routed = 0;
  std::uint64_t indications_orphaned = 0;
  std::uint64_t indications_overflowed = 0;
  std::uint64_t controls_routed = 0;
};

/// Near-RT RIC. Internally:
///  - E2 termination: accepts node connections and decodes their frames;
///  - E2 manager + database: NodeRegistry, with optional JSON snapshots;
///  - routing manager: SubscriptionTable, indication and control routing.
///
/// One reader thread per connection. Registry and routing tables are
/// guarded by a single mutex; nothing is written to a socket while it is
/// held. Each xApp has a bounded outbox drained by its own writer thread, so
/// a slow xApp never stalls a node's indication stream.
class RicService {
 public:
  RicService(RicConfig config, EventLog& log);
  ~RicService();

  RicService(const RicService&) = delete;
  RicService& operator=(const RicService&) = delete;

  /// Restores the registry snapshot (if configured) and binds both
  /// listeners. Throws if they cannot be bound or coincide.
  void start();
  void stop();

  /// Bound endpoints, with ephemeral ports resolved.
  std::string e2_endpoint() const;
  std::string xapp_endpoint() const;

  std::vector<NodeEntry> nodes() const;
  bool node_live(const std::string& node) const;
  std::size_t subscription_count() const;
  RicStats stats() const;

 private:
  class Outbox;

  struct NodePeer {
    PeerId id = kNoPeer;
    std::shared_ptr<e2::Connection> conn;
    std::string node;  // empty until a successful setup
  };

  struct XappPeer {
    PeerId id = kNoPeer;
    std::shared_ptr<e2::Connection> conn;
    std::shared_ptr<Outbox> outbox;
  };

  struct PendingSubscription {
    PeerId xapp = kNoPeer;
    std::string node;
    std::uint32_t report_period_ms = 0;
  };

  struct PendingControl {
    PeerId xapp = kNoPeer;
    std::string node;
  };

  void accept_loop(e2::Listener& listener, bool node_side);
  void node_loop(PeerId id, std::shared_ptr<e2::Connection> conn);
  void xapp_loop(PeerId id, std::shared_ptr<e2::Connection> conn);
  void housekeeping_loop();

  void handle_e2_setup(PeerId peer, e2::Connection& conn, const e2::E2SetupRequest& m);
  void route_indication(PeerId peer, const e2::RicIndication& m, const e2::Frame& frame);
  void relay_subscription_response(const e2::RicSubscriptionResponse& m);
  void relay_control_ack(const e2::RicControlAck& m);
  void on_node_closed(PeerId peer);

  void handle_subscription(PeerId xapp, const e2::RicSubscriptionRequest& m);
  void route_control(PeerId xapp, const e2::RicControlRequest& m, const e2::Frame& frame);
  void on_xapp_closed(PeerId xapp);

  std::shared_ptr<Outbox> outbox_of(PeerId xapp) const;  // requires mu_
  void persist_registry();                                 // requires mu_

  RicConfig config_;
  EventLog& log_;

  std::unique_ptr<e2::Listener> node_listener_;
  std::unique_ptr<e2::Listener> xapp_listener_;
  std::thread node_acceptor_;
  std::thread xapp_acceptor_;
  std::thread housekeeper_;

  mutable std::mutex mu_;
  NodeRegistry registry_;
  SubscriptionTable subscriptions_;
  std::map<std::uint32_t, PendingSubscription> pending_subscriptions_;
  std::map<std::uint32_t, PendingControl> pending_controls_;
  std::map<PeerId, NodePeer> node_peers_;
  std::map<PeerId, XappPeer> xapp_peers_;
  RicStats stats_;
  PeerId next_peer_ = 1;

  std::mutex threads_mu_;
  std::vector<std::thread> conn_threads_;

  std::mutex stop_mu_;
  std::condition_variable stop_cv_;
  std::atomic<bool> running_{false};
};

}  // namespace orgym::ric
