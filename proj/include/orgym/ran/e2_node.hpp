#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "orgym/core/kpm_csv.hpp"
#include "orgym/core/log.hpp"
#include "orgym/e2/framing.hpp"
#include "orgym/ran/cell.hpp"

namespace orgym::ran {

/// Record of a control request the node received.
struct ControlEvent {
  std::uint64_t received_at_ms = 0;
  std::uint32_t request_id = 0;
  ControlAction action;
  RejectReason outcome = RejectReason::None;
};

/// E2 termination of a simulated base station: performs E2 setup, accepts
/// RIC subscriptions, emits periodic RIC Indications, and validates and
/// applies RIC Control requests to its cell.
///
/// The simulation clock is driven by the owner through tick(); incoming
/// messages are handled on an internal reader thread. Accepted controls are
/// applied at the next TTI boundary.
class E2NodeAgent {
 public:
  struct Options {
    std::uint32_t report_period_ms = 250;
    std::optional<std::filesystem::path> csv_path;
    std::vector<std::uint16_t> ran_functions = {0};
    EventLog* log = nullptr;
  };

  E2NodeAgent(Cell cell, Options options);
  ~E2NodeAgent();

  E2NodeAgent(const E2NodeAgent&) = delete;
  E2NodeAgent& operator=(const E2NodeAgent&) = delete;

  /// Connects to the RIC's node listener and completes E2 setup.
  void connect(const std::string& ric_endpoint);
  void disconnect();
  bool connected() const { return connected_; }

  /// Advances one TTI. Returns the number of indications sent.
  std::size_t tick();

  std::uint64_t now_ms() const;
  std::uint64_t indications_sent() const { return indications_sent_; }
  std::size_t subscription_count() const;
  std::vector<ControlEvent> control_events() const;
  const NodeId& node() const { return node_; }

  /// Runs `fn` with the cell under the agent's lock.
  template <typename Fn>
  auto with_cell(Fn&& fn) const {
    std::lock_guard lock(mu_);
    return fn(cell_);
  }

 private:
  struct Subscription {
    std::uint32_t period_ms = 0;
    std::uint64_t next_due_ms = 0;
    KpmAccumulator window;
  };

  void reader_loop();
  void handle(const e2::RicSubscriptionRequest& m);
  void handle(const e2::RicControlRequest& m);
  bool send(const e2::E2Message& m);

  const NodeId node_;
  Options options_;
  mutable std::mutex mu_;
  Cell cell_;
  std::optional<ControlAction> pending_;
  std::map<std::uint32_t, Subscription> subs_;
  std::vector<ControlEvent> control_events_;
  std::unique_ptr<KpmCsvWriter> csv_;

  std::shared_ptr<e2::Connection> conn_;
  std::thread reader_;
  std::atomic<bool> connected_{false};
  std::atomic<std::uint64_t> indications_sent_{0};
};

}  // namespace orgym::ran
