#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>

#include "orgym/core/log.hpp"
#include "orgym/e2/framing.hpp"

namespace orgym::xapp {

/// Misuse of the connector: double subscription, no subscription, not connected.
class SdkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SubscriptionRejected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ControlStatus { Applied, Rejected, BlockedLocally, Timeout };

std::string_view control_status_name(ControlStatus s);

struct ControlOutcome {
  ControlStatus status = ControlStatus::Timeout;
  RejectReason reason = RejectReason::None;
  std::string detail;

  bool applied() const { return status == ControlStatus::Applied; }
};

using IndicationCallback = std::function<void(const e2::RicIndication&)>;

/// The xApp's link to the RIC. Owns one connection and a reader thread that
/// dispatches Indications to per-subscription callbacks in arrival order.
///
/// Callbacks run on the reader thread, so they must not call send_control()
/// (the ack they would wait for is read by that same thread).
class SmConnector {
 public:
  struct Options {
    std::chrono::milliseconds ack_timeout{2000};
    std::chrono::milliseconds subscribe_timeout{2000};
    EventLog* log = nullptr;
  };

  SmConnector() : SmConnector(Options{}) {}
  explicit SmConnector(Options options) : options_(options) {}
  ~SmConnector();

  SmConnector(const SmConnector&) = delete;
  SmConnector& operator=(const SmConnector&) = delete;

  /// Throws e2::ConnectionRefused if nothing listens at `ric_endpoint`.
  void connect(const std::string& ric_endpoint);
  void close();
  bool connected() const;

  /// Called once from the reader thread when the RIC link drops.
  void on_disconnect(std::function<void()> fn) { on_disconnect_ = std::move(fn); }

  /// Subscribes to KPM reports from `node` and blocks for the RIC's answer.
  /// Throws SubscriptionRejected when refused and SdkError if `node` is
  /// already subscribed on this connector (nothing is sent in that case).
  void subscribe(const std::string& node, std::uint32_t report_period_ms, std::uint32_t request_id,
                 IndicationCallback callback);
  bool subscribed(const std::string& node) const;

  /// Validates `action` locally, sends it over the subscription to `node`
  /// and waits for the node's ack. Throws SdkError without a subscription,
  /// unless the link dropped underneath it (then the outcome is Timeout).
  ControlOutcome send_control(const std::string& node, const ControlAction& action,
                              std::uint32_t total_rbgs);

 private:
  struct Subscription {
    std::string node;
    std::uint32_t request_id = 0;
    IndicationCallback callback;
  };

  void reader_loop(std::shared_ptr<e2::Connection> conn);

  Options options_;
  std::function<void()> on_disconnect_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::shared_ptr<e2::Connection> conn_;
  bool connected_ = false;
  bool link_lost_ = false;  // set when an established link drops
  std::thread reader_;
  std::map<std::string, Subscription> subs_;                 // by node
  std::map<std::uint32_t, Subscription> pending_subs_;       // by request_id
  std::map<std::uint32_t, std::optional<bool>> sub_answers_; // by request_id
  std::map<std::uint32_t, std::optional<e2::RicControlAck>> pending_acks_;
};

}  // namespace orgym::xapp
