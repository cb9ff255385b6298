#include "orgym/xapp/sm_connector.hpp"

#include <fmt/format.h>

namespace orgym::xapp {

std::string_view control_status_name(ControlStatus s) {
  switch (s) {
    case ControlStatus::Applied: return "applied";
    case ControlStatus::Rejected: return "rejected";
    case ControlStatus::BlockedLocally: return "blocked";
    case ControlStatus::Timeout: return "timeout";
  }
  return "?";
}

SmConnector::~SmConnector() { close(); }

void SmConnector::connect(const std::string& ric_endpoint) {
  close();
  auto conn = std::make_shared<e2::Connection>(e2::connect_to(ric_endpoint));
  {
    std::lock_guard lock(mu_);
    conn_ = conn;
    connected_ = true;
    link_lost_ = false;
  }
  reader_ = std::thread([this, conn] { reader_loop(conn); });
}

void SmConnector::close() {
  std::shared_ptr<e2::Connection> conn;
  {
    std::lock_guard lock(mu_);
    conn = conn_;
  }
  if (conn) conn->close();
  if (reader_.joinable() && reader_.get_id() != std::this_thread::get_id()) reader_.join();
}

bool SmConnector::connected() const {
  std::lock_guard lock(mu_);
  return connected_;
}

bool SmConnector::subscribed(const std::string& node) const {
  std::lock_guard lock(mu_);
  return subs_.count(node) > 0;
}

void SmConnector::reader_loop(std::shared_ptr<e2::Connection> conn) {
  try {
    while (true) {
      auto m = conn->receive();
      if (const auto* ind = std::get_if<e2::RicIndication>(&m)) {
        IndicationCallback cb;
        {
          std::lock_guard lock(mu_);
          auto it = subs_.find(ind->node);
          if (it != subs_.end() && it->second.request_id == ind->request_id) cb = it->second.callback;
        }
        if (cb) {
          cb(*ind);
        } else if (options_.log) {
          options_.log->warn("indication_unrouted", "request_id={} node={}", ind->request_id, ind->node);
        }
      } else if (const auto* resp = std::get_if<e2::RicSubscriptionResponse>(&m)) {
        std::lock_guard lock(mu_);
        auto it = pending_subs_.find(resp->request_id);
        if (it == pending_subs_.end()) continue;
        // Register before waking the subscriber so the first Indication,
        // which may follow immediately, already has a callback.
        if (resp->accepted) subs_[it->second.node] = std::move(it->second);
        pending_subs_.erase(it);
        sub_answers_[resp->request_id] = resp->accepted;
        cv_.notify_all();
      } else if (const auto* ack = std::get_if<e2::RicControlAck>(&m)) {
        std::lock_guard lock(mu_);
        auto it = pending_acks_.find(ack->request_id);
        if (it == pending_acks_.end()) continue;
        it->second = *ack;
        cv_.notify_all();
      } else if (options_.log) {
        options_.log->warn("unexpected_message", "type={}", e2::message_name(e2::type_of(m)));
      }
    }
  } catch (const std::exception& e) {
    if (options_.log) options_.log->debug("ric_link_closed", "reason=\"{}\"", e.what());
  }
  {
    std::lock_guard lock(mu_);
    connected_ = false;
    link_lost_ = true;
    subs_.clear();
    cv_.notify_all();
  }
  if (on_disconnect_) on_disconnect_();
}

void SmConnector::subscribe(const std::string& node, std::uint32_t report_period_ms,
                            std::uint32_t request_id, IndicationCallback callback) {
  std::shared_ptr<e2::Connection> conn;
  {
    std::lock_guard lock(mu_);
    if (!connected_) throw SdkError("not connected to a RIC");
    if (subs_.count(node)) throw SdkError(fmt::format("already subscribed to {}", node));
    for (const auto& [_, p] : pending_subs_) {
      if (p.node == node) throw SdkError(fmt::format("subscription to {} already in progress", node));
    }
    pending_subs_[request_id] = Subscription{node, request_id, std::move(callback)};
    sub_answers_[request_id].reset();
    conn = conn_;
  }
  try {
    conn->send(e2::RicSubscriptionRequest{request_id, node, report_period_ms});
  } catch (const std::exception& e) {
    std::lock_guard lock(mu_);
    pending_subs_.erase(request_id);
    sub_answers_.erase(request_id);
    throw SubscriptionRejected(fmt::format("subscription to {} not sent: {}", node, e.what()));
  }
  std::unique_lock lock(mu_);
  bool answered = cv_.wait_for(lock, options_.subscribe_timeout,
                               [&] { return sub_answers_[request_id].has_value() || !connected_; });
  auto answer = sub_answers_[request_id];
  sub_answers_.erase(request_id);
  pending_subs_.erase(request_id);
  if (!answered || !answer) {
    throw SubscriptionRejected(fmt::format("no subscription response for {}", node));
  }
  if (!*answer) throw SubscriptionRejected(fmt::format("subscription to {} rejected", node));
}

ControlOutcome SmConnector::send_control(const std::string& node, const ControlAction& action,
                                         std::uint32_t total_rbgs) {
  if (std::this_thread::get_id() == reader_.get_id()) {
    throw SdkError("send_control called from the indication callback thread");
  }
  if (auto err = validate_control_action(action, total_rbgs)) {
    return ControlOutcome{ControlStatus::BlockedLocally, err->reason, err->detail};
  }
  std::shared_ptr<e2::Connection> conn;
  std::uint32_t rid = 0;
  {
    std::lock_guard lock(mu_);
    auto it = subs_.find(node);
    if (it == subs_.end()) {
      if (!connected_ && link_lost_) return ControlOutcome{ControlStatus::Timeout, RejectReason::None, "RIC link down"};
      throw SdkError(fmt::format("no subscription to {}", node));
    }
    rid = it->second.request_id;
    pending_acks_[rid].reset();
    conn = conn_;
  }
  try {
    conn->send(e2::RicControlRequest{rid, node, action});
  } catch (const std::exception& e) {
    std::lock_guard lock(mu_);
    pending_acks_.erase(rid);
    return ControlOutcome{ControlStatus::Timeout, RejectReason::None, e.what()};
  }
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, options_.ack_timeout, [&] { return pending_acks_[rid].has_value() || !connected_; });
  auto ack = pending_acks_[rid];
  pending_acks_.erase(rid);
  if (!ack) return ControlOutcome{ControlStatus::Timeout, RejectReason::None, "no ack"};
  if (ack->status == e2::ControlStatus::Applied) return ControlOutcome{ControlStatus::Applied, {}, {}};
  return ControlOutcome{ControlStatus::Rejected, ack->reason_code,
                        std::string(reject_reason_name(ack->reason_code))};
}

}  // namespace orgym::xapp
