#include "orgym/ran/e2_node.hpp"

#include <fmt/format.h>

namespace orgym::ran {

E2NodeAgent::E2NodeAgent(Cell cell, Options options)
    : node_(cell.node()), options_(std::move(options)), cell_(std::move(cell)) {
  if (options_.csv_path) csv_ = std::make_unique<KpmCsvWriter>(*options_.csv_path);
}

E2NodeAgent::~E2NodeAgent() {
  disconnect();
  if (csv_) csv_->flush();
}

void E2NodeAgent::connect(const std::string& ric_endpoint) {
  auto conn = std::make_shared<e2::Connection>(e2::connect_to(ric_endpoint));
  conn->send(e2::E2SetupRequest{node_.str(), options_.ran_functions});
  auto reply = conn->receive();
  const auto* resp = std::get_if<e2::E2SetupResponse>(&reply);
  if (resp == nullptr || !resp->accepted) {
    conn->close();
    throw std::runtime_error(fmt::format("E2 setup for {} refused by the RIC", node_.str()));
  }
  conn_ = std::move(conn);
  connected_ = true;
  reader_ = std::thread([this] { reader_loop(); });
}

void E2NodeAgent::disconnect() {
  if (conn_) conn_->close();
  if (reader_.joinable()) reader_.join();
  connected_ = false;
}

void E2NodeAgent::reader_loop() {
  try {
    while (true) {
      auto m = conn_->receive();
      if (const auto* sub = std::get_if<e2::RicSubscriptionRequest>(&m)) {
        handle(*sub);
      } else if (const auto* ctl = std::get_if<e2::RicControlRequest>(&m)) {
        handle(*ctl);
      } else if (options_.log) {
        options_.log->warn("unexpected_message", "node={} type={}", node_.str(),
                           e2::message_name(e2::type_of(m)));
      }
    }
  } catch (const std::exception& e) {
    if (options_.log) options_.log->debug("ric_link_closed", "node={} reason=\"{}\"", node_.str(), e.what());
  }
  connected_ = false;
  std::lock_guard lock(mu_);
  subs_.clear();
}

void E2NodeAgent::handle(const e2::RicSubscriptionRequest& m) {
  bool accepted = false;
  {
    std::lock_guard lock(mu_);
    const bool period_ok = m.report_period_ms >= kMinReportPeriodMs &&
                           m.report_period_ms <= kMaxReportPeriodMs &&
                           m.report_period_ms % cell_.tti_ms() == 0;
    if (m.node == node_.str() && period_ok) {
      Subscription sub;
      sub.period_ms = m.report_period_ms;
      sub.next_due_ms = cell_.now_ms() + m.report_period_ms;
      cell_.collect_kpms(sub.window);  // sets the window baseline
      subs_.insert_or_assign(m.request_id, std::move(sub));
      accepted = true;
    }
  }
  send(e2::RicSubscriptionResponse{m.request_id, accepted});
}

void E2NodeAgent::handle(const e2::RicControlRequest& m) {
  e2::RicControlAck ack{m.request_id, e2::ControlStatus::Applied, RejectReason::None};
  {
    std::lock_guard lock(mu_);
    ControlEvent ev{cell_.now_ms(), m.request_id, m.action, RejectReason::None};
    if (m.node != node_.str()) {
      ev.outcome = RejectReason::NodeUnknown;
    } else if (auto err = cell_.check_control(m.action)) {
      ev.outcome = err->reason;
    } else {
      pending_ = m.action;
    }
    if (ev.outcome != RejectReason::None) {
      ack.status = e2::ControlStatus::Rejected;
      ack.reason_code = ev.outcome;
    }
    control_events_.push_back(std::move(ev));
  }
  send(ack);
}

bool E2NodeAgent::send(const e2::E2Message& m) {
  if (!conn_ || !connected_) return false;
  try {
    conn_->send(m);
    return true;
  } catch (const std::exception& e) {
    if (options_.log) options_.log->warn("send_failed", "node={} reason=\"{}\"", node_.str(), e.what());
    return false;
  }
}

std::size_t E2NodeAgent::tick() {
  std::vector<e2::RicIndication> out;
  {
    std::lock_guard lock(mu_);
    if (pending_) {
      cell_.apply_control(*pending_);
      pending_.reset();
    }
    cell_.step_tti();
    const auto now = cell_.now_ms();
    if (now % options_.report_period_ms == 0) {
      auto rows = cell_.collect_kpms();
      if (csv_) csv_->write(rows);
    }
    for (auto& [id, sub] : subs_) {
      if (now < sub.next_due_ms) continue;
      sub.next_due_ms += sub.period_ms;
      out.push_back(e2::RicIndication{id, node_.str(), now, cell_.collect_kpms(sub.window)});
    }
  }
  std::size_t sent = 0;
  for (const auto& ind : out) {
    if (send(ind)) ++sent;
  }
  indications_sent_ += sent;
  return sent;
}

std::uint64_t E2NodeAgent::now_ms() const {
  std::lock_guard lock(mu_);
  return cell_.now_ms();
}

std::size_t E2NodeAgent::subscription_count() const {
  std::lock_guard lock(mu_);
  return subs_.size();
}

std::vector<ControlEvent> E2NodeAgent::control_events() const {
  std::lock_guard lock(mu_);
  return control_events_;
}

}  // namespace orgym::ran
