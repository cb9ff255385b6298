#include "orgym/xapp/runtime.hpp"

#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "json.hpp"
#include "orgym/core/config.hpp"

namespace orgym::xapp {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& key, const std::string& msg) {
  throw ConfigError(ConfigError::Kind::Validation, key, fmt::format("{}: {}", key, msg));
}

std::uint64_t get_uint(const json& v, const std::string& key, std::uint64_t max) {
  if (!v.is_number_unsigned()) invalid(key, "expected a non-negative integer");
  auto n = v.get<std::uint64_t>();
  if (n > max) invalid(key, fmt::format("value {} exceeds {}", n, max));
  return n;
}

std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) invalid(key, "expected a string");
  return v.get<std::string>();
}

std::string csv_quote(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

XappConfig parse_xapp_config(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ConfigError(ConfigError::Kind::Syntax, "", "xApp config is not valid JSON");
  if (!doc.is_object()) throw ConfigError(ConfigError::Kind::Syntax, "", "xApp config must be a JSON object");

  static const std::set<std::string> kKeys = {
      "ric",  "node",       "report-period-ms", "control-period-ms", "logic",          "epsilon",
      "kpm-log", "seed",    "total-rbgs",       "request-id",        "ack-timeout-ms", "reward-weights"};
  for (const auto& [k, _] : doc.items()) {
    if (!kKeys.count(k)) invalid(k, "unknown key");
  }

  XappConfig c;
  if (doc.contains("ric")) c.ric = get_string(doc["ric"], "ric");
  if (doc.contains("node")) {
    c.node = get_string(doc["node"], "node");
    if (!NodeId::is_valid(c.node)) invalid("node", fmt::format("'{}' is not a node id", c.node));
  }
  if (doc.contains("report-period-ms")) {
    c.report_period_ms = static_cast<std::uint32_t>(get_uint(doc["report-period-ms"], "report-period-ms", UINT32_MAX));
  }
  check_report_period(c.report_period_ms, "report-period-ms");
  if (doc.contains("control-period-ms")) {
    c.control_period_ms =
        static_cast<std::uint32_t>(get_uint(doc["control-period-ms"], "control-period-ms", UINT32_MAX));
  }
  if (c.control_period_ms == 0 || c.control_period_ms % c.report_period_ms != 0) {
    invalid("control-period-ms", "must be a positive multiple of report-period-ms");
  }
  if (doc.contains("logic")) {
    c.logic = get_string(doc["logic"], "logic");
    if (c.logic != "none" && c.logic != "sched" && c.logic != "sched-slicing") {
      invalid("logic", fmt::format("unknown logic '{}'", c.logic));
    }
  }
  if (doc.contains("epsilon")) {
    if (!doc["epsilon"].is_number()) invalid("epsilon", "expected a number");
    c.epsilon = doc["epsilon"].get<double>();
    if (!(c.epsilon >= 0.0 && c.epsilon <= 1.0)) invalid("epsilon", "must lie in [0, 1]");
  }
  if (doc.contains("kpm-log")) c.kpm_log = get_string(doc["kpm-log"], "kpm-log");
  if (doc.contains("seed")) c.seed = get_uint(doc["seed"], "seed", UINT64_MAX);
  if (doc.contains("total-rbgs")) {
    c.total_rbgs = static_cast<std::uint32_t>(get_uint(doc["total-rbgs"], "total-rbgs", 65535));
    if (c.total_rbgs == 0) invalid("total-rbgs", "must be positive");
  }
  if (doc.contains("request-id")) {
    c.request_id = static_cast<std::uint32_t>(get_uint(doc["request-id"], "request-id", UINT32_MAX));
  }
  if (doc.contains("ack-timeout-ms")) {
    c.ack_timeout_ms = static_cast<std::uint32_t>(get_uint(doc["ack-timeout-ms"], "ack-timeout-ms", UINT32_MAX));
  }
  if (doc.contains("reward-weights")) {
    const auto& w = doc["reward-weights"];
    if (!w.is_array()) invalid("reward-weights", "expected an array of numbers");
    c.reward_weights.clear();
    for (const auto& x : w) {
      if (!x.is_number() || x.get<double>() < 0.0) invalid("reward-weights", "weights must be non-negative numbers");
      c.reward_weights.push_back(x.get<double>());
    }
  }
  return c;
}

XappConfig load_xapp_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(ConfigError::Kind::Syntax, "", fmt::format("cannot read {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_xapp_config(ss.str());
}

std::uint32_t default_request_id(std::string_view node) {
  std::uint32_t h = 2166136261u;
  for (char ch : node) {
    h ^= static_cast<std::uint8_t>(ch);
    h *= 16777619u;
  }
  h &= 0x7fffffffu;
  return h == 0 ? 1 : h;
}

std::unique_ptr<LogicUnit> make_logic(const XappConfig& config, const std::optional<ControlAction>& initial) {
  if (config.logic == "none") return std::make_unique<NullLogic>();
  ControlAction start;
  start.slice_allocation.total_rbgs = config.total_rbgs;
  if (initial) start = *initial;
  RewardSpec reward{config.reward_weights};
  if (config.logic == "sched") {
    return std::make_unique<SchedLogic>(start, config.total_rbgs, config.epsilon, config.seed, reward);
  }
  if (config.logic == "sched-slicing") {
    return std::make_unique<SchedSlicingLogic>(start, config.total_rbgs, config.epsilon, config.seed, reward);
  }
  invalid("logic", fmt::format("unknown logic '{}'", config.logic));
}

std::string format_allocation(const SliceAllocation& allocation) {
  std::vector<std::string> parts;
  for (const auto& [slice, r] : allocation.ranges) parts.push_back(fmt::format("{}:[{},{}]", slice, r.first, r.last));
  return fmt::format("{{{}}}", fmt::join(parts, ","));
}

XappRuntime::XappRuntime(XappConfig config, Options options)
    : config_(std::move(config)),
      request_id_(config_.request_id ? config_.request_id : default_request_id(config_.node)),
      log_(options.log),
      control_log_path_(std::move(options.control_log)),
      backoff_min_(options.backoff_min),
      backoff_max_(options.backoff_max),
      logic_(options.logic ? std::move(options.logic) : make_logic(config_, options.initial_action)),
      connector_(SmConnector::Options{std::chrono::milliseconds(config_.ack_timeout_ms),
                                      std::chrono::milliseconds(config_.ack_timeout_ms), options.log}) {
  if (!NodeId::is_valid(config_.node)) invalid("node", fmt::format("'{}' is not a node id", config_.node));
  if (config_.kpm_log) kpm_log_ = std::make_unique<KpmCsvWriter>(*config_.kpm_log);
  if (control_log_path_) {
    control_log_.open(*control_log_path_);
    if (!control_log_) throw std::runtime_error(fmt::format("cannot open {}", control_log_path_->string()));
    control_log_ << kControlCsvHeader << '\n';
  }
  connector_.on_disconnect([this] {
    std::lock_guard lock(mu_);
    link_down_ = true;
    cv_.notify_all();
  });
}

XappRuntime::~XappRuntime() { stop(); }

void XappRuntime::connect_and_subscribe() {
  connector_.connect(config_.ric);
  connector_.subscribe(config_.node, config_.report_period_ms, request_id_, [this](const e2::RicIndication& ind) {
    std::lock_guard lock(mu_);
    inbox_.push_back(ind);
    cv_.notify_all();
  });
  if (log_) log_->info("subscribed", "node={} request_id={} period_ms={}", config_.node, request_id_,
                       config_.report_period_ms);
}

void XappRuntime::start() {
  {
    std::lock_guard lock(mu_);
    link_down_ = false;
  }
  try {
    connect_and_subscribe();
  } catch (...) {
    connector_.close();
    throw;
  }
  worker_ = std::thread([this] { worker_loop(); });
}

void XappRuntime::stop() {
  {
    std::lock_guard lock(mu_);
    if (stopping_) return;
    stopping_ = true;
    cv_.notify_all();
  }
  connector_.close();
  if (worker_.joinable()) worker_.join();
  if (kpm_log_) kpm_log_->flush();
  if (control_log_.is_open()) control_log_.flush();
}

bool XappRuntime::wait_for_stop(std::chrono::milliseconds d) {
  std::unique_lock lock(mu_);
  return cv_.wait_for(lock, d, [&] { return stopping_; });
}

void XappRuntime::worker_loop() {
  while (true) {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return stopping_ || link_down_ || !inbox_.empty(); });
    if (stopping_) return;
    if (!inbox_.empty()) {
      auto ind = std::move(inbox_.front());
      inbox_.pop_front();
      lock.unlock();
      handle(ind);
      continue;
    }
    link_down_ = false;
    lock.unlock();
    if (log_) log_->warn("ric_link_lost", "node={}", config_.node);
    auto delay = backoff_min_;
    while (true) {
      if (wait_for_stop(delay)) return;
      try {
        connect_and_subscribe();
        ++reconnects_;
        break;
      } catch (const std::exception& e) {
        if (log_) log_->warn("reconnect_failed", "node={} retry_ms={} reason=\"{}\"", config_.node,
                             std::min(delay * 2, backoff_max_).count(), e.what());
        connector_.close();
        delay = std::min(delay * 2, backoff_max_);
        std::lock_guard relock(mu_);
        link_down_ = false;
      }
    }
  }
}

void XappRuntime::handle(const e2::RicIndication& ind) {
  if (kpm_log_) kpm_log_->write(ind.records);
  window_.insert(window_.end(), ind.records.begin(), ind.records.end());
  ++window_reports_;
  if (window_reports_ * config_.report_period_ms >= config_.control_period_ms) {
    auto action = logic_->decide(window_);
    window_.clear();
    window_reports_ = 0;
    if (action) {
      auto outcome = connector_.send_control(config_.node, *action, config_.total_rbgs);
      logic_->on_outcome(*action, outcome.applied());
      std::vector<int> codes;
      for (auto p : action->slice_scheduling_policy) codes.push_back(policy_code(p));
      const std::string policies = fmt::format("[{}]", fmt::join(codes, ","));
      const std::string allocation = format_allocation(action->slice_allocation);
      const std::string_view reason =
          outcome.status == ControlStatus::Applied ? std::string_view("none") : reject_reason_name(outcome.reason);
      if (log_) {
        log_->debug("control", "node={} status={} policies={} allocation={}", config_.node,
                    control_status_name(outcome.status), policies, allocation);
      }
      if (control_log_.is_open()) {
        control_log_ << fmt::format("{},{},{},{},{},{}\n", ind.timestamp_ms, config_.node,
                                    control_status_name(outcome.status), reason, csv_quote(policies),
                                    csv_quote(allocation));
      }
      std::lock_guard lock(mu_);
      controls_.push_back(ControlTrace{ind.timestamp_ms, *action, outcome});
    }
  }
  {
    std::lock_guard lock(mu_);
    ++processed_;
  }
  cv_.notify_all();
}

bool XappRuntime::wait_processed(std::uint64_t n, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  return cv_.wait_for(lock, timeout, [&] { return processed_ >= n || stopping_; }) && processed_ >= n;
}

std::vector<ControlTrace> XappRuntime::controls() const {
  std::lock_guard lock(mu_);
  return controls_;
}

}  // namespace orgym::xapp
