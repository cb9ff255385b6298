#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "orgym/core/kpm_csv.hpp"
#include "orgym/core/log.hpp"
#include "orgym/xapp/logic.hpp"
#include "orgym/xapp/sm_connector.hpp"

namespace orgym::xapp {

struct XappConfig {
  std::string ric;
  std::string node;
  std::uint32_t report_period_ms = 250;
  std::uint32_t control_period_ms = 1000;
  std::string logic = "none";  // none | sched | sched-slicing
  double epsilon = 0.1;
  std::optional<std::filesystem::path> kpm_log;
  std::uint64_t seed = 1;
  std::uint32_t total_rbgs = kDefaultTotalRbgs;
  std::uint32_t request_id = 0;  // 0: derived from the node id
  std::uint32_t ack_timeout_ms = 2000;
  std::vector<double> reward_weights = {1.0, 1.0, 1.0};

  friend bool operator==(const XappConfig&, const XappConfig&) = default;
};

/// Parses the xApp JSON config. Throws ConfigError naming the bad key.
XappConfig parse_xapp_config(std::string_view text);
XappConfig load_xapp_config(const std::filesystem::path& path);

/// Non-zero 31-bit FNV-1a hash of the node id.
std::uint32_t default_request_id(std::string_view node);

/// Builds the logic unit named by `config.logic`. Without `initial`, the
/// reference logics start from a packed allocation learned from the first
/// window.
std::unique_ptr<LogicUnit> make_logic(const XappConfig& config,
                                      const std::optional<ControlAction>& initial);

/// One control the runtime attempted.
struct ControlTrace {
  std::uint64_t timestamp_ms = 0;  // simulated time of the window's last report
  ControlAction action;
  ControlOutcome outcome;
};

/// Header of the control trace CSV.
inline constexpr std::string_view kControlCsvHeader = "timestamp_ms,node,status,reason,policies,allocation";

/// Compact `{0:[0,3],1:[5,7]}` rendering of an allocation.
std::string format_allocation(const SliceAllocation& allocation);

/// The xApp main loop: subscribes to one node, logs every KPM record,
/// collects control-period windows, runs the logic unit and sends its
/// actions. Reconnects with exponential backoff when the RIC link drops.
class XappRuntime {
 public:
  struct Options {
    EventLog* log = nullptr;
    std::optional<ControlAction> initial_action;
    std::optional<std::filesystem::path> control_log;
    std::chrono::milliseconds backoff_min{1000};
    std::chrono::milliseconds backoff_max{30000};
    /// Replaces the logic named in the config.
    std::unique_ptr<LogicUnit> logic;
  };

  XappRuntime(XappConfig config, Options options);
  ~XappRuntime();

  XappRuntime(const XappRuntime&) = delete;
  XappRuntime& operator=(const XappRuntime&) = delete;

  /// Connects and subscribes; throws if either fails. Then runs in the
  /// background until stop().
  void start();
  /// Discards any partial window and disconnects.
  void stop();

  /// Indications fully handled, including any control round trip.
  std::uint64_t processed() const { return processed_; }
  /// Waits until processed() >= n; false on timeout.
  bool wait_processed(std::uint64_t n, std::chrono::milliseconds timeout) const;

  std::vector<ControlTrace> controls() const;
  std::uint64_t reconnects() const { return reconnects_; }
  bool connected() const { return connector_.connected(); }
  const XappConfig& config() const { return config_; }

 private:
  void connect_and_subscribe();
  void worker_loop();
  void handle(const e2::RicIndication& ind);
  bool wait_for_stop(std::chrono::milliseconds d);

  XappConfig config_;
  std::uint32_t request_id_;
  EventLog* log_;
  std::optional<std::filesystem::path> control_log_path_;
  std::chrono::milliseconds backoff_min_;
  std::chrono::milliseconds backoff_max_;
  std::unique_ptr<LogicUnit> logic_;
  std::unique_ptr<KpmCsvWriter> kpm_log_;
  std::ofstream control_log_;

  SmConnector connector_;
  std::thread worker_;

  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::deque<e2::RicIndication> inbox_;
  bool link_down_ = false;
  bool stopping_ = false;
  std::vector<ControlTrace> controls_;

  // Worker-thread state.
  std::vector<KpmRecord> window_;
  std::uint32_t window_reports_ = 0;

  std::atomic<std::uint64_t> processed_{0};
  std::atomic<std::uint64_t> reconnects_{0};
};

}  // namespace orgym::xapp
