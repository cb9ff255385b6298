#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "orgym/core/config.hpp"
#include "orgym/e2/messages.hpp"

namespace orgym::test {

using Rng = std::mt19937_64;

inline std::uint64_t uniform(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

inline std::string random_node(Rng& rng) {
  return fmt::format("gnb:{:03}-{:03}-{:08X}", uniform(rng, 0, 999), uniform(rng, 0, 999),
                     uniform(rng, 0, 0xFFFFFFFFull));
}

inline KpmRecord random_record(Rng& rng) {
  KpmRecord r;
  r.timestamp_ms = uniform(rng, 0, UINT64_MAX);
  r.bs_id = random_node(rng);
  r.ue_id = static_cast<UeId>(uniform(rng, 0, 65535));
  r.slice_id = static_cast<SliceId>(uniform(rng, 0, 255));
  r.dl_buffer_bytes = uniform(rng, 0, UINT64_MAX);
  r.tx_bytes = uniform(rng, 0, UINT64_MAX);
  r.tx_tbs = static_cast<std::uint32_t>(uniform(rng, 0, UINT32_MAX));
  r.dl_cqi = static_cast<std::uint8_t>(uniform(rng, 1, 15));
  r.granted_rbgs = static_cast<std::uint32_t>(uniform(rng, 0, UINT32_MAX));
  r.policy = static_cast<SchedulingPolicy>(uniform(rng, 0, 2));
  r.slice_rbg_count = static_cast<std::uint32_t>(uniform(rng, 0, UINT32_MAX));
  return r;
}

/// Encodable action; not necessarily valid for any particular cell.
inline ControlAction random_action(Rng& rng) {
  ControlAction a;
  a.slice_allocation.total_rbgs = static_cast<std::uint32_t>(uniform(rng, 0, 65535));
  auto n = uniform(rng, 0, 6);
  for (std::uint64_t i = 0; i < n; ++i) {
    a.slice_allocation.ranges[static_cast<SliceId>(uniform(rng, 0, 255))] =
        RbgRange{static_cast<std::uint32_t>(uniform(rng, 0, 65535)), static_cast<std::uint32_t>(uniform(rng, 0, 65535))};
  }
  auto p = uniform(rng, 0, 6);
  for (std::uint64_t i = 0; i < p; ++i) a.slice_scheduling_policy.push_back(static_cast<SchedulingPolicy>(uniform(rng, 0, 2)));
  return a;
}

inline std::uint32_t random_request_id(Rng& rng) { return static_cast<std::uint32_t>(uniform(rng, 1, UINT32_MAX)); }

/// A random valid message of the given variant index (0..6).
inline e2::E2Message random_message(Rng& rng, std::size_t variant) {
  switch (variant) {
    case 0: {
      e2::E2SetupRequest m{random_node(rng), {}};
      auto n = uniform(rng, 0, 8);
      for (std::uint64_t i = 0; i < n; ++i) m.ran_functions.push_back(static_cast<std::uint16_t>(uniform(rng, 0, 65535)));
      return m;
    }
    case 1: return e2::E2SetupResponse{uniform(rng, 0, 1) == 1};
    case 2:
      return e2::RicSubscriptionRequest{random_request_id(rng), random_node(rng),
                                        static_cast<std::uint32_t>(uniform(rng, 0, UINT32_MAX))};
    case 3: return e2::RicSubscriptionResponse{random_request_id(rng), uniform(rng, 0, 1) == 1};
    case 4: {
      e2::RicIndication m{random_request_id(rng), random_node(rng), uniform(rng, 0, UINT64_MAX), {}};
      auto n = uniform(rng, 0, 12);
      for (std::uint64_t i = 0; i < n; ++i) m.records.push_back(random_record(rng));
      return m;
    }
    case 5: return e2::RicControlRequest{random_request_id(rng), random_node(rng), random_action(rng)};
    default:
      return e2::RicControlAck{random_request_id(rng), static_cast<e2::ControlStatus>(uniform(rng, 0, 1)),
                               static_cast<RejectReason>(uniform(rng, 0, 4))};
  }
}

inline std::vector<std::uint8_t> read_hex(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::uint8_t> out;
  std::string tok;
  while (in >> tok) out.push_back(static_cast<std::uint8_t>(std::stoul(tok, nullptr, 16)));
  return out;
}

/// Named golden fixtures; `tests/vectors/<name>.hex` holds each encoding.
inline std::vector<std::pair<std::string, e2::E2Message>> golden_messages() {
  using namespace e2;
  const std::string node = "gnb:311-048-01000501";
  KpmRecord rec{1000, node, 2, 1, 4096, 1500, 3, 12, 4, SchedulingPolicy::ProportionallyFair, 8};
  ControlAction action{{{{0, {0, 3}}, {1, {5, 7}}}, 25},
                       {SchedulingPolicy::ProportionallyFair, SchedulingPolicy::RoundRobin}};
  return {
      {"e2_setup_request", E2SetupRequest{node, {0, 2}}},
      {"e2_setup_response", E2SetupResponse{true}},
      {"ric_subscription_request", RicSubscriptionRequest{7, node, 250}},
      {"ric_subscription_response", RicSubscriptionResponse{7, false}},
      {"ric_indication", RicIndication{7, node, 1000, {rec}}},
      {"ric_indication_empty", RicIndication{7, node, 250, {}}},
      {"ric_control_request", RicControlRequest{7, node, action}},
      {"ric_control_ack", RicControlAck{7, ControlStatus::Rejected, RejectReason::Overlap}},
  };
}

/// Empty scratch directory unique to `name`.
inline std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "orgym-tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

/// 1 base station, 6 UEs, three slices over 25 RBGs.
inline std::string three_slice_scenario_json(std::uint32_t num_bs = 1, std::uint32_t report_period_ms = 250) {
  return fmt::format(R"({{
    "slice-allocation": "{{0:[0,9],1:[10,17],2:[18,24]}}",
    "slice-scheduling-policy": [0, 0, 0],
    "slice-users": "{{0:[1,2],1:[3,4],2:[5,6]}}",
    "num-bs": {},
    "report-period-ms": {},
    "control-period-ms": {}
  }})",
                     num_bs, report_period_ms, report_period_ms * 4);
}

}  // namespace orgym::test
