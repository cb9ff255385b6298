#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "orgym/core/types.hpp"

namespace orgym::e2 {

// Node fields are carried as raw strings: a malformed id must still reach
// the RIC so it can be refused there.

struct E2SetupRequest {
  std::string node;
  std::vector<std::uint16_t> ran_functions;
  friend bool operator==(const E2SetupRequest&, const E2SetupRequest&) = default;
};

struct E2SetupResponse {
  bool accepted = false;
  friend bool operator==(const E2SetupResponse&, const E2SetupResponse&) = default;
};

struct RicSubscriptionRequest {
  std::uint32_t request_id = 0;
  std::string node;
  std::uint32_t report_period_ms = 0;
  friend bool operator==(const RicSubscriptionRequest&, const RicSubscriptionRequest&) = default;
};

struct RicSubscriptionResponse {
  std::uint32_t request_id = 0;
  bool accepted = false;
  friend bool operator==(const RicSubscriptionResponse&, const RicSubscriptionResponse&) = default;
};

struct RicIndication {
  std::uint32_t request_id = 0;
  std::string node;
  std::uint64_t timestamp_ms = 0;
  std::vector<KpmRecord> records;
  friend bool operator==(const RicIndication&, const RicIndication&) = default;
};

struct RicControlRequest {
  std::uint32_t request_id = 0;
  std::string node;
  ControlAction action;
  friend bool operator==(const RicControlRequest&, const RicControlRequest&) = default;
};

enum class ControlStatus : std::uint8_t { Applied = 0, Rejected = 1 };

struct RicControlAck {
  std::uint32_t request_id = 0;
  ControlStatus status = ControlStatus::Applied;
  RejectReason reason_code = RejectReason::None;
  friend bool operator==(const RicControlAck&, const RicControlAck&) = default;
};

/// Variant order defines the wire type tag: index + 1.
using E2Message = std::variant<E2SetupRequest, E2SetupResponse, RicSubscriptionRequest,
                               RicSubscriptionResponse, RicIndication, RicControlRequest,
                               RicControlAck>;

enum class MessageType : std::uint8_t {
  E2SetupRequest = 1,
  E2SetupResponse = 2,
  RicSubscriptionRequest = 3,
  RicSubscriptionResponse = 4,
  RicIndication = 5,
  RicControlRequest = 6,
  RicControlAck = 7,
};

inline MessageType type_of(const E2Message& m) {
  return static_cast<MessageType>(m.index() + 1);
}

const char* message_name(MessageType t);

}  // namespace orgym::e2
