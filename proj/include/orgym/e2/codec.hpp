#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "orgym/e2/messages.hpp"

namespace orgym::e2 {

/// Wire layout
///
///   frame   := length:u32 type:u8 payload      (length = 1 + |payload|)
///   string  := count:u16 bytes
///   list<T> := count:u16 T...
///
/// Integers are big-endian and fixed width, booleans are one byte (0/1).
/// KPM records are laid out in CSV column order:
///   timestamp_ms:u64 bs_id:string ue_id:u16 slice_id:u8 dl_buffer_bytes:u64
///   tx_bytes:u64 tx_tbs:u32 dl_cqi:u8 granted_rbgs:u32 policy:u8
///   slice_rbg_count:u32
/// A control action is
///   total_rbgs:u16 list<slice:u8 first:u16 last:u16> list<policy:u8>
inline constexpr std::uint32_t kMaxFrameLength = 1u << 20;
inline constexpr std::size_t kFrameHeaderSize = 4;

class EncodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DecodeError : public std::runtime_error {
 public:
  enum class Kind { Truncated, UnknownType, TrailingBytes, LengthOverflow, InvalidValue };

  DecodeError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

const char* decode_error_name(DecodeError::Kind k);

struct Frame {
  std::uint8_t type = 0;
  std::vector<std::uint8_t> payload;

  /// Header plus payload, ready for the wire.
  std::vector<std::uint8_t> bytes() const;
  friend bool operator==(const Frame&, const Frame&) = default;
};

Frame to_frame(const E2Message& m);
E2Message from_frame(const Frame& f);

/// Canonical framed encoding of `m`.
std::vector<std::uint8_t> encode(const E2Message& m);

/// Decodes exactly one complete frame; the whole buffer must be consumed.
E2Message decode(std::span<const std::uint8_t> bytes);

}  // namespace orgym::e2
