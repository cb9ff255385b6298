#include "orgym/e2/codec.hpp"

#include <fmt/format.h>

namespace orgym::e2 {

namespace {

using Kind = DecodeError::Kind;

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) { be(v, 2); }
  void u32(std::uint32_t v) { be(v, 4); }
  void u64(std::uint64_t v) { be(v, 8); }
  void boolean(bool v) { u8(v ? 1 : 0); }

  void count(std::size_t n, const char* what) {
    if (n > 0xFFFF) throw EncodeError(fmt::format("{} has {} entries (max 65535)", what, n));
    u16(static_cast<std::uint16_t>(n));
  }

  void str(const std::string& s) {
    count(s.size(), "string");
    buf_.insert(buf_.end(), s.begin(), s.end());
  }

  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  void be(std::uint64_t v, int width) {
    for (int i = width - 1; i >= 0; --i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(be(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(be(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(be(4)); }
  std::uint64_t u64() { return be(8); }

  bool boolean() {
    auto v = u8();
    if (v > 1) throw DecodeError(Kind::InvalidValue, fmt::format("boolean byte {}", v));
    return v == 1;
  }

  std::string str() {
    auto n = u16();
    need(n);
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  void finish() const {
    if (pos_ != data_.size()) {
      throw DecodeError(Kind::TrailingBytes,
                        fmt::format("{} unread payload bytes", data_.size() - pos_));
    }
  }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) {
      throw DecodeError(Kind::Truncated, fmt::format("payload ends at byte {}, {} more needed",
                                                     data_.size(), n - (data_.size() - pos_)));
    }
  }

  std::uint64_t be(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v = (v << 8) | data_[pos_++];
    return v;
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

std::uint32_t read_request_id(Reader& r) {
  auto id = r.u32();
  if (id == 0) throw DecodeError(Kind::InvalidValue, "request_id 0");
  return id;
}

void write_request_id(Writer& w, std::uint32_t id) {
  if (id == 0) throw EncodeError("request_id must be positive");
  w.u32(id);
}

SchedulingPolicy read_policy(Reader& r) {
  auto code = r.u8();
  auto p = policy_from_code(code);
  if (!p) throw DecodeError(Kind::InvalidValue, fmt::format("policy code {}", code));
  return *p;
}

void write_record(Writer& w, const KpmRecord& k) {
  w.u64(k.timestamp_ms);
  w.str(k.bs_id);
  w.u16(k.ue_id);
  w.u8(k.slice_id);
  w.u64(k.dl_buffer_bytes);
  w.u64(k.tx_bytes);
  w.u32(k.tx_tbs);
  w.u8(k.dl_cqi);
  w.u32(k.granted_rbgs);
  w.u8(policy_code(k.policy));
  w.u32(k.slice_rbg_count);
}

KpmRecord read_record(Reader& r) {
  KpmRecord k;
  k.timestamp_ms = r.u64();
  k.bs_id = r.str();
  if (!NodeId::is_valid(k.bs_id)) {
    throw DecodeError(Kind::InvalidValue, fmt::format("record bs_id '{}'", k.bs_id));
  }
  k.ue_id = r.u16();
  k.slice_id = r.u8();
  k.dl_buffer_bytes = r.u64();
  k.tx_bytes = r.u64();
  k.tx_tbs = r.u32();
  k.dl_cqi = r.u8();
  if (k.dl_cqi < 1 || k.dl_cqi > 15) {
    throw DecodeError(Kind::InvalidValue, fmt::format("dl_cqi {}", k.dl_cqi));
  }
  k.granted_rbgs = r.u32();
  k.policy = read_policy(r);
  k.slice_rbg_count = r.u32();
  return k;
}

void write_action(Writer& w, const ControlAction& a) {
  if (a.slice_allocation.total_rbgs > 0xFFFF) throw EncodeError("total_rbgs exceeds 65535");
  w.u16(static_cast<std::uint16_t>(a.slice_allocation.total_rbgs));
  w.count(a.slice_allocation.ranges.size(), "slice allocation");
  for (const auto& [slice, range] : a.slice_allocation.ranges) {
    if (range.first > 0xFFFF || range.last > 0xFFFF) throw EncodeError("RBG index exceeds 65535");
    w.u8(slice);
    w.u16(static_cast<std::uint16_t>(range.first));
    w.u16(static_cast<std::uint16_t>(range.last));
  }
  w.count(a.slice_scheduling_policy.size(), "policy list");
  for (auto p : a.slice_scheduling_policy) w.u8(policy_code(p));
}

ControlAction read_action(Reader& r) {
  ControlAction a;
  a.slice_allocation.total_rbgs = r.u16();
  auto n = r.u16();
  SliceId prev = 0;
  for (std::uint16_t i = 0; i < n; ++i) {
    SliceId slice = r.u8();
    // Canonical form lists slices in ascending order without repeats.
    if (i > 0 && slice <= prev) {
      throw DecodeError(Kind::InvalidValue, fmt::format("slice {} out of order", slice));
    }
    prev = slice;
    RbgRange range;
    range.first = r.u16();
    range.last = r.u16();
    a.slice_allocation.ranges.emplace(slice, range);
  }
  auto np = r.u16();
  for (std::uint16_t i = 0; i < np; ++i) a.slice_scheduling_policy.push_back(read_policy(r));
  return a;
}

struct PayloadWriter {
  Writer& w;

  void operator()(const E2SetupRequest& m) {
    w.str(m.node);
    w.count(m.ran_functions.size(), "ran function list");
    for (auto f : m.ran_functions) w.u16(f);
  }
  void operator()(const E2SetupResponse& m) { w.boolean(m.accepted); }
  void operator()(const RicSubscriptionRequest& m) {
    write_request_id(w, m.request_id);
    w.str(m.node);
    w.u32(m.report_period_ms);
  }
  void operator()(const RicSubscriptionResponse& m) {
    write_request_id(w, m.request_id);
    w.boolean(m.accepted);
  }
  void operator()(const RicIndication& m) {
    write_request_id(w, m.request_id);
    w.str(m.node);
    w.u64(m.timestamp_ms);
    w.count(m.records.size(), "record list");
    for (const auto& k : m.records) write_record(w, k);
  }
  void operator()(const RicControlRequest& m) {
    write_request_id(w, m.request_id);
    w.str(m.node);
    write_action(w, m.action);
  }
  void operator()(const RicControlAck& m) {
    write_request_id(w, m.request_id);
    w.u8(static_cast<std::uint8_t>(m.status));
    w.u8(static_cast<std::uint8_t>(m.reason_code));
  }
};

E2Message read_payload(MessageType type, Reader& r) {
  switch (type) {
    case MessageType::E2SetupRequest: {
      E2SetupRequest m;
      m.node = r.str();
      auto n = r.u16();
      for (std::uint16_t i = 0; i < n; ++i) m.ran_functions.push_back(r.u16());
      return m;
    }
    case MessageType::E2SetupResponse:
      return E2SetupResponse{r.boolean()};
    case MessageType::RicSubscriptionRequest: {
      RicSubscriptionRequest m;
      m.request_id = read_request_id(r);
      m.node = r.str();
      m.report_period_ms = r.u32();
      return m;
    }
    case MessageType::RicSubscriptionResponse: {
      RicSubscriptionResponse m;
      m.request_id = read_request_id(r);
      m.accepted = r.boolean();
      return m;
    }
    case MessageType::RicIndication: {
      RicIndication m;
      m.request_id = read_request_id(r);
      m.node = r.str();
      m.timestamp_ms = r.u64();
      auto n = r.u16();
      for (std::uint16_t i = 0; i < n; ++i) m.records.push_back(read_record(r));
      return m;
    }
    case MessageType::RicControlRequest: {
      RicControlRequest m;
      m.request_id = read_request_id(r);
      m.node = r.str();
      m.action = read_action(r);
      return m;
    }
    case MessageType::RicControlAck: {
      RicControlAck m;
      m.request_id = read_request_id(r);
      auto status = r.u8();
      if (status > 1) throw DecodeError(Kind::InvalidValue, fmt::format("control status {}", status));
      m.status = static_cast<ControlStatus>(status);
      auto reason = r.u8();
      if (reason > static_cast<std::uint8_t>(RejectReason::NodeUnknown)) {
        throw DecodeError(Kind::InvalidValue, fmt::format("reason code {}", reason));
      }
      m.reason_code = static_cast<RejectReason>(reason);
      return m;
    }
  }
  throw DecodeError(Kind::UnknownType, fmt::format("message type {}", static_cast<int>(type)));
}

}  // namespace

const char* message_name(MessageType t) {
  switch (t) {
    case MessageType::E2SetupRequest: return "E2SetupRequest";
    case MessageType::E2SetupResponse: return "E2SetupResponse";
    case MessageType::RicSubscriptionRequest: return "RicSubscriptionRequest";
    case MessageType::RicSubscriptionResponse: return "RicSubscriptionResponse";
    case MessageType::RicIndication: return "RicIndication";
    case MessageType::RicControlRequest: return "RicControlRequest";
    case MessageType::RicControlAck: return "RicControlAck";
  }
  return "Unknown";
}

const char* decode_error_name(DecodeError::Kind k) {
  switch (k) {
    case Kind::Truncated: return "Truncated";
    case Kind::UnknownType: return "UnknownType";
    case Kind::TrailingBytes: return "TrailingBytes";
    case Kind::LengthOverflow: return "LengthOverflow";
    case Kind::InvalidValue: return "InvalidValue";
  }
  return "Unknown";
}

std::vector<std::uint8_t> Frame::bytes() const {
  const auto length = payload.size() + 1;
  if (length > kMaxFrameLength) {
    throw EncodeError(fmt::format("frame length {} exceeds {}", length, kMaxFrameLength));
  }
  Writer w;
  w.u32(static_cast<std::uint32_t>(length));
  w.u8(type);
  auto out = w.take();
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Frame to_frame(const E2Message& m) {
  Writer w;
  std::visit(PayloadWriter{w}, m);
  Frame f{static_cast<std::uint8_t>(type_of(m)), w.take()};
  if (f.payload.size() + 1 > kMaxFrameLength) {
    throw EncodeError(fmt::format("{} payload of {} bytes exceeds the frame cap",
                                  message_name(type_of(m)), f.payload.size()));
  }
  return f;
}

E2Message from_frame(const Frame& f) {
  if (f.type < 1 || f.type > 7) {
    throw DecodeError(Kind::UnknownType, fmt::format("message type {}", f.type));
  }
  Reader r(f.payload);
  auto m = read_payload(static_cast<MessageType>(f.type), r);
  r.finish();
  return m;
}

std::vector<std::uint8_t> encode(const E2Message& m) { return to_frame(m).bytes(); }

E2Message decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFrameHeaderSize) {
    throw DecodeError(Kind::Truncated, fmt::format("{} bytes, header needs 4", bytes.size()));
  }
  std::uint32_t length = (std::uint32_t{bytes[0]} << 24) | (std::uint32_t{bytes[1]} << 16) |
                         (std::uint32_t{bytes[2]} << 8) | std::uint32_t{bytes[3]};
  if (length > kMaxFrameLength) {
    throw DecodeError(Kind::LengthOverflow, fmt::format("declared length {} exceeds {}", length,
                                                        kMaxFrameLength));
  }
  if (length == 0) throw DecodeError(Kind::Truncated, "frame has no type byte");
  const auto available = bytes.size() - kFrameHeaderSize;
  if (available < length) {
    throw DecodeError(Kind::Truncated,
                      fmt::format("declared length {} with {} bytes available", length, available));
  }
  if (available > length) {
    throw DecodeError(Kind::TrailingBytes,
                      fmt::format("{} bytes after the frame", available - length));
  }
  Frame f;
  f.type = bytes[kFrameHeaderSize];
  f.payload.assign(bytes.begin() + kFrameHeaderSize + 1, bytes.end());
  return from_frame(f);
}

}  // namespace orgym::e2
