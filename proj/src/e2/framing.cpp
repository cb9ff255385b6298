#include "orgym/e2/framing.hpp"

#include <array>

#include <fmt/format.h>

namespace orgym::e2 {

namespace {

/// Reads exactly `out.size()` bytes; returns how many arrived before EOF.
std::size_t read_exact(ByteStream& stream, std::span<std::uint8_t> out) {
  std::size_t got = 0;
  while (got < out.size()) {
    auto n = stream.read_some(out.subspan(got));
    if (n == 0) break;
    got += n;
  }
  return got;
}

}  // namespace

Frame read_frame(ByteStream& stream) {
  std::array<std::uint8_t, 4> header{};
  auto got = read_exact(stream, header);
  if (got == 0) throw ConnectionClosed("peer closed the connection");
  if (got < header.size()) throw ProtocolError("connection closed inside a frame header");

  std::uint32_t length = (std::uint32_t{header[0]} << 24) | (std::uint32_t{header[1]} << 16) |
                         (std::uint32_t{header[2]} << 8) | std::uint32_t{header[3]};
  if (length > kMaxFrameLength) {
    throw ProtocolError(fmt::format("declared frame length {} exceeds {}", length, kMaxFrameLength));
  }
  if (length == 0) throw ProtocolError("zero-length frame");

  std::vector<std::uint8_t> body(length);
  if (read_exact(stream, body) < length) {
    throw ProtocolError("connection closed inside a frame");
  }
  Frame f;
  f.type = body[0];
  f.payload.assign(body.begin() + 1, body.end());
  return f;
}

void write_frame(ByteStream& stream, const Frame& frame) { stream.write_all(frame.bytes()); }

void Connection::send_bytes(std::span<const std::uint8_t> bytes) {
  std::lock_guard lock(write_mu_);
  stream_->write_all(bytes);
}

}  // namespace orgym::e2
