#pragma once

#include <memory>
#include <mutex>
#include <stdexcept>

#include "orgym/e2/codec.hpp"
#include "orgym/e2/transport.hpp"

namespace orgym::e2 {

/// Clean end-of-stream at a frame boundary.
class ConnectionClosed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// End-of-stream inside a frame, or a declared length above the cap.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Blocks until one whole frame is read. The length cap is enforced before
/// any payload is buffered.
Frame read_frame(ByteStream& stream);
void write_frame(ByteStream& stream, const Frame& frame);

/// A framed E2 connection. One reader at a time; writers are serialized
/// internally so frames never interleave.
class Connection {
 public:
  explicit Connection(std::unique_ptr<ByteStream> stream) : stream_(std::move(stream)) {}

  Frame receive_frame() { return read_frame(*stream_); }
  E2Message receive() { return from_frame(receive_frame()); }

  void send(const E2Message& m) { send_bytes(encode(m)); }
  /// Sends an already-encoded frame verbatim.
  void send_bytes(std::span<const std::uint8_t> bytes);

  void close() { stream_->close(); }

 private:
  std::unique_ptr<ByteStream> stream_;
  std::mutex write_mu_;
};

}  // namespace orgym::e2
