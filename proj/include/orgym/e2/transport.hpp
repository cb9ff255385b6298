#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>

namespace orgym::e2 {

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConnectionRefused : public TransportError {
 public:
  using TransportError::TransportError;
};

/// Reliable, ordered, bidirectional byte stream.
class ByteStream {
 public:
  virtual ~ByteStream() = default;

  /// Blocks until at least one byte is available; returns 0 at end-of-stream.
  virtual std::size_t read_some(std::span<std::uint8_t> buf) = 0;
  /// Throws TransportError if the peer is gone.
  virtual void write_all(std::span<const std::uint8_t> data) = 0;
  /// Shuts down both directions; unblocks pending reads on either side.
  virtual void close() = 0;
};

class Listener {
 public:
  virtual ~Listener() = default;

  /// Blocks for the next connection; nullptr once the listener is closed.
  virtual std::unique_ptr<ByteStream> accept() = 0;
  virtual void close() = 0;
  /// Address peers pass to connect_to(), with the bound port filled in.
  virtual std::string endpoint() const = 0;
};

/// Endpoints are `host:port` for TCP or `inproc://<name>` for the in-memory
/// transport. Port 0 binds an ephemeral port.
std::unique_ptr<Listener> listen_on(const std::string& endpoint);
std::unique_ptr<ByteStream> connect_to(const std::string& endpoint);

}  // namespace orgym::e2
