#include "orgym/e2/transport.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <map>
#include <mutex>

#include <fmt/format.h>

namespace orgym::e2 {

namespace {

constexpr std::string_view kInprocScheme = "inproc://";

// ---------------------------------------------------------------------------
// In-memory transport

struct Pipe {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::uint8_t> buf;
  bool closed = false;

  void shut() {
    {
      std::lock_guard lock(mu);
      closed = true;
    }
    cv.notify_all();
  }
};

class InprocStream final : public ByteStream {
 public:
  InprocStream(std::shared_ptr<Pipe> in, std::shared_ptr<Pipe> out)
      : in_(std::move(in)), out_(std::move(out)) {}
  ~InprocStream() override { close(); }

  std::size_t read_some(std::span<std::uint8_t> buf) override {
    std::unique_lock lock(in_->mu);
    in_->cv.wait(lock, [&] { return !in_->buf.empty() || in_->closed; });
    std::size_t n = std::min(buf.size(), in_->buf.size());
    std::copy_n(in_->buf.begin(), n, buf.begin());
    in_->buf.erase(in_->buf.begin(), in_->buf.begin() + static_cast<std::ptrdiff_t>(n));
    return n;
  }

  void write_all(std::span<const std::uint8_t> data) override {
    {
      std::lock_guard lock(out_->mu);
      if (out_->closed) throw TransportError("in-process peer closed");
      out_->buf.insert(out_->buf.end(), data.begin(), data.end());
    }
    out_->cv.notify_all();
  }

  void close() override {
    in_->shut();
    out_->shut();
  }

 private:
  std::shared_ptr<Pipe> in_;
  std::shared_ptr<Pipe> out_;
};

struct AcceptQueue {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::unique_ptr<ByteStream>> pending;
  bool closed = false;
};

std::mutex g_inproc_mu;
std::map<std::string, std::weak_ptr<AcceptQueue>> g_inproc;
std::atomic<std::uint64_t> g_inproc_counter{0};

class InprocListener final : public Listener {
 public:
  explicit InprocListener(std::string name) : name_(std::move(name)) {
    std::lock_guard lock(g_inproc_mu);
    auto& slot = g_inproc[name_];
    if (!slot.expired()) throw TransportError(fmt::format("{}{} already bound", kInprocScheme, name_));
    slot = queue_;
  }
  ~InprocListener() override { close(); }

  std::unique_ptr<ByteStream> accept() override {
    std::unique_lock lock(queue_->mu);
    queue_->cv.wait(lock, [&] { return !queue_->pending.empty() || queue_->closed; });
    if (queue_->closed) return nullptr;
    auto s = std::move(queue_->pending.front());
    queue_->pending.pop_front();
    return s;
  }

  void close() override {
    {
      std::lock_guard lock(g_inproc_mu);
      auto it = g_inproc.find(name_);
      if (it != g_inproc.end() && it->second.lock() == queue_) g_inproc.erase(it);
    }
    {
      std::lock_guard lock(queue_->mu);
      queue_->closed = true;
      queue_->pending.clear();
    }
    queue_->cv.notify_all();
  }

  std::string endpoint() const override { return std::string(kInprocScheme) + name_; }

 private:
  std::string name_;
  std::shared_ptr<AcceptQueue> queue_ = std::make_shared<AcceptQueue>();
};

std::unique_ptr<ByteStream> inproc_connect(const std::string& name) {
  std::shared_ptr<AcceptQueue> q;
  {
    std::lock_guard lock(g_inproc_mu);
    auto it = g_inproc.find(name);
    if (it != g_inproc.end()) q = it->second.lock();
  }
  if (!q) throw ConnectionRefused(fmt::format("nothing listening on {}{}", kInprocScheme, name));
  auto a = std::make_shared<Pipe>();
  auto b = std::make_shared<Pipe>();
  {
    std::lock_guard lock(q->mu);
    if (q->closed) throw ConnectionRefused(fmt::format("{}{} is closed", kInprocScheme, name));
    q->pending.push_back(std::make_unique<InprocStream>(a, b));
  }
  q->cv.notify_all();
  return std::make_unique<InprocStream>(b, a);
}

// ---------------------------------------------------------------------------
// TCP transport

std::pair<std::string, std::string> split_host_port(const std::string& endpoint) {
  auto pos = endpoint.rfind(':');
  if (pos == std::string::npos || pos + 1 == endpoint.size()) {
    throw TransportError(fmt::format("endpoint '{}' is not host:port", endpoint));
  }
  return {endpoint.substr(0, pos), endpoint.substr(pos + 1)};
}

std::string errno_text() { return std::strerror(errno); }

class TcpStream final : public ByteStream {
 public:
  explicit TcpStream(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }
  ~TcpStream() override {
    close();
    ::close(fd_);
  }

  std::size_t read_some(std::span<std::uint8_t> buf) override {
    while (true) {
      auto n = ::recv(fd_, buf.data(), buf.size(), 0);
      if (n >= 0) return static_cast<std::size_t>(n);
      if (errno == EINTR) continue;
      // A locally shut-down or reset socket reads as end-of-stream.
      return 0;
    }
  }

  void write_all(std::span<const std::uint8_t> data) override {
    std::size_t sent = 0;
    while (sent < data.size()) {
      auto n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw TransportError(fmt::format("send failed: {}", errno_text()));
      }
      sent += static_cast<std::size_t>(n);
    }
  }

  void close() override {
    if (!closed_.exchange(true)) ::shutdown(fd_, SHUT_RDWR);
  }

 private:
  int fd_;
  std::atomic<bool> closed_{false};
};

class TcpListener final : public Listener {
 public:
  TcpListener(const std::string& host, const std::string& port) : host_(host) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    if (int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &res); rc != 0) {
      throw TransportError(fmt::format("cannot resolve {}:{}: {}", host, port, ::gai_strerror(rc)));
    }
    fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    if (fd_ < 0) {
      ::freeaddrinfo(res);
      throw TransportError(fmt::format("socket: {}", errno_text()));
    }
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd_, res->ai_addr, res->ai_addrlen) != 0 || ::listen(fd_, 64) != 0) {
      auto msg = fmt::format("cannot listen on {}:{}: {}", host, port, errno_text());
      ::freeaddrinfo(res);
      ::close(fd_);
      throw TransportError(msg);
    }
    ::freeaddrinfo(res);
    sockaddr_in addr{};
    socklen_t len = sizeof(addr);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
  }
  ~TcpListener() override {
    close();
    ::close(fd_);
  }

  std::unique_ptr<ByteStream> accept() override {
    while (!closed_) {
      int fd = ::accept(fd_, nullptr, nullptr);
      if (fd >= 0) {
        if (closed_) {
          ::close(fd);
          break;
        }
        return std::make_unique<TcpStream>(fd);
      }
      if (errno != EINTR && errno != ECONNABORTED) break;
    }
    return nullptr;
  }

  void close() override {
    if (!closed_.exchange(true)) ::shutdown(fd_, SHUT_RDWR);
  }

  std::string endpoint() const override { return fmt::format("{}:{}", host_, port_); }

 private:
  std::string host_;
  int fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> closed_{false};
};

std::unique_ptr<ByteStream> tcp_connect(const std::string& endpoint) {
  auto [host, port] = split_host_port(endpoint);
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &res); rc != 0) {
    throw ConnectionRefused(fmt::format("cannot resolve {}: {}", endpoint, ::gai_strerror(rc)));
  }
  int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd < 0 || ::connect(fd, res->ai_addr, res->ai_addrlen) != 0) {
    auto msg = fmt::format("cannot connect to {}: {}", endpoint, errno_text());
    ::freeaddrinfo(res);
    if (fd >= 0) ::close(fd);
    throw ConnectionRefused(msg);
  }
  ::freeaddrinfo(res);
  return std::make_unique<TcpStream>(fd);
}

}  // namespace

std::unique_ptr<Listener> listen_on(const std::string& endpoint) {
  if (endpoint.starts_with(kInprocScheme)) {
    auto name = endpoint.substr(kInprocScheme.size());
    if (name.empty()) name = fmt::format("auto-{}", g_inproc_counter.fetch_add(1));
    return std::make_unique<InprocListener>(name);
  }
  auto [host, port] = split_host_port(endpoint);
  return std::make_unique<TcpListener>(host, port);
}

std::unique_ptr<ByteStream> connect_to(const std::string& endpoint) {
  if (endpoint.starts_with(kInprocScheme)) return inproc_connect(endpoint.substr(kInprocScheme.size()));
  return tcp_connect(endpoint);
}

}  // namespace orgym::e2
