/*
 * Copyright (c) 2026 the mixmine authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "mixmine/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <thread>

namespace mixmine {

void MetricsRecorder::record_send(EntityId from, EntityId to,
                                  std::size_t frame_bytes) {
  std::lock_guard lock(mu_);
  const u64 total = frame_bytes + kLengthPrefixTotal;
  if (to == kMixerId) {
    metrics_.site_to_mixer_bytes += total;
    metrics_.site_to_mixer_messages += 1;
  } else if (from == kMixerId) {
    metrics_.mixer_to_sites_bytes += total;
    metrics_.mixer_to_sites_messages += 1;
  }
}

void MetricsRecorder::record_upload_frame(std::uint32_t round, u64 entries,
                                          std::size_t payload_bytes,
                                          std::size_t header_bytes,
                                          std::size_t gross_bytes) {
  std::lock_guard lock(mu_);
  RoundTraffic& rt = metrics_.rounds[round];
  rt.upload_entries = entries;
  rt.upload_payload_bytes += payload_bytes;
  rt.upload_header_bytes += header_bytes;
  rt.upload_gross_bytes += gross_bytes;
  rt.upload_messages += 1;
}

void MetricsRecorder::record_broadcast_frame(std::uint32_t round, u64 entries,
                                             std::size_t payload_bytes,
                                             std::size_t header_bytes,
                                             std::size_t gross_bytes) {
  std::lock_guard lock(mu_);
  RoundTraffic& rt = metrics_.rounds[round];
  rt.broadcast_entries = entries;
  rt.broadcast_payload_bytes += payload_bytes;
  rt.broadcast_header_bytes += header_bytes;
  rt.broadcast_gross_bytes += gross_bytes;
  rt.broadcast_messages += 1;
}

ChannelMetrics MetricsRecorder::snapshot() const {
  std::lock_guard lock(mu_);
  return metrics_;
}

void MetricsRecorder::reset() {
  std::lock_guard lock(mu_);
  metrics_ = ChannelMetrics{};
}

// ---------------------------------------------------------------------------
// In-process bus

namespace {
constexpr int kRecvTimeoutMs = 30000;
}

struct InProcBus::State {
  struct Inbox {
    std::deque<std::pair<EntityId, std::vector<std::uint8_t>>> queue;
    bool closed = false;
  };
  std::mutex mu;
  std::condition_variable cv;
  std::map<EntityId, Inbox> inboxes;
  MetricsRecorder* metrics = nullptr;
  int recv_timeout_ms = kRecvTimeoutMs;
};

namespace {

class BusEndpoint final : public Endpoint {
 public:
  BusEndpoint(std::shared_ptr<InProcBus::State> state, EntityId id)
      : state_(std::move(state)), id_(id) {}

  ~BusEndpoint() override { close(); }

  void send(EntityId destination, std::span<const std::uint8_t> frame) override {
    {
      std::lock_guard lock(state_->mu);
      auto it = state_->inboxes.find(destination);
      if (it == state_->inboxes.end() || it->second.closed || closed_)
        raise(Errc::Closed, "endpoint closed");
      it->second.queue.emplace_back(
          id_, std::vector<std::uint8_t>(frame.begin(), frame.end()));
    }
    if (state_->metrics)
      state_->metrics->record_send(id_, destination, frame.size());
    state_->cv.notify_all();
  }

  std::pair<EntityId, std::vector<std::uint8_t>> recv() override {
    std::unique_lock lock(state_->mu);
    auto& inbox = state_->inboxes.at(id_);
    const bool got = state_->cv.wait_for(
        lock, std::chrono::milliseconds(state_->recv_timeout_ms),
        [&] { return !inbox.queue.empty() || inbox.closed || closed_; });
    if (!inbox.queue.empty()) {
      auto msg = std::move(inbox.queue.front());
      inbox.queue.pop_front();
      return msg;
    }
    if (closed_ || inbox.closed) raise(Errc::Closed, "endpoint closed");
    if (!got) raise(Errc::Timeout, "no message within deadline");
    raise(Errc::Timeout, "no message within deadline");
  }

  std::optional<std::pair<EntityId, std::vector<std::uint8_t>>> try_recv()
      override {
    std::lock_guard lock(state_->mu);
    auto& inbox = state_->inboxes.at(id_);
    if (inbox.queue.empty()) {
      if (closed_ || inbox.closed) raise(Errc::Closed, "endpoint closed");
      return std::nullopt;
    }
    auto msg = std::move(inbox.queue.front());
    inbox.queue.pop_front();
    return msg;
  }

  void close() override {
    {
      std::lock_guard lock(state_->mu);
      closed_ = true;
      auto it = state_->inboxes.find(id_);
      if (it != state_->inboxes.end()) it->second.closed = true;
    }
    state_->cv.notify_all();
  }

 private:
  std::shared_ptr<InProcBus::State> state_;
  EntityId id_;
  bool closed_ = false;
};

}  // namespace

InProcBus::InProcBus(MetricsRecorder* metrics, int recv_timeout_ms)
    : state_(std::make_shared<State>()) {
  state_->metrics = metrics;
  state_->recv_timeout_ms = recv_timeout_ms;
}

InProcBus::~InProcBus() = default;

std::unique_ptr<Endpoint> InProcBus::attach(EntityId id) {
  {
    std::lock_guard lock(state_->mu);
    state_->inboxes[id];  // create inbox
  }
  return std::make_unique<BusEndpoint>(state_, id);
}

// ---------------------------------------------------------------------------
// TCP

namespace {

void write_all(int fd, const std::uint8_t* data, std::size_t len) {
  while (len > 0) {
    const ssize_t n = ::write(fd, data, len);
    if (n < 0) {
      if (errno == EINTR) continue;
      raise(Errc::IoFailure, std::string("write: ") + std::strerror(errno));
    }
    data += n;
    len -= static_cast<std::size_t>(n);
  }
}

void read_exact(int fd, std::uint8_t* data, std::size_t len) {
  while (len > 0) {
    const ssize_t n = ::read(fd, data, len);
    if (n == 0) raise(Errc::Closed, "peer closed connection");
    if (n < 0) {
      if (errno == EINTR) continue;
      raise(Errc::IoFailure, std::string("read: ") + std::strerror(errno));
    }
    data += n;
    len -= static_cast<std::size_t>(n);
  }
}

// Reassembles [u32 length][frame] off one socket.
struct FramedConn {
  int fd = -1;
  EntityId peer = 0;
  std::vector<std::uint8_t> buf;

  // Pulls whatever is available without blocking; returns false on EOF.
  bool pump() {
    std::uint8_t tmp[4096];
    for (;;) {
      const ssize_t n = ::recv(fd, tmp, sizeof(tmp), MSG_DONTWAIT);
      if (n > 0) {
        buf.insert(buf.end(), tmp, tmp + n);
        if (static_cast<std::size_t>(n) < sizeof(tmp)) return true;
        continue;
      }
      if (n == 0) return false;
      if (errno == EAGAIN || errno == EWOULDBLOCK) return true;
      if (errno == EINTR) continue;
      raise(Errc::IoFailure, std::string("recv: ") + std::strerror(errno));
    }
  }

  std::optional<std::vector<std::uint8_t>> take_frame() {
    if (buf.size() < 4) return std::nullopt;
    const std::size_t len = (std::size_t{buf[0]} << 24) |
                            (std::size_t{buf[1]} << 16) |
                            (std::size_t{buf[2]} << 8) | std::size_t{buf[3]};
    if (buf.size() < 4 + len) return std::nullopt;
    std::vector<std::uint8_t> frame(buf.begin() + 4, buf.begin() + 4 + len);
    buf.erase(buf.begin(), buf.begin() + 4 + static_cast<std::ptrdiff_t>(len));
    return frame;
  }
};

void send_framed(int fd, std::span<const std::uint8_t> frame) {
  std::vector<std::uint8_t> out;
  out.reserve(4 + frame.size());
  const std::uint32_t len = static_cast<std::uint32_t>(frame.size());
  out.push_back(static_cast<std::uint8_t>(len >> 24));
  out.push_back(static_cast<std::uint8_t>(len >> 16));
  out.push_back(static_cast<std::uint8_t>(len >> 8));
  out.push_back(static_cast<std::uint8_t>(len));
  out.insert(out.end(), frame.begin(), frame.end());
  write_all(fd, out.data(), out.size());
}

class TcpEndpoint final : public Endpoint {
 public:
  TcpEndpoint(std::vector<FramedConn> conns, EntityId self,
              MetricsRecorder* metrics)
      : conns_(std::move(conns)), self_(self), metrics_(metrics) {}

  ~TcpEndpoint() override { close(); }

  void send(EntityId destination, std::span<const std::uint8_t> frame) override {
    FramedConn* conn = find(destination);
    if (!conn || conn->fd < 0) raise(Errc::Closed, "no open connection");
    send_framed(conn->fd, frame);
    if (metrics_) metrics_->record_send(self_, destination, frame.size());
  }

  std::pair<EntityId, std::vector<std::uint8_t>> recv() override {
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::milliseconds(kRecvTimeoutMs);
    for (;;) {
      if (auto msg = pop_ready()) return std::move(*msg);
      if (conns_.empty()) raise(Errc::Closed, "all connections closed");
      std::vector<pollfd> fds;
      fds.reserve(conns_.size());
      for (const FramedConn& c : conns_)
        fds.push_back(pollfd{c.fd, POLLIN, 0});
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) raise(Errc::Timeout, "no frame within deadline");
      const int rc = ::poll(fds.data(), fds.size(),
                            static_cast<int>(left.count()));
      if (rc < 0) {
        if (errno == EINTR) continue;
        raise(Errc::IoFailure, std::string("poll: ") + std::strerror(errno));
      }
      if (rc == 0) raise(Errc::Timeout, "no frame within deadline");
      pump_all();
    }
  }

  std::optional<std::pair<EntityId, std::vector<std::uint8_t>>> try_recv()
      override {
    pump_all();
    return pop_ready();
  }

  void close() override {
    for (FramedConn& c : conns_) {
      if (c.fd >= 0) {
        ::shutdown(c.fd, SHUT_RDWR);
        ::close(c.fd);
        c.fd = -1;
      }
    }
  }

 private:
  FramedConn* find(EntityId peer) {
    for (FramedConn& c : conns_)
      if (c.peer == peer) return &c;
    return nullptr;
  }

  void pump_all() {
    for (std::size_t i = 0; i < conns_.size();) {
      FramedConn& c = conns_[i];
      bool alive = true;
      if (c.fd >= 0) alive = c.pump();
      while (auto frame = c.take_frame())
        ready_.emplace_back(c.peer, std::move(*frame));
      if (!alive) {
        ::close(c.fd);
        conns_.erase(conns_.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        ++i;
      }
    }
  }

  std::optional<std::pair<EntityId, std::vector<std::uint8_t>>> pop_ready() {
    if (ready_.empty()) {
      if (conns_.empty()) raise(Errc::Closed, "all connections closed");
      return std::nullopt;
    }
    auto msg = std::move(ready_.front());
    ready_.pop_front();
    return msg;
  }

  std::vector<FramedConn> conns_;
  std::deque<std::pair<EntityId, std::vector<std::uint8_t>>> ready_;
  EntityId self_;
  MetricsRecorder* metrics_;
};

}  // namespace

TcpListener::TcpListener(std::uint16_t port, unsigned site_count,
                         MetricsRecorder* metrics)
    : site_count_(site_count), metrics_(metrics) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0)
    raise(Errc::IoFailure, std::string("socket: ") + std::strerror(errno));
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_ANY);
  addr.sin_port = htons(port);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0)
    raise(Errc::IoFailure, std::string("bind: ") + std::strerror(errno));
  if (::listen(listen_fd_, static_cast<int>(site_count) + 1) < 0)
    raise(Errc::IoFailure, std::string("listen: ") + std::strerror(errno));
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

std::unique_ptr<Endpoint> TcpListener::accept_sites() {
  std::vector<FramedConn> conns;
  for (unsigned i = 0; i < site_count_; ++i) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0)
      raise(Errc::IoFailure, std::string("accept: ") + std::strerror(errno));
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    std::uint8_t hello[2];
    read_exact(fd, hello, 2);
    const EntityId site = (EntityId{hello[0]} << 8) | hello[1];
    conns.push_back(FramedConn{fd, site, {}});
  }
  return std::make_unique<TcpEndpoint>(std::move(conns), kMixerId, metrics_);
}

std::unique_ptr<Endpoint> tcp_connect(const std::string& host,
                                      std::uint16_t port, EntityId site_id,
                                      MetricsRecorder* metrics,
                                      int timeout_ms) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
    raise(Errc::BadConfig, "mixer address must be an IPv4 literal: " + host);

  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::milliseconds(timeout_ms);
  int fd = -1;
  for (;;) {
    fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0)
      raise(Errc::IoFailure, std::string("socket: ") + std::strerror(errno));
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0)
      break;
    ::close(fd);
    if (std::chrono::steady_clock::now() >= deadline)
      raise(Errc::Timeout, "could not reach mixer at " + host + ":" +
                               std::to_string(port));
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  const std::uint8_t hello[2] = {static_cast<std::uint8_t>(site_id >> 8),
                                 static_cast<std::uint8_t>(site_id & 0xFF)};
  write_all(fd, hello, 2);
  std::vector<FramedConn> conns;
  conns.push_back(FramedConn{fd, kMixerId, {}});
  return std::make_unique<TcpEndpoint>(std::move(conns), site_id, metrics);
}

}  // namespace mixmine
