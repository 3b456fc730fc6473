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

#ifndef MIXMINE_TRANSPORT_HPP
#define MIXMINE_TRANSPORT_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mixmine/securesum.hpp"

namespace mixmine {

using EntityId = unsigned;
constexpr EntityId kMixerId = 0;  // sites are 1..N

/// Every transport frames payloads with a 4-byte big-endian length prefix;
/// byte counters include it.
constexpr std::size_t kLengthPrefixTotal = 4;

/// Per-round traffic split: inner protocol payload (entry bytes only,
/// before channel encryption), frame headers, and gross on-the-wire bytes
/// after sealing. The split is recorded by the session layer, which is the
/// only place that sees both the inner frame and the sealed blob.
struct RoundTraffic {
  u64 upload_entries = 0;  // H, entries carried per upload this round
  u64 upload_payload_bytes = 0;
  u64 upload_header_bytes = 0;
  u64 upload_gross_bytes = 0;
  u64 upload_messages = 0;
  u64 broadcast_entries = 0;
  u64 broadcast_payload_bytes = 0;
  u64 broadcast_header_bytes = 0;
  u64 broadcast_gross_bytes = 0;
  u64 broadcast_messages = 0;

  bool operator==(const RoundTraffic&) const = default;
};

struct ChannelMetrics {
  std::map<std::uint32_t, RoundTraffic> rounds;
  // transport-level totals: every frame written, including the 4-byte
  // length prefix
  u64 site_to_mixer_bytes = 0;
  u64 mixer_to_sites_bytes = 0;
  u64 site_to_mixer_messages = 0;
  u64 mixer_to_sites_messages = 0;

  bool operator==(const ChannelMetrics&) const = default;
};

/// Shared counter sink. Transports report raw sends; the session layer
/// reports the per-round payload split.
class MetricsRecorder {
 public:
  void record_send(EntityId from, EntityId to, std::size_t frame_bytes);
  void record_upload_frame(std::uint32_t round, u64 entries,
                           std::size_t payload_bytes,
                           std::size_t header_bytes,
                           std::size_t gross_bytes);
  void record_broadcast_frame(std::uint32_t round, u64 entries,
                              std::size_t payload_bytes,
                              std::size_t header_bytes,
                              std::size_t gross_bytes);
  ChannelMetrics snapshot() const;
  void reset();

 private:
  mutable std::mutex mu_;
  ChannelMetrics metrics_;
};

/// One endpoint of the star topology. Sends are framed with a 4-byte
/// big-endian length prefix; receipt order is FIFO per (sender, receiver)
/// pair.
class Endpoint {
 public:
  virtual ~Endpoint() = default;

  virtual void send(EntityId destination, std::span<const std::uint8_t> frame) = 0;
  /// Blocking receive. Throws Closed when no more data can arrive, Timeout
  /// when the configured deadline passes.
  virtual std::pair<EntityId, std::vector<std::uint8_t>> recv() = 0;
  /// Non-blocking receive.
  virtual std::optional<std::pair<EntityId, std::vector<std::uint8_t>>>
  try_recv() = 0;
  virtual void close() = 0;
};

/// Deterministic in-process message bus. Delivery preserves global
/// enqueue order per receiver (hence per-pair FIFO). Thread-safe.
class InProcBus {
 public:
  explicit InProcBus(MetricsRecorder* metrics = nullptr,
                     int recv_timeout_ms = 30000);
  ~InProcBus();

  std::unique_ptr<Endpoint> attach(EntityId id);

  struct State;

 private:
  std::shared_ptr<State> state_;
};

/// TCP star: the mixer listens, each site connects and identifies itself
/// with a 2-byte hello (session setup, excluded from protocol counters).
/// One connection per site, [u32 length][frame] framing on top of it.
class TcpMixerEndpoint;

/// Binds and listens; accept_sites() blocks until all N sites are
/// connected and identified.
class TcpListener {
 public:
  TcpListener(std::uint16_t port, unsigned site_count,
              MetricsRecorder* metrics = nullptr);
  ~TcpListener();

  std::unique_ptr<Endpoint> accept_sites();
  std::uint16_t port() const { return port_; }

 private:
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  unsigned site_count_ = 0;
  MetricsRecorder* metrics_ = nullptr;
};

/// Connects a site to the mixer. Retries briefly while the listener
/// comes up.
std::unique_ptr<Endpoint> tcp_connect(const std::string& host,
                                      std::uint16_t port, EntityId site_id,
                                      MetricsRecorder* metrics = nullptr,
                                      int timeout_ms = 30000);

}  // namespace mixmine

#endif  // MIXMINE_TRANSPORT_HPP
