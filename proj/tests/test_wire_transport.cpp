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

#include <random>
#include <thread>

#include "doctest.h"
#include "mixmine/channel.hpp"
#include "mixmine/transport.hpp"
#include "mixmine/wire.hpp"

using namespace mixmine;

TEST_CASE("wire layout matches the documented frame") {
  UploadMasked up{0x01020304, 0x0506, {0xAABB}};
  const auto frame = encode_frame(up, 16);
  REQUIRE(frame.size() == kFrameHeaderBytes + 2);
  CHECK(frame[0] == 1);                          // variant
  CHECK(frame[1] == 0x01);                       // round, big-endian
  CHECK(frame[4] == 0x04);
  CHECK(frame[5] == 0x05);                       // site index
  CHECK(frame[6] == 0x06);
  CHECK(frame[10] == 0x01);                      // vector length 1
  CHECK(frame[11] == 0xAA);                      // alpha, 2 bytes
  CHECK(frame[12] == 0xBB);
}

TEST_CASE("wire round trip across message kinds and widths") {
  std::mt19937_64 rng(8);
  for (unsigned l : {8u, 12u, 16u, 24u, 32u}) {
    const unsigned aw = alpha_width_bytes(l);
    for (int trial = 0; trial < 100; ++trial) {
      UploadMasked up;
      up.round = static_cast<std::uint32_t>(rng());
      up.site_index = static_cast<std::uint16_t>(rng());
      for (int j = 0; j < 5; ++j)
        up.alphas.push_back(rng() & ((1ull << (8 * aw)) - 1));
      const ProtocolMessage decoded = decode_frame(encode_frame(up, l), l);
      CHECK(std::get<UploadMasked>(decoded) == up);

      BroadcastAggregate bc;
      bc.round = static_cast<std::uint32_t>(rng());
      for (int j = 0; j < 5; ++j)
        bc.epsilons.push_back(
            static_cast<u128>(rng()) & ((static_cast<u128>(1) << (16 * aw)) - 1));
      const ProtocolMessage decoded_bc = decode_frame(encode_frame(bc, l), l);
      CHECK(std::get<BroadcastAggregate>(decoded_bc) == bc);
    }
  }
  const Terminate term{7, 3};
  CHECK(std::get<Terminate>(decode_frame(encode_frame(term, 16), 16)) == term);
}

TEST_CASE("wire rejects out-of-width entries and malformed frames") {
  UploadMasked up{0, 1, {0x10000}};  // needs 3 bytes, l=16 gives 2
  try {
    encode_frame(up, 16);
    FAIL("expected WireOverflow");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::WireOverflow);
  }
  std::vector<std::uint8_t> junk{9, 0, 0};
  CHECK_THROWS_AS(decode_frame(junk, 16), Error);
  auto frame = encode_frame(UploadMasked{0, 1, {5}}, 16);
  frame.pop_back();
  CHECK_THROWS_AS(decode_frame(frame, 16), Error);
}

TEST_CASE("bus delivers in order and counts bytes") {
  MetricsRecorder rec;
  InProcBus bus(&rec);
  auto site = bus.attach(1);
  auto mixer = bus.attach(kMixerId);

  const std::vector<std::uint8_t> ten(10, 0xEE);
  site->send(kMixerId, ten);
  const std::vector<std::uint8_t> two{1, 2};
  site->send(kMixerId, two);

  auto [src1, f1] = mixer->recv();
  CHECK(src1 == 1);
  CHECK(f1 == ten);
  auto [src2, f2] = mixer->recv();
  CHECK(f2 == two);

  const ChannelMetrics m = rec.snapshot();
  CHECK(m.site_to_mixer_bytes == (10 + 4) + (2 + 4));
  CHECK(m.site_to_mixer_messages == 2);
  CHECK(m.mixer_to_sites_bytes == 0);
}

TEST_CASE("bus close semantics") {
  InProcBus bus;
  auto a = bus.attach(1);
  auto b = bus.attach(kMixerId);
  b->close();
  try {
    a->send(kMixerId, std::vector<std::uint8_t>{1});
    FAIL("expected Closed");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Closed);
  }
  try {
    b->recv();
    FAIL("expected Closed");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Closed);
  }
}

TEST_CASE("fresh recorder snapshots to zero") {
  MetricsRecorder rec;
  const ChannelMetrics m = rec.snapshot();
  CHECK(m.site_to_mixer_bytes == 0);
  CHECK(m.mixer_to_sites_bytes == 0);
  CHECK(m.rounds.empty());
}

TEST_CASE("recorder arithmetic matches a recording double") {
  // shadow ledger: every record call mirrored by plain arithmetic
  MetricsRecorder rec;
  u64 shadow_upload_payload = 0, shadow_headers = 0, shadow_gross = 0;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const u64 entries = rng() % 20;
    const std::size_t payload = entries * 2;
    rec.record_upload_frame(1, entries, payload, 15, payload + 11 + 24 + 4);
    shadow_upload_payload += payload;
    shadow_headers += 15;
    shadow_gross += payload + 11 + 24 + 4;
  }
  const RoundTraffic rt = rec.snapshot().rounds.at(1);
  CHECK(rt.upload_payload_bytes == shadow_upload_payload);
  CHECK(rt.upload_header_bytes == shadow_headers);
  CHECK(rt.upload_gross_bytes == shadow_gross);
  CHECK(rt.upload_messages == 50);
}

TEST_CASE("tcp loopback echo with metrics") {
  MetricsRecorder rec;
  TcpListener listener(0, 3, &rec);
  const std::uint16_t port = listener.port();

  std::thread mixer_thread([&] {
    auto ep = listener.accept_sites();
    for (int i = 0; i < 3; ++i) {
      auto [src, frame] = ep->recv();
      frame.push_back(static_cast<std::uint8_t>(src));
      ep->send(src, frame);
    }
    ep->close();
  });

  std::vector<std::thread> site_threads;
  for (EntityId site = 1; site <= 3; ++site) {
    site_threads.emplace_back([&, site] {
      auto ep = tcp_connect("127.0.0.1", port, site, &rec);
      std::vector<std::uint8_t> payload{static_cast<std::uint8_t>(site), 42};
      ep->send(kMixerId, payload);
      auto [src, reply] = ep->recv();
      CHECK(src == kMixerId);
      REQUIRE(reply.size() == 3);
      CHECK(reply[2] == site);
      ep->close();
    });
  }
  for (auto& t : site_threads) t.join();
  mixer_thread.join();

  const ChannelMetrics m = rec.snapshot();
  CHECK(m.site_to_mixer_messages == 3);
  CHECK(m.mixer_to_sites_messages == 3);
  CHECK(m.site_to_mixer_bytes == 3 * (2 + 4));
  CHECK(m.mixer_to_sites_bytes == 3 * (3 + 4));
}

namespace {
std::vector<std::uint8_t> demo_secret() {
  return {'t', 'e', 's', 't'};
}
}  // namespace

TEST_CASE("secure channel seals and opens") {
  const auto key = derive_channel_key(demo_secret(), 1);
  SecureChannel sender(key);
  SecureChannel receiver(key);

  const std::vector<std::uint8_t> inner{1, 2, 3, 4, 5};
  const auto sealed = sender.seal(inner);
  CHECK(sealed.size() == inner.size() + SecureChannel::kOverheadBytes);
  CHECK(receiver.open(sealed) == inner);

  SUBCASE("replayed frame rejected") {
    try {
      receiver.open(sealed);
      FAIL("expected ReplayRejected");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ReplayRejected);
    }
  }
  SUBCASE("tampered ciphertext rejected") {
    auto second = sender.seal(inner);
    second[10] ^= 0x01;
    try {
      receiver.open(second);
      FAIL("expected AuthFailure");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::AuthFailure);
    }
  }
  SUBCASE("wrong key rejected") {
    SecureChannel other(derive_channel_key(demo_secret(), 2));
    auto second = sender.seal(inner);
    try {
      other.open(second);
      FAIL("expected replay or auth failure");
    } catch (const Error& e) {
      CHECK((e.code() == Errc::AuthFailure || e.code() == Errc::ReplayRejected));
    }
  }
}
