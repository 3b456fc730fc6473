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

#ifndef MIXMINE_CHANNEL_HPP
#define MIXMINE_CHANNEL_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mixmine/error.hpp"

namespace mixmine {

/// Authenticated-confidential channel between one site and the mixer
/// (the paper's "private channel"): AES-256-GCM under a pre-shared key,
/// nonce bound to a strictly increasing sequence number. Frames are
/// [u64 sequence][ciphertext][16-byte tag]; the receiver insists on the
/// exact next sequence, so replayed or reordered frames are rejected.
class SecureChannel {
 public:
  static constexpr std::size_t kKeyBytes = 32;
  /// Sealing overhead per frame: 8-byte sequence + 16-byte tag.
  static constexpr std::size_t kOverheadBytes = 8 + 16;

  explicit SecureChannel(std::span<const std::uint8_t> key);

  std::vector<std::uint8_t> seal(std::span<const std::uint8_t> inner);

  /// Throws ReplayRejected on a stale/out-of-order sequence and
  /// AuthFailure when the tag does not verify.
  std::vector<std::uint8_t> open(std::span<const std::uint8_t> sealed);

 private:
  std::array<std::uint8_t, kKeyBytes> key_{};
  std::uint64_t send_seq_ = 0;
  std::uint64_t recv_seq_ = 0;
};

/// Per-site channel key, derived from the session's pre-shared channel
/// secret. Key provisioning itself is out of scope; this stands in for it.
std::array<std::uint8_t, SecureChannel::kKeyBytes> derive_channel_key(
    std::span<const std::uint8_t> channel_secret, unsigned site_index);

}  // namespace mixmine

#endif  // MIXMINE_CHANNEL_HPP
