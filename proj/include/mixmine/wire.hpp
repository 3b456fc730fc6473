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

#ifndef MIXMINE_WIRE_HPP
#define MIXMINE_WIRE_HPP

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "mixmine/securesum.hpp"

namespace mixmine {

// Inner frame layout (before channel encryption), all integers big-endian:
//   [u8 variant][u32 round][u16 site_index][u32 vector_length][entries]
// Alpha entries are ceil(l/8) bytes wide, epsilon entries twice that.

enum class FrameType : std::uint8_t {
  UploadMasked = 1,
  BroadcastAggregate = 2,
  Terminate = 3,
};

constexpr std::size_t kFrameHeaderBytes = 1 + 4 + 2 + 4;
constexpr std::size_t kLengthPrefixBytes = 4;

struct UploadMasked {
  std::uint32_t round = 0;
  std::uint16_t site_index = 0;
  std::vector<u64> alphas;

  bool operator==(const UploadMasked&) const = default;
};

struct BroadcastAggregate {
  std::uint32_t round = 0;
  std::vector<u128> epsilons;

  bool operator==(const BroadcastAggregate&) const = default;
};

struct Terminate {
  std::uint32_t round = 0;
  std::uint16_t site_index = 0;

  bool operator==(const Terminate&) const = default;
};

using ProtocolMessage = std::variant<UploadMasked, BroadcastAggregate, Terminate>;

constexpr unsigned alpha_width_bytes(unsigned bit_length) {
  return (bit_length + 7) / 8;
}

constexpr unsigned epsilon_width_bytes(unsigned bit_length) {
  return 2 * alpha_width_bytes(bit_length);
}

/// Serializes one message. Throws WireOverflow when an entry does not fit
/// its fixed width.
std::vector<std::uint8_t> encode_frame(const ProtocolMessage& msg,
                                       unsigned bit_length);

/// Parses one inner frame. Throws MalformedFrame on any inconsistency.
ProtocolMessage decode_frame(std::span<const std::uint8_t> frame,
                             unsigned bit_length);

}  // namespace mixmine

#endif  // MIXMINE_WIRE_HPP
