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

#include "mixmine/wire.hpp"

#include <string>

namespace mixmine {

namespace {

void put_be(std::vector<std::uint8_t>& out, u128 value, unsigned width) {
  if (width < 16 && (value >> (8 * width)) != 0)
    raise(Errc::WireOverflow, "entry does not fit in " +
                                  std::to_string(width) + " wire bytes");
  for (unsigned i = 0; i < width; ++i)
    out.push_back(static_cast<std::uint8_t>(value >> (8 * (width - 1 - i))));
}

u128 get_be(std::span<const std::uint8_t> in, std::size_t offset,
            unsigned width) {
  u128 v = 0;
  for (unsigned i = 0; i < width; ++i) v = (v << 8) | in[offset + i];
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_frame(const ProtocolMessage& msg,
                                       unsigned bit_length) {
  std::vector<std::uint8_t> out;
  const unsigned aw = alpha_width_bytes(bit_length);
  const unsigned ew = epsilon_width_bytes(bit_length);

  auto header = [&out](FrameType type, std::uint32_t round,
                       std::uint16_t site, std::uint32_t length) {
    out.push_back(static_cast<std::uint8_t>(type));
    put_be(out, round, 4);
    put_be(out, site, 2);
    put_be(out, length, 4);
  };

  if (const auto* up = std::get_if<UploadMasked>(&msg)) {
    header(FrameType::UploadMasked, up->round, up->site_index,
           static_cast<std::uint32_t>(up->alphas.size()));
    for (u64 a : up->alphas) put_be(out, a, aw);
  } else if (const auto* bc = std::get_if<BroadcastAggregate>(&msg)) {
    header(FrameType::BroadcastAggregate, bc->round, 0,
           static_cast<std::uint32_t>(bc->epsilons.size()));
    for (u128 e : bc->epsilons) put_be(out, e, ew);
  } else {
    const auto& term = std::get<Terminate>(msg);
    header(FrameType::Terminate, term.round, term.site_index, 0);
  }
  return out;
}

ProtocolMessage decode_frame(std::span<const std::uint8_t> frame,
                             unsigned bit_length) {
  if (frame.size() < kFrameHeaderBytes)
    raise(Errc::MalformedFrame, "frame shorter than header");
  const auto type = static_cast<FrameType>(frame[0]);
  const auto round = static_cast<std::uint32_t>(get_be(frame, 1, 4));
  const auto site = static_cast<std::uint16_t>(get_be(frame, 5, 2));
  const auto length = static_cast<std::uint32_t>(get_be(frame, 7, 4));
  const unsigned aw = alpha_width_bytes(bit_length);
  const unsigned ew = epsilon_width_bytes(bit_length);

  switch (type) {
    case FrameType::UploadMasked: {
      if (frame.size() != kFrameHeaderBytes + std::size_t{length} * aw)
        raise(Errc::MalformedFrame, "upload length mismatch");
      UploadMasked up{round, site, {}};
      up.alphas.reserve(length);
      for (std::uint32_t j = 0; j < length; ++j)
        up.alphas.push_back(
            static_cast<u64>(get_be(frame, kFrameHeaderBytes + j * aw, aw)));
      return up;
    }
    case FrameType::BroadcastAggregate: {
      if (frame.size() != kFrameHeaderBytes + std::size_t{length} * ew)
        raise(Errc::MalformedFrame, "broadcast length mismatch");
      BroadcastAggregate bc{round, {}};
      bc.epsilons.reserve(length);
      for (std::uint32_t j = 0; j < length; ++j)
        bc.epsilons.push_back(get_be(frame, kFrameHeaderBytes + j * ew, ew));
      return bc;
    }
    case FrameType::Terminate: {
      if (length != 0 || frame.size() != kFrameHeaderBytes)
        raise(Errc::MalformedFrame, "terminate frame must be empty");
      return Terminate{round, site};
    }
  }
  raise(Errc::MalformedFrame, "unknown frame type " +
                                  std::to_string(frame[0]));
}

}  // namespace mixmine
