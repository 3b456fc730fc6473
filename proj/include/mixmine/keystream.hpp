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

#ifndef MIXMINE_KEYSTREAM_HPP
#define MIXMINE_KEYSTREAM_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mixmine/securesum.hpp"

namespace mixmine {

/// The shared secret seed mu. Never leaves the process that holds it; the
/// mixer is never given one.
struct Seed {
  std::vector<std::uint8_t> bytes;

  static Seed from_hex(std::string_view hex);
  std::string to_hex() const;
};

/// Default seed width: 80 bits.
constexpr std::size_t kDefaultSeedBytes = 10;

/// Slicing layout of one key-schedule chunk: l bits for r followed by one
/// l-bit field per site, l*(1+N) bits in total.
struct KeyScheduleConfig {
  unsigned bit_length = 0;
  unsigned site_count = 0;

  unsigned chunk_bits() const { return bit_length * (1 + site_count); }
};

/// Deterministic shared bit stream. Single consumer: draws advance the
/// stream position and never overlap. Implementations produce the raw
/// stream; position bookkeeping lives here.
class StreamGenerator {
 public:
  virtual ~StreamGenerator() = default;

  /// Next `nbits` of the stream, packed MSB-first into ceil(nbits/8) bytes
  /// (the final byte is zero-padded on the right).
  std::vector<std::uint8_t> next_bits(std::size_t nbits);

  /// Next `nbits` (<= 64) as a big-endian unsigned integer.
  u64 next_uint(unsigned nbits);

  std::uint64_t bit_position() const { return bit_pos_; }

  /// Number of iteration-key slots already derived from this stream.
  u64 rounds_derived() const { return rounds_derived_; }

 protected:
  /// Produce the next `out.size()` raw stream bytes, in order.
  virtual void generate(std::span<std::uint8_t> out) = 0;

 private:
  friend IterationKeys derive_iteration_keys(StreamGenerator&, u64,
                                             const KeyScheduleConfig&,
                                             const GroupParams&);
  void ensure_bits(std::size_t nbits);

  std::vector<std::uint8_t> buffer_;
  std::uint64_t bit_pos_ = 0;       // absolute position in the stream
  std::uint64_t buffer_start_ = 0;  // absolute bit index of buffer_[0]
  u64 rounds_derived_ = 0;
};

/// Reference generator: AES-128 in output feedback mode, keyed by the seed
/// (zero-padded to 16 bytes), zero IV, encrypting the constant repeated
/// indefinitely. Identical (seed, constant) pairs give identical streams.
class AesOfbGenerator final : public StreamGenerator {
 public:
  static constexpr const char* kGeneratorId = "aes128-ofb";

  /// Throws BadSeedLength unless 1 <= seed size <= 16 bytes.
  AesOfbGenerator(const Seed& seed, std::span<const std::uint8_t> constant);
  ~AesOfbGenerator() override;

  AesOfbGenerator(const AesOfbGenerator&) = delete;
  AesOfbGenerator& operator=(const AesOfbGenerator&) = delete;

 protected:
  void generate(std::span<std::uint8_t> out) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Test/fixture generator replaying a fixed byte string. Throws Closed when
/// the bytes run out.
class FixedStreamGenerator final : public StreamGenerator {
 public:
  explicit FixedStreamGenerator(std::vector<std::uint8_t> bytes)
      : bytes_(std::move(bytes)) {}

 protected:
  void generate(std::span<std::uint8_t> out) override;

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::unique_ptr<StreamGenerator> init_generator(
    const Seed& seed, std::span<const std::uint8_t> constant);

/// Minimal big-endian encoding of the modulus, used as the stream-cipher
/// plaintext constant.
std::vector<std::uint8_t> encode_modulus(u64 modulus);

/// One chunk of chunk_bits bits, packed MSB-first.
std::vector<std::uint8_t> next_chunk(StreamGenerator& gen,
                                     const KeyScheduleConfig& config);

/// Parses the next chunk into IterationKeys: bits [0,l) give r, bits
/// [l*i, l*(i+1)) give n_i, each reduced mod rho. A chunk whose reduced r
/// is zero is discarded whole and the next chunk drawn. Rounds must be
/// derived in increasing order starting at 0.
IterationKeys derive_iteration_keys(StreamGenerator& gen, u64 round,
                                    const KeyScheduleConfig& config,
                                    const GroupParams& params);

}  // namespace mixmine

#endif  // MIXMINE_KEYSTREAM_HPP
