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

#include "mixmine/keystream.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstring>
#include <stdexcept>

namespace mixmine {

namespace {

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Seed Seed::from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0)
    raise(Errc::BadSeedLength, "hex seed must have an even number of digits");
  Seed s;
  s.bytes.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = hex_nibble(hex[i]);
    int lo = hex_nibble(hex[i + 1]);
    if (hi < 0 || lo < 0)
      raise(Errc::BadSeedLength, "seed is not valid hex");
    s.bytes.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return s;
}

std::string Seed::to_hex() const {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xF]);
  }
  return out;
}

void StreamGenerator::ensure_bits(std::size_t nbits) {
  const std::uint64_t needed_end = bit_pos_ + nbits;
  std::uint64_t have_end = buffer_start_ + 8ull * buffer_.size();
  if (needed_end <= have_end) return;
  // drop fully consumed bytes first
  const std::size_t consumed_bytes =
      static_cast<std::size_t>((bit_pos_ - buffer_start_) / 8);
  if (consumed_bytes > 0) {
    buffer_.erase(buffer_.begin(),
                  buffer_.begin() + static_cast<std::ptrdiff_t>(consumed_bytes));
    buffer_start_ += 8ull * consumed_bytes;
    have_end = buffer_start_ + 8ull * buffer_.size();
  }
  const std::size_t missing_bytes =
      static_cast<std::size_t>((needed_end - have_end + 7) / 8);
  const std::size_t old_size = buffer_.size();
  buffer_.resize(old_size + missing_bytes);
  generate(std::span<std::uint8_t>(buffer_.data() + old_size, missing_bytes));
}

std::vector<std::uint8_t> StreamGenerator::next_bits(std::size_t nbits) {
  ensure_bits(nbits);
  std::vector<std::uint8_t> out((nbits + 7) / 8, 0);
  for (std::size_t i = 0; i < nbits; ++i) {
    const std::uint64_t abs = bit_pos_ + i;
    const std::size_t byte = static_cast<std::size_t>((abs - buffer_start_) / 8);
    const unsigned bit = 7 - static_cast<unsigned>(abs % 8);
    if ((buffer_[byte] >> bit) & 1) out[i / 8] |= (0x80u >> (i % 8));
  }
  bit_pos_ += nbits;
  return out;
}

u64 StreamGenerator::next_uint(unsigned nbits) {
  if (nbits > 64) throw std::logic_error("next_uint limited to 64 bits");
  ensure_bits(nbits);
  u64 v = 0;
  for (unsigned i = 0; i < nbits; ++i) {
    const std::uint64_t abs = bit_pos_ + i;
    const std::size_t byte = static_cast<std::size_t>((abs - buffer_start_) / 8);
    const unsigned bit = 7 - static_cast<unsigned>(abs % 8);
    v = (v << 1) | ((buffer_[byte] >> bit) & 1);
  }
  bit_pos_ += nbits;
  return v;
}

struct AesOfbGenerator::Impl {
  EVP_CIPHER_CTX* ctx = nullptr;
  std::vector<std::uint8_t> constant;
  std::size_t const_pos = 0;

  ~Impl() {
    if (ctx) EVP_CIPHER_CTX_free(ctx);
  }
};

AesOfbGenerator::AesOfbGenerator(const Seed& seed,
                                 std::span<const std::uint8_t> constant)
    : impl_(std::make_unique<Impl>()) {
  if (seed.bytes.empty() || seed.bytes.size() > 16)
    raise(Errc::BadSeedLength, "seed must be 1..16 bytes, got " +
                                   std::to_string(seed.bytes.size()));
  std::array<std::uint8_t, 16> key{};
  std::copy(seed.bytes.begin(), seed.bytes.end(), key.begin());
  std::array<std::uint8_t, 16> iv{};
  impl_->ctx = EVP_CIPHER_CTX_new();
  if (!impl_->ctx ||
      EVP_EncryptInit_ex(impl_->ctx, EVP_aes_128_ofb(), nullptr, key.data(),
                         iv.data()) != 1)
    raise(Errc::IoFailure, "AES-OFB context initialization failed");
  impl_->constant.assign(constant.begin(), constant.end());
  if (impl_->constant.empty()) impl_->constant.push_back(0);
}

AesOfbGenerator::~AesOfbGenerator() = default;

void AesOfbGenerator::generate(std::span<std::uint8_t> out) {
  // OFB plaintext: the constant cycled for as long as the stream runs.
  std::vector<std::uint8_t> plain(out.size());
  for (std::size_t i = 0; i < plain.size(); ++i) {
    plain[i] = impl_->constant[impl_->const_pos];
    impl_->const_pos = (impl_->const_pos + 1) % impl_->constant.size();
  }
  int outl = 0;
  if (EVP_EncryptUpdate(impl_->ctx, out.data(), &outl, plain.data(),
                        static_cast<int>(plain.size())) != 1 ||
      outl != static_cast<int>(out.size()))
    raise(Errc::IoFailure, "AES-OFB keystream generation failed");
}

void FixedStreamGenerator::generate(std::span<std::uint8_t> out) {
  if (pos_ + out.size() > bytes_.size())
    raise(Errc::Closed, "fixed stream exhausted");
  std::memcpy(out.data(), bytes_.data() + pos_, out.size());
  pos_ += out.size();
}

std::unique_ptr<StreamGenerator> init_generator(
    const Seed& seed, std::span<const std::uint8_t> constant) {
  return std::make_unique<AesOfbGenerator>(seed, constant);
}

std::vector<std::uint8_t> encode_modulus(u64 modulus) {
  std::vector<std::uint8_t> out;
  for (int shift = 56; shift >= 0; shift -= 8) {
    const std::uint8_t b = static_cast<std::uint8_t>(modulus >> shift);
    if (!out.empty() || b != 0 || shift == 0) out.push_back(b);
  }
  return out;
}

std::vector<std::uint8_t> next_chunk(StreamGenerator& gen,
                                     const KeyScheduleConfig& config) {
  return gen.next_bits(config.chunk_bits());
}

IterationKeys derive_iteration_keys(StreamGenerator& gen, u64 round,
                                    const KeyScheduleConfig& config,
                                    const GroupParams& params) {
  if (round != gen.rounds_derived_)
    throw std::logic_error("iteration keys must be derived in order");
  if (config.bit_length == 0 || config.bit_length > 64 ||
      config.site_count == 0)
    raise(Errc::BadConfig, "invalid key schedule configuration");

  IterationKeys keys;
  keys.round = round;
  const u64 rho = params.modulus;
  for (;;) {
    const u64 raw_r = gen.next_uint(config.bit_length);
    const u64 r = raw_r % rho;
    std::vector<u64> nonces(config.site_count);
    for (unsigned i = 0; i < config.site_count; ++i)
      nonces[i] = gen.next_uint(config.bit_length) % rho;
    if (r == 0) continue;  // rejection: r must lie in Z_rho^*
    keys.r = r;
    keys.nonces = std::move(nonces);
    break;
  }
  keys.r_inv = mod_inverse(keys.r, rho);
  keys.nonce_sum = 0;
  for (u64 n : keys.nonces) keys.nonce_sum += n;
  gen.rounds_derived_ += 1;
  return keys;
}

}  // namespace mixmine
