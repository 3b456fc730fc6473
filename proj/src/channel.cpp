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

#include "mixmine/channel.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <algorithm>
#include <cstring>
#include <memory>

namespace mixmine {

namespace {

struct CtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CtxPtr = std::unique_ptr<EVP_CIPHER_CTX, CtxDeleter>;

std::array<std::uint8_t, 12> nonce_for(std::uint64_t seq) {
  std::array<std::uint8_t, 12> nonce{};
  for (int i = 0; i < 8; ++i)
    nonce[4 + i] = static_cast<std::uint8_t>(seq >> (8 * (7 - i)));
  return nonce;
}

}  // namespace

SecureChannel::SecureChannel(std::span<const std::uint8_t> key) {
  if (key.size() != kKeyBytes)
    raise(Errc::BadConfig, "channel key must be 32 bytes");
  std::copy(key.begin(), key.end(), key_.begin());
}

std::vector<std::uint8_t> SecureChannel::seal(
    std::span<const std::uint8_t> inner) {
  const std::uint64_t seq = send_seq_++;
  const auto nonce = nonce_for(seq);

  std::vector<std::uint8_t> out(8 + inner.size() + 16);
  for (int i = 0; i < 8; ++i)
    out[i] = static_cast<std::uint8_t>(seq >> (8 * (7 - i)));

  CtxPtr ctx(EVP_CIPHER_CTX_new());
  int len = 0;
  if (!ctx ||
      EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key_.data(),
                         nonce.data()) != 1 ||
      EVP_EncryptUpdate(ctx.get(), out.data() + 8, &len, inner.data(),
                        static_cast<int>(inner.size())) != 1)
    raise(Errc::IoFailure, "GCM seal failed");
  int fin = 0;
  if (EVP_EncryptFinal_ex(ctx.get(), out.data() + 8 + len, &fin) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, 16,
                          out.data() + 8 + inner.size()) != 1)
    raise(Errc::IoFailure, "GCM seal failed");
  return out;
}

std::vector<std::uint8_t> SecureChannel::open(
    std::span<const std::uint8_t> sealed) {
  if (sealed.size() < kOverheadBytes)
    raise(Errc::AuthFailure, "sealed frame too short");
  std::uint64_t seq = 0;
  for (int i = 0; i < 8; ++i) seq = (seq << 8) | sealed[i];
  if (seq != recv_seq_)
    raise(Errc::ReplayRejected, "sequence " + std::to_string(seq) +
                                    ", expected " + std::to_string(recv_seq_));
  const std::size_t ct_len = sealed.size() - kOverheadBytes;
  const auto nonce = nonce_for(seq);

  std::vector<std::uint8_t> plain(ct_len);
  std::uint8_t tag[16];
  std::memcpy(tag, sealed.data() + 8 + ct_len, 16);

  CtxPtr ctx(EVP_CIPHER_CTX_new());
  int len = 0;
  if (!ctx ||
      EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key_.data(),
                         nonce.data()) != 1 ||
      EVP_DecryptUpdate(ctx.get(), plain.data(), &len, sealed.data() + 8,
                        static_cast<int>(ct_len)) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, 16, tag) != 1)
    raise(Errc::IoFailure, "GCM open failed");
  int fin = 0;
  if (EVP_DecryptFinal_ex(ctx.get(), plain.data() + len, &fin) != 1)
    raise(Errc::AuthFailure, "tag verification failed");
  recv_seq_ = seq + 1;
  return plain;
}

std::array<std::uint8_t, SecureChannel::kKeyBytes> derive_channel_key(
    std::span<const std::uint8_t> channel_secret, unsigned site_index) {
  std::vector<std::uint8_t> material(channel_secret.begin(),
                                     channel_secret.end());
  material.push_back('s');
  material.push_back('c');
  material.push_back(static_cast<std::uint8_t>(site_index >> 8));
  material.push_back(static_cast<std::uint8_t>(site_index & 0xFF));
  std::array<std::uint8_t, SecureChannel::kKeyBytes> key{};
  SHA256(material.data(), material.size(), key.data());
  return key;
}

}  // namespace mixmine
