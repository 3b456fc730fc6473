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

#include "mixmine/securesum.hpp"

#include <string>

namespace mixmine {

const char* errc_name(Errc c) noexcept {
  switch (c) {
    case Errc::NotPrime: return "NotPrime";
    case Errc::ModulusTooSmall: return "ModulusTooSmall";
    case Errc::BitLengthTooSmall: return "BitLengthTooSmall";
    case Errc::TooFewSites: return "TooFewSites";
    case Errc::NotInvertible: return "NotInvertible";
    case Errc::CountOutOfRange: return "CountOutOfRange";
    case Errc::SiteIndexOutOfRange: return "SiteIndexOutOfRange";
    case Errc::RoundMismatch: return "RoundMismatch";
    case Errc::IncompleteSet: return "IncompleteSet";
    case Errc::DuplicateUpload: return "DuplicateUpload";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::StaleRound: return "StaleRound";
    case Errc::CountOverflow: return "CountOverflow";
    case Errc::MissingSubsetCount: return "MissingSubsetCount";
    case Errc::AlignmentMismatch: return "AlignmentMismatch";
    case Errc::WireOverflow: return "WireOverflow";
    case Errc::MalformedFrame: return "MalformedFrame";
    case Errc::BadSeedLength: return "BadSeedLength";
    case Errc::Closed: return "Closed";
    case Errc::IoFailure: return "IoFailure";
    case Errc::Timeout: return "Timeout";
    case Errc::AuthFailure: return "AuthFailure";
    case Errc::ReplayRejected: return "ReplayRejected";
    case Errc::ParseError: return "ParseError";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::UniverseTooLarge: return "UniverseTooLarge";
    case Errc::BadConfig: return "BadConfig";
  }
  return "UnknownError";
}

u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>((static_cast<u128>(a) * b) % m);
}

namespace {

u64 powmod(u64 base, u64 exp, u64 mod) {
  u64 result = 1;
  base %= mod;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, mod);
    base = mulmod(base, base, mod);
    exp >>= 1;
  }
  return result;
}

// One Miller-Rabin round; n-1 = d * 2^s with d odd.
bool witness_composite(u64 a, u64 d, unsigned s, u64 n) {
  u64 x = powmod(a, d, n);
  if (x == 1 || x == n - 1) return false;
  for (unsigned i = 1; i < s; ++i) {
    x = mulmod(x, x, n);
    if (x == n - 1) return false;
  }
  return true;
}

}  // namespace

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                29ull, 31ull, 37ull}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  u64 d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // This witness set is deterministic for all n < 3.3e24.
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                29ull, 31ull, 37ull}) {
    if (witness_composite(a, d, s, n)) return false;
  }
  return true;
}

GroupParams validate_params(u64 modulus, unsigned bit_length,
                            unsigned site_count, u64 count_bound) {
  if (modulus == 0 || bit_length == 0 || site_count == 0 || count_bound == 0)
    raise(Errc::BadConfig, "all parameters must be positive");
  if (!is_prime(modulus))
    raise(Errc::NotPrime, "modulus " + std::to_string(modulus) + " is not prime");
  if (modulus <= count_bound)
    raise(Errc::ModulusTooSmall,
          "modulus " + std::to_string(modulus) +
              " must exceed the count bound " + std::to_string(count_bound));
  if (bit_length < 64 && (modulus >> bit_length) != 0)
    raise(Errc::BitLengthTooSmall,
          "modulus " + std::to_string(modulus) + " does not fit in " +
              std::to_string(bit_length) + " bits");
  if (site_count < 3)
    raise(Errc::TooFewSites, "need at least 3 sites, got " +
                                 std::to_string(site_count));
  return GroupParams{modulus, bit_length, site_count};
}

u64 mod_inverse(u64 r, u64 modulus) {
  if (modulus < 2 || r == 0 || r >= modulus)
    raise(Errc::NotInvertible, "operand out of range");
  // extended Euclid over signed 128-bit to keep coefficients exact
  i128 old_r = r, cur_r = modulus;
  i128 old_s = 1, cur_s = 0;
  while (cur_r != 0) {
    i128 q = old_r / cur_r;
    i128 tmp = old_r - q * cur_r;
    old_r = cur_r;
    cur_r = tmp;
    tmp = old_s - q * cur_s;
    old_s = cur_s;
    cur_s = tmp;
  }
  if (old_r != 1)
    raise(Errc::NotInvertible,
          std::to_string(r) + " shares a factor with " + std::to_string(modulus));
  i128 inv = old_s % static_cast<i128>(modulus);
  if (inv < 0) inv += modulus;
  return static_cast<u64>(inv);
}

MaskedValue mask(u64 count, const IterationKeys& keys, unsigned site_index,
                 const GroupParams& params, u64 item_index) {
  if (count >= params.modulus)
    raise(Errc::CountOutOfRange, "count " + std::to_string(count) +
                                     " not below modulus " +
                                     std::to_string(params.modulus));
  if (site_index < 1 || site_index > keys.nonces.size())
    raise(Errc::SiteIndexOutOfRange,
          "site index " + std::to_string(site_index) + " not in [1, " +
              std::to_string(keys.nonces.size()) + "]");
  u128 v = static_cast<u128>(count) * keys.r + keys.nonces[site_index - 1];
  return MaskedValue{keys.round, item_index,
                     static_cast<u64>(v % params.modulus)};
}

AggregateCiphertext mix(std::span<const MaskedValue> values,
                        const GroupParams& params) {
  if (values.size() != params.site_count)
    raise(Errc::IncompleteSet, "expected " + std::to_string(params.site_count) +
                                   " masked values, got " +
                                   std::to_string(values.size()));
  const u64 round = values.front().round;
  const u64 item = values.front().item_index;
  u128 sum = 0;
  for (const MaskedValue& v : values) {
    if (v.round != round || v.item_index != item)
      raise(Errc::RoundMismatch, "masked values span different slots");
    sum += v.alpha;
  }
  return AggregateCiphertext{round, item, sum};
}

u64 unmask(const AggregateCiphertext& agg, const IterationKeys& keys,
           const GroupParams& params) {
  if (agg.round != keys.round)
    raise(Errc::RoundMismatch, "aggregate round " + std::to_string(agg.round) +
                                   " vs key round " +
                                   std::to_string(keys.round));
  const u64 rho = params.modulus;
  // epsilon - R_n may be negative; both fit comfortably in signed 128-bit
  // (each is at most N * (rho - 1)).
  i128 diff = static_cast<i128>(agg.epsilon) - static_cast<i128>(keys.nonce_sum);
  i128 red = diff % static_cast<i128>(rho);
  if (red < 0) red += rho;
  return mulmod(static_cast<u64>(red), keys.r_inv, rho);
}

}  // namespace mixmine
