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

#ifndef MIXMINE_SECURESUM_HPP
#define MIXMINE_SECURESUM_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "mixmine/error.hpp"

namespace mixmine {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using i128 = __int128;

/// Group-level parameters shared by all sites: the prime modulus rho,
/// the residue width l (every residue fits in l bits) and the number of
/// participating sites N.
struct GroupParams {
  u64 modulus = 0;
  unsigned bit_length = 0;
  unsigned site_count = 0;

  bool operator==(const GroupParams&) const = default;
};

/// One key-schedule slot: the multiplier r, its inverse mod rho and the
/// per-site nonces n_1..n_N. `round` is the flat key-schedule index; one
/// masked value consumes one slot. `nonce_sum` is the exact integer sum
/// R_n of the nonces, never reduced.
struct IterationKeys {
  u64 round = 0;
  u64 r = 0;
  u64 r_inv = 0;
  std::vector<u64> nonces;  // nonces[i-1] belongs to site i
  u128 nonce_sum = 0;
};

/// A single masked count as seen by the mixer: alpha = (c*r + n_i) mod rho.
struct MaskedValue {
  u64 round = 0;
  u64 item_index = 0;
  u64 alpha = 0;
};

/// The mixer's output for one slot. epsilon is the plain integer sum of
/// the alphas, deliberately NOT reduced mod rho (it may exceed rho; the
/// receiving sites reduce after subtracting R_n).
struct AggregateCiphertext {
  u64 round = 0;
  u64 item_index = 0;
  u128 epsilon = 0;
};

/// Deterministic Miller-Rabin, valid for the full 64-bit range.
bool is_prime(u64 n);

/// (a * b) mod m without overflow for any 64-bit operands.
u64 mulmod(u64 a, u64 b, u64 m);

/// Checks that `modulus` is a prime strictly above `count_bound`, fits in
/// `bit_length` bits, and that at least three sites participate.
///
/// Throws NotPrime, ModulusTooSmall, BitLengthTooSmall or TooFewSites.
GroupParams validate_params(u64 modulus, unsigned bit_length,
                            unsigned site_count, u64 count_bound);

/// Extended-Euclid inverse: returns x in (0, modulus) with r*x = 1 mod
/// modulus. Throws NotInvertible when gcd(r, modulus) != 1.
u64 mod_inverse(u64 r, u64 modulus);

/// Masks one count for site `site_index` (1-based): alpha =
/// (count * keys.r + keys.nonces[site_index-1]) mod rho.
/// `item_index` tags the slot within the round for bookkeeping only.
MaskedValue mask(u64 count, const IterationKeys& keys, unsigned site_index,
                 const GroupParams& params, u64 item_index = 0);

/// Plain integer sum of one masked value per site. All inputs must carry
/// the same (round, item_index) and there must be exactly N of them.
AggregateCiphertext mix(std::span<const MaskedValue> values,
                        const GroupParams& params);

/// Recovers the sum of the counts: ((epsilon - R_n) mod rho) * r_inv mod
/// rho. Exact whenever the true sum is below rho.
u64 unmask(const AggregateCiphertext& agg, const IterationKeys& keys,
           const GroupParams& params);

}  // namespace mixmine

#endif  // MIXMINE_SECURESUM_HPP
