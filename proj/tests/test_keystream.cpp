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

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "doctest.h"

using namespace mixmine;

namespace {

Seed test_seed() { return Seed::from_hex("00112233445566778899"); }

std::vector<std::uint8_t> rho_constant() { return encode_modulus(91); }

}  // namespace

TEST_CASE("seed hex round trip") {
  const Seed s = test_seed();
  CHECK(s.bytes.size() == kDefaultSeedBytes);
  CHECK(s.to_hex() == "00112233445566778899");
  CHECK_THROWS_AS(Seed::from_hex("abc"), Error);   // odd length
  CHECK_THROWS_AS(Seed::from_hex("zz"), Error);    // not hex
}

TEST_CASE("encode_modulus is minimal big-endian") {
  CHECK(encode_modulus(91) == std::vector<std::uint8_t>{0x5B});
  CHECK(encode_modulus(0x1234) == std::vector<std::uint8_t>{0x12, 0x34});
  CHECK(encode_modulus(0) == std::vector<std::uint8_t>{0x00});
}

TEST_CASE("determinism: same seed and constant give identical streams") {
  AesOfbGenerator a(test_seed(), rho_constant());
  AesOfbGenerator b(test_seed(), rho_constant());
  CHECK(a.next_bits(1024) == b.next_bits(1024));
}

TEST_CASE("streams diverge by seed and by constant") {
  const auto c = rho_constant();
  AesOfbGenerator a(test_seed(), c);
  AesOfbGenerator b(Seed::from_hex("00112233445566778898"), c);
  CHECK(a.next_bits(128) != b.next_bits(128));

  AesOfbGenerator d(test_seed(), c);
  AesOfbGenerator e(test_seed(), encode_modulus(97));
  CHECK(d.next_bits(128) != e.next_bits(128));
}

TEST_CASE("seed length bounds") {
  Seed empty;
  CHECK_THROWS_AS(AesOfbGenerator(empty, rho_constant()), Error);
  Seed long_seed;
  long_seed.bytes.assign(17, 0xAA);
  try {
    AesOfbGenerator g(long_seed, rho_constant());
    FAIL("expected BadSeedLength");
  } catch (const Error& err) {
    CHECK(err.code() == Errc::BadSeedLength);
  }
}

TEST_CASE("next_chunk widths and the prefix property") {
  CHECK(KeyScheduleConfig{8, 3}.chunk_bits() == 32);
  CHECK(KeyScheduleConfig{16, 5}.chunk_bits() == 96);

  // two successive chunks equal one double-width draw, split
  AesOfbGenerator g1(test_seed(), rho_constant());
  AesOfbGenerator g2(test_seed(), rho_constant());
  const KeyScheduleConfig cfg{8, 3};
  const auto chunk1 = next_chunk(g1, cfg);
  const auto chunk2 = next_chunk(g1, cfg);
  const auto both = g2.next_bits(64);
  CHECK(chunk1 == std::vector<std::uint8_t>(both.begin(), both.begin() + 4));
  CHECK(chunk2 == std::vector<std::uint8_t>(both.begin() + 4, both.end()));
  CHECK(g1.bit_position() == 64);
}

TEST_CASE("derive_iteration_keys slices the reference chunk") {
  // chunk bytes 0x17 0x11 0x0B 0x0A: r=23, nonces 17/11/10 at l=8, rho=91
  FixedStreamGenerator gen({0x17, 0x11, 0x0B, 0x0A});
  const GroupParams params{91, 8, 3};
  const KeyScheduleConfig cfg{8, 3};
  const IterationKeys keys = derive_iteration_keys(gen, 0, cfg, params);
  CHECK(keys.r == 23);
  CHECK(keys.nonces == std::vector<u64>{17, 11, 10});
  CHECK(static_cast<u64>(keys.nonce_sum) == 38);
  CHECK(keys.r_inv == 4);
}

TEST_CASE("r = 0 rejects the whole chunk") {
  // first chunk has r-field 0x5B = 91 = 0 mod 91; keys must come from the
  // second chunk, nonces of the first discarded with it
  FixedStreamGenerator gen(
      {0x5B, 0x01, 0x02, 0x03, 0x17, 0x11, 0x0B, 0x0A});
  const GroupParams params{91, 8, 3};
  const KeyScheduleConfig cfg{8, 3};
  const IterationKeys keys = derive_iteration_keys(gen, 0, cfg, params);
  CHECK(keys.r == 23);
  CHECK(keys.nonces == std::vector<u64>{17, 11, 10});
}

TEST_CASE("non-byte-aligned fields slice big-endian") {
  // l=12: fields 0xABC, 0xDEF, 0x012, 0x345 from six bytes
  FixedStreamGenerator gen({0xAB, 0xCD, 0xEF, 0x01, 0x23, 0x45});
  const GroupParams params{4093, 12, 3};
  const KeyScheduleConfig cfg{12, 3};
  const IterationKeys keys = derive_iteration_keys(gen, 0, cfg, params);
  CHECK(keys.r == 0xABC);
  CHECK(keys.nonces == std::vector<u64>{0xDEF % 4093, 0x012, 0x345});
  CHECK(mulmod(keys.r, keys.r_inv, 4093) == 1);
}

TEST_CASE("derived keys always satisfy r * r_inv = 1") {
  AesOfbGenerator gen(test_seed(), encode_modulus(101));
  const GroupParams params{101, 16, 4};
  const KeyScheduleConfig cfg{16, 4};
  for (u64 round = 0; round < 500; ++round) {
    const IterationKeys keys = derive_iteration_keys(gen, round, cfg, params);
    CHECK(mulmod(keys.r, keys.r_inv, params.modulus) == 1);
    CHECK(keys.r > 0);
    CHECK(keys.r < params.modulus);
    u128 sum = 0;
    for (u64 n : keys.nonces) {
      CHECK(n < params.modulus);
      sum += n;
    }
    CHECK(sum == keys.nonce_sum);
  }
}

TEST_CASE("agreement: independent generators derive identical keys") {
  const GroupParams params{65521, 16, 5};
  const KeyScheduleConfig cfg{16, 5};
  AesOfbGenerator a(test_seed(), encode_modulus(65521));
  AesOfbGenerator b(test_seed(), encode_modulus(65521));
  for (u64 round = 0; round < 200; ++round) {
    const IterationKeys ka = derive_iteration_keys(a, round, cfg, params);
    const IterationKeys kb = derive_iteration_keys(b, round, cfg, params);
    CHECK(ka.r == kb.r);
    CHECK(ka.r_inv == kb.r_inv);
    CHECK(ka.nonces == kb.nonces);
    CHECK(ka.nonce_sum == kb.nonce_sum);
  }
}

TEST_CASE("freshness: a thousand rounds, no repeated key set") {
  const GroupParams params{65521, 16, 3};
  const KeyScheduleConfig cfg{16, 3};
  AesOfbGenerator gen(test_seed(), encode_modulus(65521));
  std::set<std::vector<u64>> seen;
  for (u64 round = 0; round < 1000; ++round) {
    const IterationKeys keys = derive_iteration_keys(gen, round, cfg, params);
    std::vector<u64> flat{keys.r};
    flat.insert(flat.end(), keys.nonces.begin(), keys.nonces.end());
    CHECK(seen.insert(flat).second);
  }
}

TEST_CASE("position determinism: re-deriving from scratch replays history") {
  const GroupParams params{101, 8, 3};
  const KeyScheduleConfig cfg{8, 3};
  AesOfbGenerator first(test_seed(), encode_modulus(101));
  std::vector<IterationKeys> history;
  for (u64 round = 0; round < 50; ++round)
    history.push_back(derive_iteration_keys(first, round, cfg, params));

  AesOfbGenerator replay(test_seed(), encode_modulus(101));
  for (u64 round = 0; round < 50; ++round) {
    const IterationKeys keys = derive_iteration_keys(replay, round, cfg, params);
    CHECK(keys.r == history[round].r);
    CHECK(keys.nonces == history[round].nonces);
  }
}

TEST_CASE("rounds must be derived in order") {
  AesOfbGenerator gen(test_seed(), rho_constant());
  const GroupParams params{91, 8, 3};
  const KeyScheduleConfig cfg{8, 3};
  CHECK_THROWS_AS(derive_iteration_keys(gen, 3, cfg, params),
                  std::logic_error);
}

TEST_CASE("monobit frequency over 1e5 bits") {
  AesOfbGenerator gen(test_seed(), rho_constant());
  const auto bits = gen.next_bits(100000);
  u64 ones = 0;
  for (std::size_t i = 0; i < 100000; ++i)
    if (bits[i / 8] & (0x80u >> (i % 8))) ++ones;
  // |2*ones - n| / sqrt(n) below 4 sigma
  const double z =
      std::abs(2.0 * static_cast<double>(ones) - 100000.0) / std::sqrt(100000.0);
  CHECK(z < 4.0);
}

TEST_CASE("golden keystream fixture") {
  const std::string dir = MIXMINE_FIXTURE_DIR;
  std::ifstream sidecar(dir + "/golden_keystream.txt");
  REQUIRE(sidecar.good());
  std::map<std::string, std::string> fields;
  std::string key, value;
  while (sidecar >> key >> value) fields[key] = value;
  REQUIRE(fields.count("seed_hex"));
  REQUIRE(fields.count("constant_hex"));
  REQUIRE(fields.count("generator"));
  CHECK(fields["generator"] == AesOfbGenerator::kGeneratorId);

  std::ifstream bin(dir + "/golden_keystream.bin", std::ios::binary);
  REQUIRE(bin.good());
  std::vector<std::uint8_t> expected(
      (std::istreambuf_iterator<char>(bin)), std::istreambuf_iterator<char>());
  REQUIRE(!expected.empty());

  const Seed seed = Seed::from_hex(fields["seed_hex"]);
  const Seed constant_bytes = Seed::from_hex(fields["constant_hex"]);
  AesOfbGenerator gen(seed, constant_bytes.bytes);
  CHECK(gen.next_bits(8 * expected.size()) == expected);
}
