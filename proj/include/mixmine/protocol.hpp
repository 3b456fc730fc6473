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

#ifndef MIXMINE_PROTOCOL_HPP
#define MIXMINE_PROTOCOL_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "mixmine/channel.hpp"
#include "mixmine/keystream.hpp"
#include "mixmine/mining.hpp"
#include "mixmine/securesum.hpp"
#include "mixmine/transport.hpp"
#include "mixmine/wire.hpp"

namespace mixmine {

using GeneratorFactory = std::function<std::unique_ptr<StreamGenerator>()>;

/// Everything a site needs for one session. The mixer never receives this
/// record; its view is the reduced MixerSetup below, which structurally
/// cannot hold the seed or the group parameters.
struct SessionConfig {
  unsigned site_count = 0;
  GroupParams params;
  Seed seed;
  double minsup = 0.0;
  double minconf = 0.0;
  std::vector<ItemId> item_universe;
  /// Pre-shared secret behind the per-site private channels. Provisioning
  /// is out of scope; this default stands in for it in simulations.
  std::vector<std::uint8_t> channel_secret = default_channel_secret();
  /// Overrides the reference keystream (tests). Every call must yield a
  /// fresh generator producing the identical stream.
  GeneratorFactory keygen_factory;

  static std::vector<std::uint8_t> default_channel_secret();
  std::unique_ptr<StreamGenerator> make_generator() const;
};

/// The mixer's entire knowledge of a session: how many sites, how wide the
/// wire entries are, and the channel secret. No seed, no modulus, no keys.
struct MixerSetup {
  unsigned site_count = 0;
  unsigned bit_length = 0;
  std::vector<std::uint8_t> channel_secret;
};

MixerSetup mixer_view(const SessionConfig& cfg);

enum class SitePhase { GenerateCandidates, CountLocal, AwaitAggregate, Terminated };

/// One data site. Wire round 0 secure-sums the local database sizes (every
/// site needs the global transaction count for the support threshold);
/// round k >= 1 handles the k-itemset candidates. Each masked value burns
/// one key-schedule slot, so r and the nonces are fresh per itemset.
class SiteNode {
 public:
  SiteNode(const SessionConfig& cfg, unsigned site_index, TransactionDB db);

  /// Generates this round's candidates, counts them locally, masks the
  /// counts and returns the upload — or a Terminate once no candidates
  /// remain. Leaves the site in AwaitAggregate (or Terminated).
  ProtocolMessage begin_round();

  /// Unmasks the aggregate and folds it in. Returns the Terminate message
  /// to forward when this round's frequent set came up empty.
  std::optional<Terminate> on_aggregate(const BroadcastAggregate& broadcast);

  SitePhase phase() const { return phase_; }
  std::uint32_t round() const { return round_; }
  unsigned site_index() const { return site_index_; }
  u64 total_transactions() const { return total_tx_; }
  const std::vector<FrequentSet>& frequents() const { return frequents_; }
  /// Association rules from the accumulated frequent sets; meaningful once
  /// Terminated.
  std::vector<Rule> make_rules() const;

 private:
  SessionConfig cfg_;
  unsigned site_index_;
  TransactionDB db_;
  std::unique_ptr<StreamGenerator> keygen_;
  KeyScheduleConfig schedule_;
  u64 chunk_counter_ = 0;
  std::uint32_t round_ = 0;
  SitePhase phase_ = SitePhase::GenerateCandidates;
  CandidateSet current_;
  std::vector<IterationKeys> round_keys_;
  std::vector<FrequentSet> frequents_;
  u64 total_tx_ = 0;
};

/// The semi-trusted mixer. Holds masked values and counts of them, nothing
/// else; summation happens on ciphertexts.
class MixerNode {
 public:
  explicit MixerNode(unsigned site_count);

  /// Stores one upload; once all N sites reported, returns the broadcast
  /// with the per-index integer sums (never reduced).
  std::optional<BroadcastAggregate> on_upload(const UploadMasked& upload);

  void on_terminate(const Terminate& term);
  bool finished() const { return terminated_.size() == site_count_; }
  std::uint32_t round() const { return round_; }

 private:
  unsigned site_count_;
  std::uint32_t round_ = 0;
  std::map<std::uint16_t, std::vector<u64>> pending_;
  std::set<std::uint16_t> terminated_;
};

struct MiningResult {
  std::vector<FrequentSet> frequents;
  std::vector<Rule> rules;
  u64 total_transactions = 0;
  std::uint32_t rounds_completed = 0;  // rounds that produced a broadcast
  ChannelMetrics metrics;
};

/// Mining-output equality: frequent sets with counts, rules, total size.
/// Metrics are transport-specific and excluded.
bool same_mining_output(const MiningResult& a, const MiningResult& b);

struct SessionHooks {
  /// Called with every upload the mixer accepts (its post-channel view).
  std::function<void(const UploadMasked&)> on_mixer_upload;
};

/// Deterministic single-threaded simulation over the in-process bus.
/// Entities are stepped in a fixed order, so the whole transcript is
/// reproducible byte for byte.
MiningResult run_session_inproc(const SessionConfig& cfg,
                                const std::vector<TransactionDB>& dbs,
                                const SessionHooks& hooks = {});

/// Same session over loopback TCP, one thread per entity. port 0 picks an
/// ephemeral port.
MiningResult run_session_tcp_loopback(const SessionConfig& cfg,
                                      const std::vector<TransactionDB>& dbs,
                                      std::uint16_t port = 0);

/// Role loops for genuinely distributed runs (one process per entity).
MiningResult run_site_role(const SessionConfig& cfg, unsigned site_index,
                           TransactionDB db, Endpoint& ep,
                           MetricsRecorder& recorder);
ChannelMetrics run_mixer_role(const MixerSetup& setup, Endpoint& ep,
                              MetricsRecorder& recorder,
                              const SessionHooks& hooks = {});

/// Rejects session setups the protocol cannot serve: fewer than three
/// sites, mismatched N, or a modulus not exceeding the total transaction
/// count.
void validate_session(const SessionConfig& cfg,
                      const std::vector<TransactionDB>& dbs);

}  // namespace mixmine

#endif  // MIXMINE_PROTOCOL_HPP
