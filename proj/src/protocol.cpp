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

#include "mixmine/protocol.hpp"

#include <algorithm>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>

namespace mixmine {

std::vector<std::uint8_t> SessionConfig::default_channel_secret() {
  static const char* kDefault = "mixmine-simulated-channel-provisioning";
  return std::vector<std::uint8_t>(kDefault, kDefault + 38);
}

std::unique_ptr<StreamGenerator> SessionConfig::make_generator() const {
  if (keygen_factory) return keygen_factory();
  return init_generator(seed, encode_modulus(params.modulus));
}

MixerSetup mixer_view(const SessionConfig& cfg) {
  return MixerSetup{cfg.site_count, cfg.params.bit_length, cfg.channel_secret};
}

// ---------------------------------------------------------------------------
// SiteNode

SiteNode::SiteNode(const SessionConfig& cfg, unsigned site_index,
                   TransactionDB db)
    : cfg_(cfg),
      site_index_(site_index),
      db_(std::move(db)),
      keygen_(cfg.make_generator()),
      schedule_{cfg.params.bit_length, cfg.params.site_count} {
  if (site_index_ < 1 || site_index_ > cfg_.site_count)
    raise(Errc::SiteIndexOutOfRange, "site index " + std::to_string(site_index));
}

ProtocolMessage SiteNode::begin_round() {
  if (phase_ != SitePhase::GenerateCandidates)
    throw std::logic_error("begin_round outside GenerateCandidates");

  std::vector<u64> counts;
  if (round_ == 0) {
    // size-exchange round: the only value summed is |DB_i|
    current_ = CandidateSet{};
    counts.push_back(db_.size());
  } else {
    const unsigned k = round_;
    if (k == 1) {
      current_ = singleton_candidates(cfg_.item_universe);
    } else {
      const FrequentSet& prev = frequents_.back();
      current_ = apriori_prune(apriori_join(prev), prev);
    }
    if (current_.candidates.empty()) {
      phase_ = SitePhase::Terminated;
      return Terminate{round_, static_cast<std::uint16_t>(site_index_)};
    }
    phase_ = SitePhase::CountLocal;
    counts = count_supports(db_, current_);
  }

  for (u64 c : counts)
    if (c >= cfg_.params.modulus)
      raise(Errc::CountOverflow, "local count " + std::to_string(c) +
                                     " reaches the modulus");

  UploadMasked up;
  up.round = round_;
  up.site_index = static_cast<std::uint16_t>(site_index_);
  up.alphas.reserve(counts.size());
  round_keys_.clear();
  for (std::size_t j = 0; j < counts.size(); ++j) {
    IterationKeys keys = derive_iteration_keys(*keygen_, chunk_counter_++,
                                               schedule_, cfg_.params);
    up.alphas.push_back(
        mask(counts[j], keys, site_index_, cfg_.params, j).alpha);
    round_keys_.push_back(std::move(keys));
  }
  phase_ = SitePhase::AwaitAggregate;
  return up;
}

std::optional<Terminate> SiteNode::on_aggregate(
    const BroadcastAggregate& broadcast) {
  if (phase_ != SitePhase::AwaitAggregate)
    raise(Errc::RoundMismatch, "aggregate outside AwaitAggregate");
  if (broadcast.round != round_)
    raise(Errc::RoundMismatch, "aggregate for round " +
                                   std::to_string(broadcast.round) +
                                   ", site at " + std::to_string(round_));
  if (broadcast.epsilons.size() != round_keys_.size())
    raise(Errc::LengthMismatch, "aggregate carries " +
                                    std::to_string(broadcast.epsilons.size()) +
                                    " sums, expected " +
                                    std::to_string(round_keys_.size()));

  std::vector<u64> totals(broadcast.epsilons.size());
  for (std::size_t j = 0; j < totals.size(); ++j) {
    const AggregateCiphertext agg{round_keys_[j].round, j,
                                  broadcast.epsilons[j]};
    totals[j] = unmask(agg, round_keys_[j], cfg_.params);
  }
  round_keys_.clear();

  if (round_ == 0) {
    total_tx_ = totals.front();
    round_ = 1;
    phase_ = SitePhase::GenerateCandidates;
    return std::nullopt;
  }

  FrequentSet fs =
      compute_frequent(current_, totals, total_tx_, cfg_.minsup);
  round_ += 1;
  if (fs.entries.empty()) {
    phase_ = SitePhase::Terminated;
    return Terminate{round_, static_cast<std::uint16_t>(site_index_)};
  }
  frequents_.push_back(std::move(fs));
  phase_ = SitePhase::GenerateCandidates;
  return std::nullopt;
}

std::vector<Rule> SiteNode::make_rules() const {
  return generate_rules(frequents_, total_tx_, cfg_.minconf);
}

// ---------------------------------------------------------------------------
// MixerNode

MixerNode::MixerNode(unsigned site_count) : site_count_(site_count) {
  if (site_count_ < 3)
    raise(Errc::TooFewSites, "mixer requires at least 3 sites");
}

std::optional<BroadcastAggregate> MixerNode::on_upload(
    const UploadMasked& upload) {
  if (upload.round != round_)
    raise(Errc::StaleRound, "upload for round " + std::to_string(upload.round) +
                                ", mixer at " + std::to_string(round_));
  if (terminated_.count(upload.site_index))
    raise(Errc::StaleRound, "upload from terminated site " +
                                std::to_string(upload.site_index));
  if (pending_.count(upload.site_index))
    raise(Errc::DuplicateUpload,
          "site " + std::to_string(upload.site_index) + " already uploaded");
  if (!pending_.empty() &&
      pending_.begin()->second.size() != upload.alphas.size())
    raise(Errc::LengthMismatch,
          "sites disagree on the candidate vector length");
  pending_.emplace(upload.site_index, upload.alphas);
  if (pending_.size() < site_count_) return std::nullopt;

  BroadcastAggregate out;
  out.round = round_;
  out.epsilons.assign(pending_.begin()->second.size(), 0);
  for (const auto& [site, alphas] : pending_)
    for (std::size_t j = 0; j < alphas.size(); ++j)
      out.epsilons[j] += alphas[j];
  pending_.clear();
  round_ += 1;
  return out;
}

void MixerNode::on_terminate(const Terminate& term) {
  if (term.round != round_)
    raise(Errc::StaleRound, "terminate for round " + std::to_string(term.round) +
                                ", mixer at " + std::to_string(round_));
  if (!terminated_.insert(term.site_index).second)
    raise(Errc::DuplicateUpload, "site " + std::to_string(term.site_index) +
                                     " already terminated");
}

bool same_mining_output(const MiningResult& a, const MiningResult& b) {
  return a.frequents == b.frequents && a.rules == b.rules &&
         a.total_transactions == b.total_transactions;
}

// ---------------------------------------------------------------------------
// Session drivers

void validate_session(const SessionConfig& cfg,
                      const std::vector<TransactionDB>& dbs) {
  if (cfg.site_count != dbs.size())
    raise(Errc::BadConfig, "config names " + std::to_string(cfg.site_count) +
                               " sites but " + std::to_string(dbs.size()) +
                               " databases given");
  if (cfg.site_count != cfg.params.site_count)
    raise(Errc::BadConfig, "group parameters disagree on the site count");
  u64 total = 0;
  for (const TransactionDB& db : dbs) total += db.size();
  validate_params(cfg.params.modulus, cfg.params.bit_length, cfg.site_count,
                  std::max<u64>(total, 1));
}

namespace {

struct FrameStats {
  std::uint32_t round;
  u64 entries;
  std::size_t payload;
};

FrameStats stats_of(const ProtocolMessage& msg, std::size_t inner_size) {
  FrameStats st{0, 0, inner_size - kFrameHeaderBytes};
  if (const auto* up = std::get_if<UploadMasked>(&msg)) {
    st.round = up->round;
    st.entries = up->alphas.size();
  } else if (const auto* bc = std::get_if<BroadcastAggregate>(&msg)) {
    st.round = bc->round;
    st.entries = bc->epsilons.size();
  } else {
    st.round = std::get<Terminate>(msg).round;
  }
  return st;
}

constexpr std::size_t kWireOverhead = kFrameHeaderBytes + kLengthPrefixTotal;

// Seals, records and sends one site->mixer message.
void send_to_mixer(const ProtocolMessage& msg, unsigned bit_length,
                   SecureChannel& channel, Endpoint& ep,
                   MetricsRecorder& rec) {
  const std::vector<std::uint8_t> inner = encode_frame(msg, bit_length);
  const std::vector<std::uint8_t> sealed = channel.seal(inner);
  const FrameStats st = stats_of(msg, inner.size());
  rec.record_upload_frame(st.round, st.entries, st.payload, kWireOverhead,
                          sealed.size() + kLengthPrefixTotal);
  ep.send(kMixerId, sealed);
}

// The broadcast leg is the paper's public channel: plaintext frames.
void broadcast_to_sites(const BroadcastAggregate& b, unsigned site_count,
                        unsigned bit_length, Endpoint& ep,
                        MetricsRecorder& rec) {
  const std::vector<std::uint8_t> frame = encode_frame(b, bit_length);
  for (unsigned s = 1; s <= site_count; ++s) {
    ep.send(s, frame);
    rec.record_broadcast_frame(b.round, b.epsilons.size(),
                               frame.size() - kFrameHeaderBytes, kWireOverhead,
                               frame.size() + kLengthPrefixTotal);
  }
}

struct MixerRuntime {
  MixerNode node;
  std::map<EntityId, SecureChannel> channels;
  unsigned site_count;
  unsigned bit_length;

  MixerRuntime(const MixerSetup& setup)
      : node(setup.site_count),
        site_count(setup.site_count),
        bit_length(setup.bit_length) {
    for (unsigned s = 1; s <= setup.site_count; ++s)
      channels.emplace(s, SecureChannel(derive_channel_key(
                              setup.channel_secret, s)));
  }

  // Returns true when the message advanced the mixer.
  void handle(EntityId src, std::span<const std::uint8_t> sealed, Endpoint& ep,
              MetricsRecorder& rec, const SessionHooks& hooks) {
    auto chan = channels.find(src);
    if (chan == channels.end())
      raise(Errc::MalformedFrame, "frame from unknown site " +
                                      std::to_string(src));
    const std::vector<std::uint8_t> inner = chan->second.open(sealed);
    const ProtocolMessage msg = decode_frame(inner, bit_length);
    if (const auto* up = std::get_if<UploadMasked>(&msg)) {
      if (up->site_index != src)
        raise(Errc::MalformedFrame, "upload claims site " +
                                        std::to_string(up->site_index) +
                                        " on channel " + std::to_string(src));
      if (hooks.on_mixer_upload) hooks.on_mixer_upload(*up);
      if (auto b = node.on_upload(*up))
        broadcast_to_sites(*b, site_count, bit_length, ep, rec);
    } else if (const auto* term = std::get_if<Terminate>(&msg)) {
      node.on_terminate(*term);
    } else {
      raise(Errc::MalformedFrame, "mixer received a broadcast frame");
    }
  }
};

MiningResult result_from(const SiteNode& site, ChannelMetrics metrics,
                         std::uint32_t rounds_completed) {
  MiningResult out;
  out.frequents = site.frequents();
  out.rules = site.make_rules();
  out.total_transactions = site.total_transactions();
  out.rounds_completed = rounds_completed;
  out.metrics = std::move(metrics);
  return out;
}

void check_agreement(const std::vector<std::unique_ptr<SiteNode>>& sites) {
  for (std::size_t i = 1; i < sites.size(); ++i) {
    if (sites[i]->frequents() != sites[0]->frequents() ||
        sites[i]->total_transactions() != sites[0]->total_transactions())
      throw std::logic_error("sites diverged: frequent sets differ");
  }
}

}  // namespace

MiningResult run_session_inproc(const SessionConfig& cfg,
                                const std::vector<TransactionDB>& dbs,
                                const SessionHooks& hooks) {
  validate_session(cfg, dbs);
  const unsigned n = cfg.site_count;

  MetricsRecorder rec;
  InProcBus bus(&rec);
  auto mixer_ep = bus.attach(kMixerId);
  std::vector<std::unique_ptr<Endpoint>> site_eps;
  std::vector<std::unique_ptr<SiteNode>> sites;
  std::vector<SecureChannel> site_channels;
  std::vector<bool> done(n, false);
  for (unsigned i = 1; i <= n; ++i) {
    site_eps.push_back(bus.attach(i));
    sites.push_back(std::make_unique<SiteNode>(cfg, i, dbs[i - 1]));
    site_channels.emplace_back(derive_channel_key(cfg.channel_secret, i));
  }
  MixerRuntime mixer(mixer_view(cfg));

  // Fixed stepping order: sites 1..N produce, the mixer drains, sites
  // 1..N consume. Bounded by the universe size; no progress means a bug.
  const std::size_t step_limit =
      16 + 8 * (cfg.item_universe.size() + 2) * (n + 1);
  std::size_t steps = 0;
  while (!mixer.node.finished()) {
    if (++steps > step_limit)
      raise(Errc::Timeout, "session made no progress");
    for (unsigned i = 0; i < n; ++i) {
      if (done[i] || sites[i]->phase() != SitePhase::GenerateCandidates)
        continue;
      const ProtocolMessage msg = sites[i]->begin_round();
      send_to_mixer(msg, cfg.params.bit_length, site_channels[i],
                    *site_eps[i], rec);
      if (std::holds_alternative<Terminate>(msg)) done[i] = true;
    }
    while (auto incoming = mixer_ep->try_recv())
      mixer.handle(incoming->first, incoming->second, *mixer_ep, rec, hooks);
    for (unsigned i = 0; i < n; ++i) {
      if (done[i]) continue;
      while (auto incoming = site_eps[i]->try_recv()) {
        const ProtocolMessage msg =
            decode_frame(incoming->second, cfg.params.bit_length);
        const auto& b = std::get<BroadcastAggregate>(msg);
        if (auto term = sites[i]->on_aggregate(b)) {
          send_to_mixer(ProtocolMessage(*term), cfg.params.bit_length,
                        site_channels[i], *site_eps[i], rec);
          done[i] = true;
          break;
        }
      }
    }
  }

  check_agreement(sites);
  return result_from(*sites[0], rec.snapshot(), mixer.node.round());
}

MiningResult run_site_role(const SessionConfig& cfg, unsigned site_index,
                           TransactionDB db, Endpoint& ep,
                           MetricsRecorder& recorder) {
  SiteNode site(cfg, site_index, std::move(db));
  SecureChannel channel(derive_channel_key(cfg.channel_secret, site_index));
  std::uint32_t last_round = 0;
  for (;;) {
    const ProtocolMessage msg = site.begin_round();
    send_to_mixer(msg, cfg.params.bit_length, channel, ep, recorder);
    if (std::holds_alternative<Terminate>(msg)) break;
    auto [src, data] = ep.recv();
    const ProtocolMessage reply = decode_frame(data, cfg.params.bit_length);
    const auto& b = std::get<BroadcastAggregate>(reply);
    last_round = b.round + 1;
    if (auto term = site.on_aggregate(b)) {
      send_to_mixer(ProtocolMessage(*term), cfg.params.bit_length, channel,
                    ep, recorder);
      break;
    }
  }
  return result_from(site, recorder.snapshot(), last_round);
}

ChannelMetrics run_mixer_role(const MixerSetup& setup, Endpoint& ep,
                              MetricsRecorder& recorder,
                              const SessionHooks& hooks) {
  MixerRuntime mixer(setup);
  while (!mixer.node.finished()) {
    auto [src, data] = ep.recv();
    mixer.handle(src, data, ep, recorder, hooks);
  }
  return recorder.snapshot();
}

MiningResult run_session_tcp_loopback(const SessionConfig& cfg,
                                      const std::vector<TransactionDB>& dbs,
                                      std::uint16_t port) {
  validate_session(cfg, dbs);
  const unsigned n = cfg.site_count;

  MetricsRecorder rec;
  TcpListener listener(port, n, &rec);
  const std::uint16_t actual_port = listener.port();

  std::vector<MiningResult> results(n);
  std::vector<std::exception_ptr> failures(n + 1);

  std::vector<std::thread> threads;
  threads.emplace_back([&] {
    try {
      auto ep = listener.accept_sites();
      run_mixer_role(mixer_view(cfg), *ep, rec);
      ep->close();
    } catch (...) {
      failures[0] = std::current_exception();
    }
  });
  for (unsigned i = 1; i <= n; ++i) {
    threads.emplace_back([&, i] {
      try {
        auto ep = tcp_connect("127.0.0.1", actual_port, i, &rec);
        results[i - 1] = run_site_role(cfg, i, dbs[i - 1], *ep, rec);
        ep->close();
      } catch (...) {
        failures[i] = std::current_exception();
      }
    });
  }
  for (std::thread& t : threads) t.join();
  for (const std::exception_ptr& e : failures)
    if (e) std::rethrow_exception(e);

  for (unsigned i = 1; i < n; ++i)
    if (!same_mining_output(results[0], results[i]))
      throw std::logic_error("sites diverged: frequent sets differ");

  MiningResult out = std::move(results[0]);
  out.metrics = rec.snapshot();  // final counters, all threads done
  return out;
}

}  // namespace mixmine
