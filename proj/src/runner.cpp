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

#include "mixmine/runner.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "mixmine/costmodel.hpp"

namespace mixmine {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string iso_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::pair<std::string, std::uint16_t> split_host_port(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos || colon + 1 >= addr.size())
    raise(Errc::BadConfig, "mixer address must be HOST:PORT, got " + addr);
  const int port = std::stoi(addr.substr(colon + 1));
  if (port < 1 || port > 65535)
    raise(Errc::BadConfig, "port out of range in " + addr);
  return {addr.substr(0, colon), static_cast<std::uint16_t>(port)};
}

SessionConfig session_config_for(const RunConfig& cfg, u64 modulus,
                                 std::vector<ItemId> universe) {
  SessionConfig sc;
  sc.site_count = cfg.sites;
  sc.params = GroupParams{modulus, cfg.bit_length, cfg.sites};
  sc.seed = Seed::from_hex(cfg.seed_hex);
  if (sc.seed.bytes.size() != kDefaultSeedBytes)
    raise(Errc::BadSeedLength,
          "seed must be " + std::to_string(2 * kDefaultSeedBytes) +
              " hex digits (" + std::to_string(8 * kDefaultSeedBytes) +
              " bits)");
  sc.minsup = cfg.minsup;
  sc.minconf = cfg.minconf;
  sc.item_universe = std::move(universe);
  return sc;
}

ordered_json itemset_json(const Itemset& s) {
  return ordered_json(s.items);
}

ordered_json rounds_json(const ChannelMetrics& metrics) {
  ordered_json rounds = ordered_json::array();
  for (const auto& [round, t] : metrics.rounds) {
    ordered_json r;
    r["round"] = round;
    r["upload_entries"] = t.upload_entries;
    r["upload_payload_bytes"] = t.upload_payload_bytes;
    r["upload_header_bytes"] = t.upload_header_bytes;
    r["upload_gross_bytes"] = t.upload_gross_bytes;
    r["upload_messages"] = t.upload_messages;
    r["broadcast_entries"] = t.broadcast_entries;
    r["broadcast_payload_bytes"] = t.broadcast_payload_bytes;
    r["broadcast_header_bytes"] = t.broadcast_header_bytes;
    r["broadcast_gross_bytes"] = t.broadcast_gross_bytes;
    r["broadcast_messages"] = t.broadcast_messages;
    rounds.push_back(std::move(r));
  }
  return rounds;
}

ordered_json reconciliation_json(const RunConfig& cfg,
                                 const MiningResult& result) {
  const auto rows =
      reconcile(result.metrics, cfg.sites, 1.0,
                alpha_width_bytes(cfg.bit_length), 3,
                kFrameHeaderBytes + kLengthPrefixTotal);
  ordered_json arr = ordered_json::array();
  for (const ReconcileRow& row : rows) {
    ordered_json r;
    r["round"] = row.round;
    r["candidate_count"] = row.entry_count;
    r["measured_upload"] = row.measured_upload;
    r["measured_broadcast"] = row.measured_broadcast;
    r["upload_header_bytes"] = row.upload_header_bytes;
    r["broadcast_header_bytes"] = row.broadcast_header_bytes;
    r["analytic_upload"] = row.analytic_upload;
    r["analytic_broadcast"] = row.analytic_broadcast;
    r["analytic_proposed"] = row.analytic_proposed;
    r["analytic_yizhang"] = row.analytic_yizhang;
    r["upload_deviation_pct"] = row.upload_deviation_pct;
    r["broadcast_deviation_pct"] = row.broadcast_deviation_pct;
    r["deviation_pct"] = row.deviation_pct;
    arr.push_back(std::move(r));
  }
  return arr;
}

ordered_json table1_json() {
  const OpCounts ops = op_counts();
  ordered_json t;
  t["communication_overhead_per_iteration"] = {{"proposed", "3NH"},
                                               {"yizhang", "6NH"}};
  t["exponential_operations"] = {{"proposed", ops.proposed.exponential_ops},
                                 {"yizhang", ops.yizhang.exponential_ops}};
  t["basic_operations"] = {{"proposed", ops.proposed.basic_ops},
                           {"yizhang", ops.yizhang.basic_ops}};
  t["key_size_bits"] = {{"proposed", ops.proposed.key_bits},
                        {"yizhang", ops.yizhang.key_bits}};
  return t;
}

}  // namespace

std::string build_report_json(const RunConfig& cfg, const MiningResult& result,
                              u64 modulus, const std::string& timestamp) {
  ordered_json report;
  report["timestamp"] = timestamp;
  ordered_json conf;
  conf["dataset"] = cfg.dataset_path;
  conf["sites"] = cfg.sites;
  conf["minsup"] = cfg.minsup;
  conf["minconf"] = cfg.minconf;
  conf["modulus"] = modulus;
  conf["bit_length"] = cfg.bit_length;
  conf["transport"] = cfg.transport == TransportKind::InProc ? "inproc" : "tcp";
  conf["partition"] =
      cfg.scheme == PartitionScheme::RoundRobin ? "round_robin" : "contiguous";
  report["config"] = std::move(conf);
  report["total_transactions"] = result.total_transactions;
  report["rounds_completed"] = result.rounds_completed;

  ordered_json frequents = ordered_json::array();
  const double total = static_cast<double>(result.total_transactions);
  for (const FrequentSet& fs : result.frequents) {
    for (const FrequentEntry& e : fs.entries) {
      ordered_json f;
      f["items"] = itemset_json(e.itemset);
      f["count"] = e.count;
      f["support"] =
          fixed6(total == 0.0 ? 0.0 : static_cast<double>(e.count) / total);
      frequents.push_back(std::move(f));
    }
  }
  report["frequent_itemsets"] = std::move(frequents);

  ordered_json rules = ordered_json::array();
  for (const Rule& rule : result.rules) {
    ordered_json r;
    r["antecedent"] = itemset_json(rule.antecedent);
    r["consequent"] = itemset_json(rule.consequent);
    r["support"] = fixed6(rule.support);
    r["confidence"] = fixed6(rule.confidence);
    rules.push_back(std::move(r));
  }
  report["rules"] = std::move(rules);

  report["rounds"] = rounds_json(result.metrics);
  report["reconciliation"] = reconciliation_json(cfg, result);
  report["table1"] = table1_json();
  return report.dump(2) + "\n";
}

void print_report(std::ostream& out, const RunConfig& cfg,
                  const MiningResult& result, u64 modulus) {
  out << "modulus rho=" << modulus << "  bit length l=" << cfg.bit_length
      << "  sites N=" << cfg.sites << "\n";
  out << "total transactions: " << result.total_transactions
      << "  rounds: " << result.rounds_completed << "\n";
  out << "frequent itemsets (minsup=" << fixed6(cfg.minsup) << "):\n";
  const double total = static_cast<double>(result.total_transactions);
  for (const FrequentSet& fs : result.frequents) {
    for (const FrequentEntry& e : fs.entries) {
      out << "  {";
      for (std::size_t i = 0; i < e.itemset.items.size(); ++i)
        out << (i ? "," : "") << e.itemset.items[i];
      out << "} count=" << e.count << " support="
          << fixed6(total == 0.0 ? 0.0 : static_cast<double>(e.count) / total)
          << "\n";
    }
  }
  out << "rules (minconf=" << fixed6(cfg.minconf) << "):\n";
  for (const Rule& rule : result.rules) {
    out << "  {";
    for (std::size_t i = 0; i < rule.antecedent.items.size(); ++i)
      out << (i ? "," : "") << rule.antecedent.items[i];
    out << "} => {";
    for (std::size_t i = 0; i < rule.consequent.items.size(); ++i)
      out << (i ? "," : "") << rule.consequent.items[i];
    out << "}  support=" << fixed6(rule.support)
        << " confidence=" << fixed6(rule.confidence) << "\n";
  }
  out << "traffic and cost-model reconciliation (phi=1, L="
      << alpha_width_bytes(cfg.bit_length) << ", K=3):\n";
  const auto rows =
      reconcile(result.metrics, cfg.sites, 1.0,
                alpha_width_bytes(cfg.bit_length), 3,
                kFrameHeaderBytes + kLengthPrefixTotal);
  for (const ReconcileRow& row : rows) {
    out << "  round " << row.round << ": H=" << row.entry_count
        << " upload " << row.measured_upload << "B (analytic "
        << row.analytic_upload << "B, " << fixed6(row.upload_deviation_pct)
        << "%), broadcast " << row.measured_broadcast << "B (analytic "
        << row.analytic_broadcast << "B, "
        << fixed6(row.broadcast_deviation_pct) << "%), headers "
        << (row.upload_header_bytes + row.broadcast_header_bytes)
        << "B itemized separately\n";
  }
  const OpCounts ops = op_counts();
  out << "table 1: overhead 3NH vs 6NH; exponential ops "
      << ops.proposed.exponential_ops << " vs " << ops.yizhang.exponential_ops
      << "; basic ops " << ops.proposed.basic_ops << " vs "
      << ops.yizhang.basic_ops << "; key bits " << ops.proposed.key_bits
      << " vs " << ops.yizhang.key_bits << "\n";
}

MiningResult run_inproc_pipeline(const RunConfig& cfg, u64* modulus_out) {
  const TransactionDB db = load_dataset(cfg.dataset_path);
  const std::vector<TransactionDB> parts = partition(db, cfg.sites, cfg.scheme);
  const u64 modulus = cfg.modulus ? *cfg.modulus : derive_modulus(db.size());
  if (modulus_out) *modulus_out = modulus;
  const SessionConfig sc =
      session_config_for(cfg, modulus, item_universe_of(db));
  return run_session_inproc(sc, parts);
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    MiningResult result;
    u64 modulus = 0;

    if (cfg.transport == TransportKind::Tcp && cfg.role == Role::Mixer) {
      const auto [host, port] = split_host_port(cfg.mixer_addr);
      (void)host;  // the mixer binds locally
      MetricsRecorder rec;
      TcpListener listener(port, cfg.sites, &rec);
      auto ep = listener.accept_sites();
      MixerSetup setup{cfg.sites, cfg.bit_length,
                       SessionConfig::default_channel_secret()};
      result.metrics = run_mixer_role(setup, *ep, rec);
      ep->close();
      out << "mixer: session complete (metrics only; the mixer learns no "
             "counts)\n";
      if (!cfg.report_path.empty()) {
        std::ofstream f(cfg.report_path);
        f << build_report_json(cfg, result, 0, iso_timestamp());
      }
      return 0;
    }

    if (cfg.transport == TransportKind::Tcp && cfg.role == Role::Site) {
      if (cfg.site_index < 1 || cfg.site_index > cfg.sites)
        raise(Errc::BadConfig, "site role needs --site-index in [1, N]");
      const TransactionDB db = load_dataset(cfg.dataset_path);
      const std::vector<TransactionDB> parts =
          partition(db, cfg.sites, cfg.scheme);
      modulus = cfg.modulus ? *cfg.modulus : derive_modulus(db.size());
      const SessionConfig sc =
          session_config_for(cfg, modulus, item_universe_of(db));
      validate_session(sc, parts);
      const auto [host, port] = split_host_port(cfg.mixer_addr);
      MetricsRecorder rec;
      auto ep = tcp_connect(host, port, cfg.site_index, &rec);
      result = run_site_role(sc, cfg.site_index, parts[cfg.site_index - 1],
                             *ep, rec);
      ep->close();
    } else if (cfg.transport == TransportKind::Tcp) {
      // whole session over loopback TCP in this process
      const TransactionDB db = load_dataset(cfg.dataset_path);
      const std::vector<TransactionDB> parts =
          partition(db, cfg.sites, cfg.scheme);
      modulus = cfg.modulus ? *cfg.modulus : derive_modulus(db.size());
      const SessionConfig sc =
          session_config_for(cfg, modulus, item_universe_of(db));
      const auto [host, port] = split_host_port(cfg.mixer_addr);
      (void)host;
      result = run_session_tcp_loopback(sc, parts, port);
    } else {
      result = run_inproc_pipeline(cfg, &modulus);
    }

    print_report(out, cfg, result, modulus);
    if (!cfg.report_path.empty()) {
      std::ofstream f(cfg.report_path);
      if (!f) raise(Errc::IoFailure, "cannot write " + cfg.report_path);
      f << build_report_json(cfg, result, modulus, iso_timestamp());
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace mixmine
