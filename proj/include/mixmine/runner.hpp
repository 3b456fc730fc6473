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

#ifndef MIXMINE_RUNNER_HPP
#define MIXMINE_RUNNER_HPP

#include <iosfwd>
#include <optional>
#include <string>

#include "mixmine/dataset.hpp"
#include "mixmine/protocol.hpp"

namespace mixmine {

enum class TransportKind { InProc, Tcp };
enum class Role { All, Mixer, Site };

/// Operator-facing run description, one flag per field.
struct RunConfig {
  std::string dataset_path;
  unsigned sites = 0;
  double minsup = 0.0;
  double minconf = 0.0;
  std::string seed_hex;
  unsigned bit_length = 16;
  std::optional<u64> modulus;  // auto-derived when absent
  TransportKind transport = TransportKind::InProc;
  Role role = Role::All;          // tcp only: which entity this process is
  unsigned site_index = 0;        // tcp site role
  std::string mixer_addr = "127.0.0.1:9464";
  std::string report_path;
  PartitionScheme scheme = PartitionScheme::RoundRobin;
};

/// Full report as deterministic JSON (modulo the timestamp field). The
/// seed never appears in it.
std::string build_report_json(const RunConfig& cfg, const MiningResult& result,
                              u64 modulus, const std::string& timestamp);

/// Human-readable summary of the same content.
void print_report(std::ostream& out, const RunConfig& cfg,
                  const MiningResult& result, u64 modulus);

/// load -> partition -> derive rho -> run session -> write report.
/// Returns the process exit code; diagnostics go to the given stream.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// The in-process pipeline without the reporting, for tests.
MiningResult run_inproc_pipeline(const RunConfig& cfg, u64* modulus_out = nullptr);

}  // namespace mixmine

#endif  // MIXMINE_RUNNER_HPP
