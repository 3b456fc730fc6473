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

#ifndef MIXMINE_COSTMODEL_HPP
#define MIXMINE_COSTMODEL_HPP

#include <vector>

#include "mixmine/securesum.hpp"
#include "mixmine/transport.hpp"

namespace mixmine {

/// Analytic communication-cost parameters: N sites, H entries per
/// iteration, L bytes per list entry, K bytes per item, encryption
/// ratio phi.
struct CostParams {
  u64 sites = 0;       // N
  u64 entries = 0;     // H
  u64 entry_bytes = 2;  // L
  u64 item_bytes = 3;   // K
  double phi = 1.0;

  bool valid() const {
    return sites > 0 && entries > 0 && phi >= 1.0;
  }
};

/// Mixer-protocol payload per iteration: phi * H * N * (1 + L).
double payload_proposed(const CostParams& p);

/// Paillier-mixer payload per iteration: 2 * phi * N * H * K.
double payload_yizhang(const CostParams& p);

struct OpCounts {
  struct Side {
    int exponential_ops;
    int basic_ops;
    int key_bits;
  };
  Side proposed;
  Side yizhang;
};

/// Static operation/key-size comparison of the two schemes.
OpCounts op_counts();

/// One measured-vs-analytic row. H is the actual entry count of the
/// round, never an average. Header bytes stay itemized and are never
/// folded into the formula side.
struct ReconcileRow {
  std::uint32_t round = 0;
  u64 entry_count = 0;  // H for this round
  u64 measured_upload = 0;
  u64 measured_broadcast = 0;
  u64 upload_header_bytes = 0;
  u64 broadcast_header_bytes = 0;
  double analytic_upload = 0.0;     // phi * N * H * L
  double analytic_broadcast = 0.0;  // phi * H * N (the paper's 1-unit entries)
  double analytic_proposed = 0.0;   // phi * H * N * (1 + L)
  double analytic_yizhang = 0.0;    // 2 * phi * N * H * K
  double upload_deviation_pct = 0.0;
  double broadcast_deviation_pct = 0.0;
  double deviation_pct = 0.0;  // (upload+broadcast measured) vs proposed
};

/// Per-round reconciliation of measured inner payload against the
/// analytic formulas. `entry_bytes` (L) must be the masked-entry wire
/// width, ceil(l/8); `wire_overhead` the per-frame header+prefix bytes.
std::vector<ReconcileRow> reconcile(const ChannelMetrics& measured,
                                    unsigned site_count, double phi,
                                    u64 entry_bytes, u64 item_bytes,
                                    std::size_t wire_overhead);

}  // namespace mixmine

#endif  // MIXMINE_COSTMODEL_HPP
