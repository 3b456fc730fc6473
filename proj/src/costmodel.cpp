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

#include "mixmine/costmodel.hpp"

namespace mixmine {

double payload_proposed(const CostParams& p) {
  return p.phi * static_cast<double>(p.entries) *
         static_cast<double>(p.sites) *
         (1.0 + static_cast<double>(p.entry_bytes));
}

double payload_yizhang(const CostParams& p) {
  return 2.0 * p.phi * static_cast<double>(p.sites) *
         static_cast<double>(p.entries) * static_cast<double>(p.item_bytes);
}

OpCounts op_counts() {
  OpCounts c;
  c.proposed = OpCounts::Side{0, 4, 80};
  c.yizhang = OpCounts::Side{4, 13, 1024};
  return c;
}

namespace {

double deviation_pct(double measured, double analytic) {
  if (analytic == 0.0) return 0.0;
  return 100.0 * (measured - analytic) / analytic;
}

}  // namespace

std::vector<ReconcileRow> reconcile(const ChannelMetrics& measured,
                                    unsigned site_count, double phi,
                                    u64 entry_bytes, u64 item_bytes,
                                    std::size_t wire_overhead) {
  (void)wire_overhead;  // headers arrive pre-measured; kept for the report
  std::vector<ReconcileRow> rows;
  for (const auto& [round, traffic] : measured.rounds) {
    ReconcileRow row;
    row.round = round;
    row.entry_count = traffic.upload_entries;
    row.measured_upload = traffic.upload_payload_bytes;
    row.measured_broadcast = traffic.broadcast_payload_bytes;
    row.upload_header_bytes = traffic.upload_header_bytes;
    row.broadcast_header_bytes = traffic.broadcast_header_bytes;

    const CostParams p{site_count, traffic.upload_entries, entry_bytes,
                       item_bytes, phi};
    const double n = static_cast<double>(site_count);
    const double h = static_cast<double>(traffic.upload_entries);
    row.analytic_upload = phi * n * h * static_cast<double>(entry_bytes);
    row.analytic_broadcast = phi * h * n;
    row.analytic_proposed =
        traffic.upload_entries == 0 ? 0.0 : payload_proposed(p);
    row.analytic_yizhang =
        traffic.upload_entries == 0 ? 0.0 : payload_yizhang(p);
    row.upload_deviation_pct =
        deviation_pct(static_cast<double>(row.measured_upload),
                      row.analytic_upload);
    row.broadcast_deviation_pct =
        deviation_pct(static_cast<double>(row.measured_broadcast),
                      row.analytic_broadcast);
    row.deviation_pct = deviation_pct(
        static_cast<double>(row.measured_upload + row.measured_broadcast),
        row.analytic_proposed);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mixmine
