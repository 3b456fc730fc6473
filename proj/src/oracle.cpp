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

#include "mixmine/oracle.hpp"

#include <algorithm>
#include <bit>
#include <set>

namespace mixmine {

std::vector<FrequentSet> OracleResult::grouped() const {
  std::vector<FrequentSet> out;
  for (const auto& [itemset, count] : frequents) {
    const unsigned k = static_cast<unsigned>(itemset.size());
    auto it = std::find_if(out.begin(), out.end(),
                           [k](const FrequentSet& fs) { return fs.k == k; });
    if (it == out.end()) {
      out.push_back(FrequentSet{k, {}});
      it = out.end() - 1;
    }
    it->entries.push_back(FrequentEntry{itemset, count});
  }
  std::sort(out.begin(), out.end(),
            [](const FrequentSet& a, const FrequentSet& b) { return a.k < b.k; });
  for (FrequentSet& fs : out)
    std::sort(fs.entries.begin(), fs.entries.end(),
              [](const FrequentEntry& a, const FrequentEntry& b) {
                return a.itemset < b.itemset;
              });
  return out;
}

OracleResult brute_force_frequent(const TransactionDB& db, double minsup,
                                  double minconf,
                                  std::span<const ItemId> universe) {
  std::vector<ItemId> items(universe.begin(), universe.end());
  if (items.empty()) {
    std::set<ItemId> seen;
    for (const Itemset& t : db.transactions)
      seen.insert(t.items.begin(), t.items.end());
    items.assign(seen.begin(), seen.end());
  } else {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
  }
  if (items.size() > 20)
    raise(Errc::UniverseTooLarge,
          std::to_string(items.size()) + " items exceed the 2^20 subset bound");

  const unsigned m = static_cast<unsigned>(items.size());
  // transactions as bitmasks over the universe
  std::vector<std::uint32_t> tx_masks;
  tx_masks.reserve(db.size());
  for (const Itemset& t : db.transactions) {
    std::uint32_t mask = 0;
    for (unsigned b = 0; b < m; ++b)
      if (std::binary_search(t.items.begin(), t.items.end(), items[b]))
        mask |= (1u << b);
    tx_masks.push_back(mask);
  }

  const u64 threshold = support_threshold(minsup, db.size());
  OracleResult result;
  if (m > 0) {
    for (std::uint32_t subset = 1; subset < (1u << m); ++subset) {
      u64 count = 0;
      for (std::uint32_t tx : tx_masks)
        if ((tx & subset) == subset) ++count;
      if (count >= threshold) {
        Itemset s;
        for (unsigned b = 0; b < m; ++b)
          if (subset & (1u << b)) s.items.push_back(items[b]);
        result.frequents.emplace(std::move(s), count);
      }
    }
  }

  const std::vector<FrequentSet> grouped = result.grouped();
  result.rules = generate_rules(grouped, db.size(), minconf);
  return result;
}

TransactionDB merge_partitions(std::span<const TransactionDB> dbs) {
  TransactionDB merged;
  for (const TransactionDB& db : dbs)
    merged.transactions.insert(merged.transactions.end(),
                               db.transactions.begin(), db.transactions.end());
  return merged;
}

}  // namespace mixmine
