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

#include "mixmine/mining.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace mixmine {

bool Itemset::contains(const Itemset& sub) const {
  // both vectors strictly increasing
  auto it = items.begin();
  for (ItemId want : sub.items) {
    it = std::lower_bound(it, items.end(), want);
    if (it == items.end() || *it != want) return false;
    ++it;
  }
  return true;
}

Itemset make_itemset(std::vector<ItemId> raw) {
  std::sort(raw.begin(), raw.end());
  raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
  return Itemset{std::move(raw)};
}

std::size_t ItemsetHash::operator()(const Itemset& s) const noexcept {
  std::size_t h = 1469598103934665603ull;  // FNV-1a
  for (ItemId id : s.items) {
    h ^= id;
    h *= 1099511628211ull;
  }
  return h;
}

u64 support_threshold(double frac, u64 total) {
  if (frac <= 0.0) return 0;
  const double t = std::ceil(frac * static_cast<double>(total) - 1e-9);
  if (t <= 0.0) return 0;
  return static_cast<u64>(t);
}

std::vector<Itemset> apriori_join(const FrequentSet& prev) {
  std::vector<Itemset> out;
  const auto& entries = prev.entries;
  const std::size_t k1 = prev.k;  // size of the inputs
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (std::size_t j = i + 1; j < entries.size(); ++j) {
      const auto& a = entries[i].itemset.items;
      const auto& b = entries[j].itemset.items;
      // sorted input: once prefixes diverge, later j cannot match either
      if (k1 >= 1 &&
          !std::equal(a.begin(), a.end() - 1, b.begin(), b.end() - 1))
        break;
      Itemset joined;
      joined.items.assign(a.begin(), a.end());
      joined.items.push_back(b.back());
      out.push_back(std::move(joined));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CandidateSet apriori_prune(const std::vector<Itemset>& joined,
                           const FrequentSet& prev) {
  std::unordered_set<Itemset, ItemsetHash> frequent;
  frequent.reserve(prev.entries.size());
  for (const auto& e : prev.entries) frequent.insert(e.itemset);

  CandidateSet out;
  out.k = prev.k + 1;
  for (const Itemset& cand : joined) {
    bool keep = true;
    Itemset sub;
    sub.items.resize(cand.items.size() - 1);
    for (std::size_t drop = 0; drop < cand.items.size(); ++drop) {
      std::size_t w = 0;
      for (std::size_t r = 0; r < cand.items.size(); ++r)
        if (r != drop) sub.items[w++] = cand.items[r];
      if (!frequent.count(sub)) {
        keep = false;
        break;
      }
    }
    if (keep) out.candidates.push_back(cand);
  }
  return out;
}

std::vector<u64> count_supports(const TransactionDB& db,
                                const CandidateSet& cands) {
  std::vector<u64> counts(cands.candidates.size(), 0);
  for (const Itemset& t : db.transactions) {
    for (std::size_t j = 0; j < cands.candidates.size(); ++j) {
      if (t.contains(cands.candidates[j])) ++counts[j];
    }
  }
  return counts;
}

FrequentSet compute_frequent(const CandidateSet& cands,
                             std::span<const u64> global_counts,
                             u64 total_size, double minsup) {
  if (global_counts.size() != cands.candidates.size())
    raise(Errc::AlignmentMismatch,
          "count vector length " + std::to_string(global_counts.size()) +
              " vs " + std::to_string(cands.candidates.size()) + " candidates");
  const u64 threshold = support_threshold(minsup, total_size);
  FrequentSet out;
  out.k = cands.k;
  for (std::size_t j = 0; j < cands.candidates.size(); ++j) {
    if (global_counts[j] >= threshold)
      out.entries.push_back(FrequentEntry{cands.candidates[j], global_counts[j]});
  }
  return out;
}

std::vector<Rule> generate_rules(std::span<const FrequentSet> all_frequent,
                                 u64 total_size, double minconf) {
  std::unordered_map<Itemset, u64, ItemsetHash> counts;
  for (const FrequentSet& fs : all_frequent)
    for (const FrequentEntry& e : fs.entries) counts.emplace(e.itemset, e.count);

  std::vector<Rule> rules;
  for (const FrequentSet& fs : all_frequent) {
    if (fs.k < 2) continue;
    for (const FrequentEntry& e : fs.entries) {
      const auto& z = e.itemset.items;
      const unsigned n = static_cast<unsigned>(z.size());
      for (std::uint32_t sel = 1; sel + 1 < (1u << n); ++sel) {
        Rule rule;
        for (unsigned b = 0; b < n; ++b) {
          if (sel & (1u << b))
            rule.antecedent.items.push_back(z[b]);
          else
            rule.consequent.items.push_back(z[b]);
        }
        auto it = counts.find(rule.antecedent);
        if (it == counts.end())
          raise(Errc::MissingSubsetCount,
                "frequent sets are not downward closed");
        const u64 antecedent_count = it->second;
        if (antecedent_count == 0) continue;  // confidence undefined
        if (e.count < support_threshold(minconf, antecedent_count)) continue;
        rule.support =
            static_cast<double>(e.count) / static_cast<double>(total_size);
        rule.confidence = static_cast<double>(e.count) /
                          static_cast<double>(antecedent_count);
        rules.push_back(std::move(rule));
      }
    }
  }
  return rules;
}

CandidateSet singleton_candidates(std::span<const ItemId> universe) {
  std::vector<ItemId> ids(universe.begin(), universe.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  CandidateSet out;
  out.k = 1;
  for (ItemId id : ids) out.candidates.push_back(Itemset{{id}});
  return out;
}

std::vector<FrequentSet> apriori_fixpoint(const TransactionDB& db,
                                          std::span<const ItemId> universe,
                                          double minsup) {
  std::vector<FrequentSet> result;
  CandidateSet cands = singleton_candidates(universe);
  while (!cands.candidates.empty()) {
    const std::vector<u64> counts = count_supports(db, cands);
    FrequentSet fs = compute_frequent(cands, counts, db.size(), minsup);
    if (fs.entries.empty()) break;
    cands = apriori_prune(apriori_join(fs), fs);
    result.push_back(std::move(fs));
  }
  return result;
}

}  // namespace mixmine
