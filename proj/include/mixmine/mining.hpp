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

#ifndef MIXMINE_MINING_HPP
#define MIXMINE_MINING_HPP

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "mixmine/securesum.hpp"

namespace mixmine {

using ItemId = std::uint32_t;

/// Canonical itemset: strictly increasing item ids. Ordering is plain
/// lexicographic over the id sequence; that order defines the wire index
/// of every candidate.
struct Itemset {
  std::vector<ItemId> items;

  std::size_t size() const { return items.size(); }
  bool contains(const Itemset& sub) const;

  auto operator<=>(const Itemset&) const = default;
};

/// Canonicalizes arbitrary input: sorts and removes duplicates.
Itemset make_itemset(std::vector<ItemId> raw);

struct ItemsetHash {
  std::size_t operator()(const Itemset& s) const noexcept;
};

struct TransactionDB {
  std::vector<Itemset> transactions;

  std::size_t size() const { return transactions.size(); }
};

struct CandidateSet {
  unsigned k = 0;
  std::vector<Itemset> candidates;  // lexicographically sorted
};

struct FrequentEntry {
  Itemset itemset;
  u64 count = 0;

  bool operator==(const FrequentEntry&) const = default;
};

struct FrequentSet {
  unsigned k = 0;
  std::vector<FrequentEntry> entries;  // lexicographically sorted

  bool operator==(const FrequentSet&) const = default;
};

struct Rule {
  Itemset antecedent;
  Itemset consequent;
  double support = 0.0;
  double confidence = 0.0;

  bool operator==(const Rule&) const = default;
};

/// Minimum absolute count for a fraction threshold: ceil(frac * total),
/// evaluated with a 1e-9 guard so that e.g. 0.2 * 10 lands on 2 rather
/// than 3 when the product rounds a hair above the integer.
u64 support_threshold(double frac, u64 total);

/// Apriori join: pairs of (k-1)-itemsets sharing their first k-2 items
/// produce one k-itemset. Output sorted, duplicate-free.
std::vector<Itemset> apriori_join(const FrequentSet& prev);

/// Drops every joined itemset with an infrequent (k-1)-subset.
CandidateSet apriori_prune(const std::vector<Itemset>& joined,
                           const FrequentSet& prev);

/// counts[j] = transactions containing candidates[j], aligned to candidate
/// order.
std::vector<u64> count_supports(const TransactionDB& db,
                                const CandidateSet& cands);

/// Keeps candidate j iff global_counts[j] >= support_threshold(minsup,
/// total_size). Throws AlignmentMismatch when the vectors disagree.
FrequentSet compute_frequent(const CandidateSet& cands,
                             std::span<const u64> global_counts,
                             u64 total_size, double minsup);

/// All rules X => Z\X over every frequent Z with |Z| >= 2 whose confidence
/// count(Z)/count(X) meets minconf. Requires downward-closed input (every
/// subset present with its count); throws MissingSubsetCount otherwise.
/// Emission order: frequent sets in the given order, entries in order,
/// antecedents by increasing bitmask over the itemset.
std::vector<Rule> generate_rules(std::span<const FrequentSet> all_frequent,
                                 u64 total_size, double minconf);

/// C_1: one singleton per universe item, sorted.
CandidateSet singleton_candidates(std::span<const ItemId> universe);

/// Centralized Apriori driven to fixpoint; the plaintext equivalent of one
/// full protocol session.
std::vector<FrequentSet> apriori_fixpoint(const TransactionDB& db,
                                          std::span<const ItemId> universe,
                                          double minsup);

}  // namespace mixmine

#endif  // MIXMINE_MINING_HPP
