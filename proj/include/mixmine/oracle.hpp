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

#ifndef MIXMINE_ORACLE_HPP
#define MIXMINE_ORACLE_HPP

#include <map>
#include <span>
#include <vector>

#include "mixmine/mining.hpp"

namespace mixmine {

/// Centralized plaintext ground truth. Exhaustive subset enumeration over
/// bitmask-encoded transactions; shares nothing with the Apriori
/// join/prune path so a bug cannot hide in both.
struct OracleResult {
  std::map<Itemset, u64> frequents;
  std::vector<Rule> rules;

  /// frequents regrouped by itemset size, ready for comparison against a
  /// protocol session's output.
  std::vector<FrequentSet> grouped() const;
};

/// Enumerates every nonempty subset of the item universe (at most 20
/// items, else UniverseTooLarge), keeps count >= ceil(minsup * size) and
/// derives rules with generate_rules. An empty `universe` means "the items
/// observed in db".
OracleResult brute_force_frequent(const TransactionDB& db, double minsup,
                                  double minconf,
                                  std::span<const ItemId> universe = {});

/// Concatenation preserving per-partition order.
TransactionDB merge_partitions(std::span<const TransactionDB> dbs);

}  // namespace mixmine

#endif  // MIXMINE_ORACLE_HPP
