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

#ifndef MIXMINE_DATASET_HPP
#define MIXMINE_DATASET_HPP

#include <filesystem>
#include <vector>

#include "mixmine/mining.hpp"

namespace mixmine {

/// FIMI-style text: one transaction per line, whitespace-separated item
/// ids, blank lines skipped, duplicates within a line collapsed.
TransactionDB load_dataset(const std::filesystem::path& path);

TransactionDB parse_dataset(const std::string& text);

enum class PartitionScheme { RoundRobin, Contiguous };

/// Splits into n >= 3 disjoint horizontal partitions covering the input.
std::vector<TransactionDB> partition(const TransactionDB& db, unsigned n,
                                     PartitionScheme scheme);

/// Smallest prime strictly greater than the total transaction count; every
/// global support count is bounded by it.
u64 derive_modulus(u64 total_transactions);

/// Distinct items of the database, sorted.
std::vector<ItemId> item_universe_of(const TransactionDB& db);

}  // namespace mixmine

#endif  // MIXMINE_DATASET_HPP
