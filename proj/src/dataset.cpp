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

#include "mixmine/dataset.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

namespace mixmine {

TransactionDB parse_dataset(const std::string& text) {
  TransactionDB db;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<ItemId> items;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos])))
        ++pos;
      if (pos >= line.size()) break;
      std::size_t end = pos;
      while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end])))
        ++end;
      ItemId id = 0;
      const auto [ptr, ec] =
          std::from_chars(line.data() + pos, line.data() + end, id);
      if (ec != std::errc() || ptr != line.data() + end)
        raise(Errc::ParseError,
              "line " + std::to_string(line_no) + ": '" +
                  line.substr(pos, end - pos) + "' is not an item id");
      items.push_back(id);
      pos = end;
    }
    if (!items.empty()) db.transactions.push_back(make_itemset(std::move(items)));
  }
  if (db.transactions.empty())
    raise(Errc::EmptyDataset, "no transactions found");
  return db;
}

TransactionDB load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    raise(Errc::ParseError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str());
}

std::vector<TransactionDB> partition(const TransactionDB& db, unsigned n,
                                     PartitionScheme scheme) {
  if (n < 3)
    raise(Errc::TooFewSites,
          "need at least 3 partitions, got " + std::to_string(n));
  std::vector<TransactionDB> parts(n);
  const std::size_t total = db.size();
  if (scheme == PartitionScheme::RoundRobin) {
    for (std::size_t i = 0; i < total; ++i)
      parts[i % n].transactions.push_back(db.transactions[i]);
  } else {
    // contiguous blocks, the first (total % n) of them one longer
    const std::size_t base = total / n;
    const std::size_t extra = total % n;
    std::size_t offset = 0;
    for (unsigned p = 0; p < n; ++p) {
      const std::size_t len = base + (p < extra ? 1 : 0);
      parts[p].transactions.assign(
          db.transactions.begin() + static_cast<std::ptrdiff_t>(offset),
          db.transactions.begin() + static_cast<std::ptrdiff_t>(offset + len));
      offset += len;
    }
  }
  return parts;
}

u64 derive_modulus(u64 total_transactions) {
  u64 candidate = total_transactions + 1;
  if (candidate < 2) candidate = 2;
  while (!is_prime(candidate)) ++candidate;
  return candidate;
}

std::vector<ItemId> item_universe_of(const TransactionDB& db) {
  std::set<ItemId> seen;
  for (const Itemset& t : db.transactions)
    seen.insert(t.items.begin(), t.items.end());
  return std::vector<ItemId>(seen.begin(), seen.end());
}

}  // namespace mixmine
