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
#include <map>
#include <random>

#include "doctest.h"

using namespace mixmine;

namespace {

Itemset set_of(std::initializer_list<ItemId> ids) {
  return make_itemset(std::vector<ItemId>(ids));
}

FrequentSet frequents_of(unsigned k,
                         std::initializer_list<Itemset> sets) {
  FrequentSet fs;
  fs.k = k;
  for (const Itemset& s : sets) fs.entries.push_back(FrequentEntry{s, 1});
  std::sort(fs.entries.begin(), fs.entries.end(),
            [](const FrequentEntry& a, const FrequentEntry& b) {
              return a.itemset < b.itemset;
            });
  return fs;
}

}  // namespace

TEST_CASE("make_itemset canonicalizes") {
  CHECK(make_itemset({3, 1, 2, 1}).items == std::vector<ItemId>{1, 2, 3});
  CHECK(set_of({2, 3}).contains(set_of({2})));
  CHECK(set_of({1, 2, 3}).contains(set_of({1, 3})));
  CHECK(!set_of({1, 3}).contains(set_of({2})));
  CHECK(set_of({1, 3}).contains(Itemset{}));
}

TEST_CASE("support_threshold") {
  CHECK(support_threshold(0.2, 10) == 2);
  CHECK(support_threshold(0.5, 3) == 2);
  CHECK(support_threshold(0.0, 10) == 0);
  CHECK(support_threshold(1.0, 10) == 10);
  CHECK(support_threshold(1.5, 10) == 15);  // above the db size: nothing passes
  CHECK(support_threshold(0.3, 10) == 3);
}

TEST_CASE("apriori_join") {
  SUBCASE("all pairs at k=2") {
    const FrequentSet l1 =
        frequents_of(1, {set_of({1}), set_of({2}), set_of({3})});
    const auto joined = apriori_join(l1);
    CHECK(joined == std::vector<Itemset>{set_of({1, 2}), set_of({1, 3}),
                                         set_of({2, 3})});
  }
  SUBCASE("single join at k=3") {
    const FrequentSet l2 = frequents_of(
        2, {set_of({1, 2}), set_of({1, 3}), set_of({2, 3})});
    CHECK(apriori_join(l2) == std::vector<Itemset>{set_of({1, 2, 3})});
  }
  SUBCASE("no shared prefix, no join") {
    const FrequentSet l2 = frequents_of(2, {set_of({1, 2}), set_of({3, 4})});
    CHECK(apriori_join(l2).empty());
  }
}

TEST_CASE("apriori_prune") {
  SUBCASE("keeps when all subsets frequent") {
    const FrequentSet l2 = frequents_of(
        2, {set_of({1, 2}), set_of({1, 3}), set_of({2, 3})});
    const CandidateSet pruned = apriori_prune({set_of({1, 2, 3})}, l2);
    CHECK(pruned.k == 3);
    CHECK(pruned.candidates == std::vector<Itemset>{set_of({1, 2, 3})});
  }
  SUBCASE("drops when a subset is missing") {
    const FrequentSet l2 = frequents_of(2, {set_of({1, 2}), set_of({1, 3})});
    CHECK(apriori_prune({set_of({1, 2, 3})}, l2).candidates.empty());
  }
  SUBCASE("matches exhaustive subset filtering on random inputs") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
      // random L2 over 8 items
      FrequentSet l2;
      l2.k = 2;
      for (ItemId a = 0; a < 8; ++a)
        for (ItemId b = a + 1; b < 8; ++b)
          if (rng() % 2) l2.entries.push_back(FrequentEntry{set_of({a, b}), 1});
      const auto joined = apriori_join(l2);
      const CandidateSet pruned = apriori_prune(joined, l2);

      // oracle: brute-force check of every (k-1)-subset
      std::vector<Itemset> expected;
      for (const Itemset& cand : joined) {
        bool ok = true;
        for (std::size_t drop = 0; drop < cand.items.size(); ++drop) {
          Itemset sub;
          for (std::size_t i = 0; i < cand.items.size(); ++i)
            if (i != drop) sub.items.push_back(cand.items[i]);
          ok = ok && std::any_of(l2.entries.begin(), l2.entries.end(),
                                 [&](const FrequentEntry& e) {
                                   return e.itemset == sub;
                                 });
        }
        if (ok) expected.push_back(cand);
      }
      CHECK(pruned.candidates == expected);
    }
  }
}

TEST_CASE("count_supports") {
  SUBCASE("empty db gives zeros") {
    const TransactionDB db;
    CandidateSet cands{1, {set_of({1}), set_of({2})}};
    CHECK(count_supports(db, cands) == std::vector<u64>{0, 0});
  }
  SUBCASE("hand-checked counts") {
    TransactionDB db;
    db.transactions = {set_of({1, 2}), set_of({1, 2, 3}), set_of({2, 3})};
    CandidateSet cands{2, {set_of({1, 2}), set_of({2, 3})}};
    CHECK(count_supports(db, cands) == std::vector<u64>{2, 2});
  }
  SUBCASE("item in every transaction counts the whole db") {
    TransactionDB db;
    db.transactions = {set_of({5, 1}), set_of({5}), set_of({5, 9})};
    CandidateSet cands{1, {set_of({5})}};
    CHECK(count_supports(db, cands) == std::vector<u64>{3});
  }
}

TEST_CASE("compute_frequent") {
  CandidateSet cands{1, {set_of({1}), set_of({2})}};
  SUBCASE("threshold arithmetic") {
    const std::vector<u64> counts{3, 1};
    const FrequentSet fs = compute_frequent(cands, counts, 10, 0.2);
    REQUIRE(fs.entries.size() == 1);
    CHECK(fs.entries[0].itemset == set_of({1}));
    CHECK(fs.entries[0].count == 3);
  }
  SUBCASE("minsup zero keeps everything") {
    const std::vector<u64> counts{0, 0};
    CHECK(compute_frequent(cands, counts, 10, 0.0).entries.size() == 2);
  }
  SUBCASE("alignment is checked") {
    const std::vector<u64> counts{1};
    try {
      compute_frequent(cands, counts, 10, 0.2);
      FAIL("expected AlignmentMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::AlignmentMismatch);
    }
  }
  SUBCASE("random instances match a direct filter") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
      CandidateSet cs{1, {}};
      std::vector<u64> counts;
      const u64 total = 1 + rng() % 100;
      for (ItemId i = 0; i < 10; ++i) {
        cs.candidates.push_back(set_of({i}));
        counts.push_back(rng() % (total + 1));
      }
      const double minsup = static_cast<double>(rng() % 100) / 100.0;
      const FrequentSet fs = compute_frequent(cs, counts, total, minsup);
      const u64 threshold = support_threshold(minsup, total);
      std::size_t expected = 0;
      for (u64 c : counts)
        if (c >= threshold) ++expected;
      CHECK(fs.entries.size() == expected);
    }
  }
}

TEST_CASE("generate_rules") {
  SUBCASE("direct application of the support/confidence formulas") {
    std::vector<FrequentSet> freq(3);
    freq[0] = FrequentSet{1, {{set_of({1}), 10}, {set_of({2}), 9}, {set_of({3}), 7}}};
    freq[1] = FrequentSet{2, {{set_of({1, 2}), 8}, {set_of({1, 3}), 5}, {set_of({2, 3}), 6}}};
    freq[2] = FrequentSet{3, {{set_of({1, 2, 3}), 4}}};
    const auto rules = generate_rules(freq, 20, 0.5);
    // the AB => C instance: support 4/20, confidence 4/8
    const auto it = std::find_if(rules.begin(), rules.end(), [](const Rule& r) {
      return r.antecedent == set_of({1, 2}) && r.consequent == set_of({3});
    });
    REQUIRE(it != rules.end());
    CHECK(it->support == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(it->confidence == doctest::Approx(0.5).epsilon(1e-12));
    // every emitted rule meets the threshold
    for (const Rule& r : rules) CHECK(r.confidence >= 0.5);
  }
  SUBCASE("minconf zero emits every split") {
    std::vector<FrequentSet> freq(2);
    freq[0] = FrequentSet{1, {{set_of({1}), 3}, {set_of({2}), 3}, {set_of({3}), 3}}};
    freq[1] = FrequentSet{3, {{set_of({1, 2, 3}), 2}}};
    // downward closure needs the pairs too
    freq.insert(freq.begin() + 1,
                FrequentSet{2, {{set_of({1, 2}), 2}, {set_of({1, 3}), 2},
                                {set_of({2, 3}), 2}}});
    const auto rules = generate_rules(freq, 10, 0.0);
    // 2^3-2 = 6 rules from the triple, 2 from each of the three pairs
    CHECK(rules.size() == 6 + 3 * 2);
  }
  SUBCASE("equal counts give confidence exactly one") {
    std::vector<FrequentSet> freq(2);
    freq[0] = FrequentSet{1, {{set_of({1}), 5}, {set_of({2}), 5}}};
    freq[1] = FrequentSet{2, {{set_of({1, 2}), 5}}};
    const auto rules = generate_rules(freq, 5, 1.0);
    REQUIRE(rules.size() == 2);
    CHECK(rules[0].confidence == 1.0);
    CHECK(rules[1].confidence == 1.0);
  }
  SUBCASE("violated closure is reported") {
    std::vector<FrequentSet> freq(1);
    freq[0] = FrequentSet{2, {{set_of({1, 2}), 5}}};
    try {
      generate_rules(freq, 5, 0.0);
      FAIL("expected MissingSubsetCount");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::MissingSubsetCount);
    }
  }
}

TEST_CASE("anti-monotonicity holds on mined output") {
  std::mt19937_64 rng(41);
  TransactionDB db;
  for (int t = 0; t < 300; ++t) {
    std::vector<ItemId> items;
    for (ItemId i = 0; i < 10; ++i)
      if (rng() % 3 == 0) items.push_back(i);
    if (!items.empty()) db.transactions.push_back(make_itemset(items));
  }
  std::vector<ItemId> universe;
  for (ItemId i = 0; i < 10; ++i) universe.push_back(i);
  const auto frequents = apriori_fixpoint(db, universe, 0.1);

  std::map<Itemset, u64> counts;
  for (const FrequentSet& fs : frequents)
    for (const FrequentEntry& e : fs.entries) counts[e.itemset] = e.count;
  for (const auto& [itemset, count] : counts) {
    for (const auto& [sub, sub_count] : counts) {
      if (itemset.contains(sub)) CHECK(count <= sub_count);
    }
  }
}

TEST_CASE("deterministic output order") {
  TransactionDB db;
  db.transactions = {set_of({1, 2, 3}), set_of({1, 2}), set_of({2, 3}),
                     set_of({1, 3}), set_of({1, 2, 3})};
  const std::vector<ItemId> universe{1, 2, 3};
  const auto a = apriori_fixpoint(db, universe, 0.4);
  const auto b = apriori_fixpoint(db, universe, 0.4);
  CHECK(a == b);
  for (const FrequentSet& fs : a)
    CHECK(std::is_sorted(fs.entries.begin(), fs.entries.end(),
                         [](const FrequentEntry& x, const FrequentEntry& y) {
                           return x.itemset < y.itemset;
                         }));
}
