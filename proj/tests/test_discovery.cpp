// Copyright 2026 The mate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include "mate/discovery.hpp"
#include "fixtures.hpp"
#include "random_corpus.hpp"

namespace mate {
namespace {

Index people_index(HasherKind kind = HasherKind::kXash) {
  Catalog cat;
  cat.add_table("people", testing::people_table());
  cat.add_table("decoy", testing::decoy_table());
  auto config = HasherConfig::for_corpus(kind, 128, cat.stats());
  return Index::build(std::move(cat), config);
}

TEST(Discovery, PeopleExampleTopOne) {
  Index idx = people_index();
  for (Mode mode : {Mode::kMate, Mode::kScr, Mode::kMcr}) {
    DiscoveryOptions opt;
    opt.mode = mode;
    auto run = discover_topk(testing::people_key(1), idx, opt);
    ASSERT_EQ(run.results.size(), 1u) << to_token(mode);
    EXPECT_EQ(run.results[0].table_id, 0u);
    EXPECT_EQ(run.results[0].score, 5u);
    EXPECT_EQ(run.results[0].mapping, (std::vector<ColumnId>{0, 1, 2}));
  }
}

TEST(Discovery, DecoyNeverJoins) {
  Index idx = people_index();
  auto run = discover_topk(testing::people_key(10), idx);
  ASSERT_EQ(run.results.size(), 1u);
  EXPECT_EQ(run.results[0].table_id, 0u);
}

TEST(Discovery, ReversedMappingScoresZero) {
  Catalog cat;
  cat.add_table("people", testing::people_table());
  QueryKey q = testing::people_key();
  PreparedQuery prepared(q, cat.dictionary());
  const Table& t = cat.table(0);
  std::vector<CandidatePair> pairs;
  for (uint32_t qr = 0; qr < prepared.rows(); ++qr) {
    for (RowId r = 0; r < t.n_rows(); ++r) pairs.push_back({qr, r});
  }
  auto score = joinability(prepared, t, pairs);
  EXPECT_EQ(score.score, 5u);
  EXPECT_EQ(score.mapping, (std::vector<ColumnId>{0, 1, 2}));

  // Key given as (last name, first name, country) still finds the swap.
  QueryKey swapped{q.table, {1, 0, 2}, 1};
  PreparedQuery sp(swapped, cat.dictionary());
  auto s2 = joinability(sp, t, pairs);
  EXPECT_EQ(s2.score, 5u);
  EXPECT_EQ(s2.mapping, (std::vector<ColumnId>{1, 0, 2}));
}

TEST(Discovery, ToyHashesFromTheFilterExample) {
  auto h = [](const char* s) { return BitArray::from_string(s); };
  const BitArray muhammad = h("01001000"), lee = h("01100000"), us = h("00010100"),
                 ali = h("00010001"), germany = h("10001001"), dancer = h("10000010"),
                 boxer = h("10000001"), birder = h("00001001");
  const BitArray row1 = muhammad | lee | us | dancer;
  const BitArray row4 = muhammad | ali | us | boxer;
  const BitArray row5 = muhammad | lee | germany | birder;
  EXPECT_EQ(row1.to_string(), "11111110");
  EXPECT_EQ(row4.to_string(), "11011101");
  EXPECT_EQ(row5.to_string(), "11101001");
  const BitArray key = muhammad | lee | us;
  EXPECT_EQ(key.to_string(), "01111100");
  EXPECT_TRUE(mask_covers(key, row1));
  EXPECT_FALSE(mask_covers(key, row4));
  EXPECT_FALSE(mask_covers(key, row5));
}

TEST(Discovery, TopKOrdering) {
  TopK top(2);
  top.offer({5, 3, {}});
  top.offer({2, 3, {}});
  top.offer({9, 0, {}});
  EXPECT_TRUE(top.full());
  top.offer({1, 1, {}});
  top.offer({7, 4, {}});
  ASSERT_EQ(top.entries().size(), 2u);
  EXPECT_EQ(top.entries()[0].table_id, 7u);
  EXPECT_EQ(top.entries()[1].table_id, 2u);
  EXPECT_EQ(top.threshold(), 3u);
}

TEST(Discovery, PruningRules) {
  TopK top(1);
  EXPECT_FALSE(prune_table_rule1(1, top));
  top.offer({0, 4, {}});
  EXPECT_TRUE(prune_table_rule1(4, top));
  EXPECT_FALSE(prune_table_rule1(5, top));
  EXPECT_TRUE(prune_table_rule2(10, 6, 0, top));
  EXPECT_FALSE(prune_table_rule2(10, 6, 1, top));
}

TEST(Discovery, MappingCount) {
  EXPECT_EQ(mapping_count(10, 3), 120u);
  EXPECT_EQ(mapping_count(2, 3), 0u);
}

TEST(Discovery, InitialColumnStrategies) {
  Index idx = people_index();
  RawTable q = testing::people_query();
  const std::vector<std::size_t> key{0, 1, 2};
  EXPECT_EQ(select_initial_column(q, key, InitialColumnStrategy::kColumnOrder), 0u);
  EXPECT_EQ(select_initial_column(q, key, InitialColumnStrategy::kMinCardinality), 0u);
  EXPECT_EQ(select_initial_column(q, key, InitialColumnStrategy::kLongestString), 0u);
  // First names fetch 10 posting items, last names 9, countries 7.
  EXPECT_EQ(fetched_posting_count(q, 0, idx), 10u);
  EXPECT_EQ(select_initial_column(q, key, InitialColumnStrategy::kWorst, &idx), 0u);
  EXPECT_EQ(select_initial_column(q, key, InitialColumnStrategy::kBest, &idx), 2u);
  EXPECT_THROW(select_initial_column(q, key, InitialColumnStrategy::kBest), Error);
}

TEST(Discovery, RejectsBadQueries) {
  Index idx = people_index();
  QueryKey q = testing::people_key(0);
  EXPECT_THROW(discover_topk(q, idx), Error);
  q.k = 1;
  q.columns = {0, 0};
  EXPECT_THROW(discover_topk(q, idx), Error);
  q.columns = {7};
  EXPECT_THROW(discover_topk(q, idx), Error);
}

TEST(Discovery, QueryHasherMustMatch) {
  Index idx = people_index();
  HasherConfig other = idx.config();
  other.kind = HasherKind::kBloom;
  DiscoveryOptions opt;
  opt.query_hasher = &other;
  try {
    discover_topk(testing::people_key(), idx, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kCompatibility);
  }
  opt.query_hasher = &idx.config();
  EXPECT_NO_THROW(discover_topk(testing::people_key(), idx, opt));
}

TEST(Discovery, JsonRecord) {
  Index idx = people_index();
  auto j = to_json(discover_topk(testing::people_key(), idx));
  EXPECT_EQ(j["mode"], "mate");
  EXPECT_EQ(j["results"][0]["j"], 5);
  EXPECT_EQ(j["TP"].get<std::size_t>() + j["FP"].get<std::size_t>(),
            j["rows_verified"].get<std::size_t>());
  EXPECT_GE(j["precision"].get<double>(), 0.0);
  EXPECT_LE(j["precision"].get<double>(), 1.0);
}

TEST(Discovery, RowPairSemanticsCountsDuplicates) {
  Catalog cat;
  cat.add_table("people", testing::people_table());
  QueryKey q = testing::people_key();
  q.table.rows.push_back(q.table.rows[0]);
  auto config = HasherConfig::for_corpus(HasherKind::kXash, 128, cat.stats());
  Index idx = Index::build(std::move(cat), config);
  DiscoveryOptions opt;
  EXPECT_EQ(discover_topk(q, idx, opt).results[0].score, 5u);
  opt.semantics = JoinSemantics::kRowPairs;
  EXPECT_EQ(discover_topk(q, idx, opt).results[0].score, 6u);
}

TEST(Discovery, AgreesWithBruteForce) {
  std::size_t nonempty = 0;
  for (uint64_t seed = 0; seed < 40; ++seed) {
    testing::RandomCorpus gen(seed);
    Catalog cat = gen.catalog(8, 12, 5);
    const std::size_t m = gen.uniform(1, 3);
    QueryKey q = gen.query(cat, m, gen.uniform(1, 8), gen.uniform(1, 4));
    auto expected = score_multiset(brute_force_topk(q, cat));
    if (!expected.empty()) ++nonempty;
    for (auto kind : {HasherKind::kXash, HasherKind::kBloom, HasherKind::kHashTable}) {
      Index idx = Index::build(cat, HasherConfig::for_corpus(kind, 128, cat.stats()));
      for (Mode mode : {Mode::kMate, Mode::kScr, Mode::kMcr}) {
        for (bool pruning : {true, false}) {
          DiscoveryOptions opt;
          opt.mode = mode;
          opt.pruning = pruning;
          auto got = score_multiset(discover_topk(q, idx, opt).results);
          ASSERT_EQ(got, expected) << "seed " << seed << " " << to_token(kind) << " "
                                   << to_token(mode) << " pruning " << pruning;
        }
      }
    }
  }
  EXPECT_GE(nonempty, 30u);
}

TEST(Discovery, BruteForceBudget) {
  Catalog cat;
  cat.add_table("people", testing::people_table());
  EXPECT_THROW(brute_force_topk(testing::people_key(), cat, 10), Error);
}

}  // namespace
}  // namespace mate
