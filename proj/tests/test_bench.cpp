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

#include "mate/bench.hpp"

namespace mate::bench {
namespace {

SyntheticSpec small_spec(uint64_t seed) {
  SyntheticSpec s = SyntheticSpec::defaults(seed);
  s.n_tables = {40, 40};
  s.rows_per_table = {10, 120};
  s.vocabulary.values_per_domain = 400;
  s.planted_joins.resize(4);
  return s;
}

TEST(Generator, DeterministicUnderSeed) {
  const auto a = generate(small_spec(3));
  const auto b = generate(small_spec(3));
  ASSERT_EQ(a.tables.size(), b.tables.size());
  for (std::size_t i = 0; i < a.tables.size(); ++i) EXPECT_EQ(a.tables[i].rows, b.tables[i].rows);
  EXPECT_EQ(a.queries.size(), 4u);
  const auto c = generate(small_spec(4));
  EXPECT_NE(a.tables[0].rows, c.tables[0].rows);
}

TEST(Generator, NonJoinableQueryFindsNothing) {
  auto s = small_spec(5);
  for (auto& p : s.planted_joins) p.joinable_fraction = 0.0;
  const auto g = generate(s);
  const Catalog cat = g.catalog();
  for (const auto& q : g.queries) EXPECT_TRUE(brute_force_topk(q, cat).empty());
}

TEST(Generator, PlantedScoreIsRecovered) {
  auto s = small_spec(6);
  s.planted_joins = {PlantedJoin{.query_rows = 20, .target_table = 7, .m = 2, .joinable_fraction = 0.25}};
  s.rows_per_table = {30, 60};
  const auto g = generate(s);
  ASSERT_EQ(g.truth.size(), 1u);
  EXPECT_EQ(g.truth[0].table_id, 7u);
  EXPECT_EQ(g.truth[0].true_j, 5u);
  const Index index = Index::build(g.catalog(), HasherConfig::for_corpus(HasherKind::kXash, 128,
                                                                         g.catalog().stats()));
  const auto run = discover_topk(g.queries[0], index);
  ASSERT_FALSE(run.results.empty());
  EXPECT_EQ(run.results[0].table_id, 7u);
  EXPECT_EQ(run.results[0].score, 5u);
}

TEST(Generator, RejectsUnrealizableSpec) {
  auto s = small_spec(1);
  s.cols_per_table = {1, 1};
  s.planted_joins[0].m = 3;
  EXPECT_THROW(s.validate(), Error);
}

TEST(Generator, SpecJsonRoundTrip) {
  const auto s = small_spec(9);
  EXPECT_EQ(to_json(spec_from_json(to_json(s))), to_json(s));
}

TEST(Analytic, SingleCharacterNeverHolds) {
  for (std::size_t bits : {128u, 256u, 512u}) {
    EXPECT_FALSE(analytic_collision_check(bits, 1).char_only_holds);
    EXPECT_TRUE(analytic_collision_check(bits, 10).char_only_holds);
  }
}

TEST(Bench, ReportIsReproducible) {
  BenchConfig config;
  config.corpus = small_spec(1);
  config.seeds = {1, 2};
  const auto a = run_bench(config).to_json().dump();
  const auto b = run_bench(config).to_json().dump();
  EXPECT_EQ(a, b);
}

TEST(Bench, HasherChoiceParsing) {
  const auto h = parse_hasher_choice("bf:256");
  EXPECT_EQ(h.kind, HasherKind::kBloom);
  EXPECT_EQ(h.bits, 256u);
  EXPECT_THROW(parse_hasher_choice("xash:100"), Error);
  EXPECT_THROW(parse_hasher_choice("nope"), Error);
}

}  // namespace
}  // namespace mate::bench
