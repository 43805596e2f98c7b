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

#include <filesystem>
#include <fstream>

#include "mate/index.hpp"
#include "fixtures.hpp"
#include "random_corpus.hpp"

namespace mate {
namespace {

namespace fs = std::filesystem;

Index people_index(HasherKind kind = HasherKind::kXash, std::size_t bits = 128) {
  Catalog cat;
  cat.add_table("people", testing::people_table());
  cat.add_table("decoy", testing::decoy_table());
  auto config = HasherConfig::for_corpus(kind, bits, cat.stats());
  return Index::build(std::move(cat), config);
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("mate_index_test_" + name);
  fs::remove_all(dir);
  return dir;
}

TEST(Index, LookupReturnsSortedPostings) {
  Index idx = people_index();
  auto pl = idx.lookup(normalize_value("Muhammad"));
  ASSERT_EQ(pl.items.size(), 4u);
  EXPECT_EQ(pl.items[0], (PostingItem{0, 0, 1}));
  EXPECT_EQ(pl.items[1], (PostingItem{0, 0, 4}));
  EXPECT_EQ(pl.items[2], (PostingItem{0, 0, 5}));
  EXPECT_EQ(pl.items[3], (PostingItem{1, 1, 0}));
  EXPECT_TRUE(idx.lookup(normalize_value("nobody")).items.empty());
}

TEST(Index, SuperKeyCoversEveryCell) {
  Index idx = people_index();
  const Table& t = idx.catalog().table(0);
  for (RowId r = 0; r < t.n_rows(); ++r) {
    for (const auto& v : idx.catalog().get_row(0, r)) {
      EXPECT_TRUE(idx.super_key(0, r).covers(idx.hasher().hash(v)));
    }
  }
  EXPECT_THROW(idx.super_key(0, 99), Error);
  EXPECT_THROW(idx.super_key(9, 0), Error);
}

TEST(Index, InsertRowIsVisible) {
  Index idx = people_index();
  idx.apply_edit(edit::InsertRow{0, {"Grace", "Hopper", "US", "Admiral"}});
  auto pl = idx.lookup(normalize_value("hopper"));
  ASSERT_EQ(pl.items.size(), 1u);
  EXPECT_EQ(pl.items[0], (PostingItem{0, 1, 8}));
  EXPECT_EQ(idx.lookup(normalize_value("US")).items.size(), 3u);
}

TEST(Index, FailedEditChangesNothing) {
  Index idx = people_index();
  const auto before = idx.posting_count();
  EXPECT_THROW(idx.apply_edit(edit::InsertRow{0, {"a", "b", "c", "d", "e"}}), Error);
  EXPECT_THROW(idx.apply_edit(edit::AddColumn{0, "x", {"1"}}), Error);
  EXPECT_THROW(idx.apply_edit(edit::UpdateCell{0, 50, 0, "x"}), Error);
  EXPECT_THROW(idx.apply_edit(edit::DeleteTable{7}), Error);
  EXPECT_EQ(idx.posting_count(), before);
  EXPECT_FALSE(index_difference(idx, people_index()).has_value());
}

TEST(Index, DeleteRowRemovesPostings) {
  Index idx = people_index();
  idx.apply_edit(edit::DeleteRow{0, 4});
  EXPECT_EQ(idx.lookup(normalize_value("ali")).items.size(), 0u);
  EXPECT_THROW(idx.super_key(0, 4), Error);
  EXPECT_THROW(idx.apply_edit(edit::DeleteRow{0, 4}), Error);
}

TEST(Index, EditsMatchRebuild) {
  for (uint64_t seed = 0; seed < 25; ++seed) {
    testing::RandomCorpus gen(seed);
    Catalog cat = gen.catalog(5, 8, 4);
    for (auto kind : {HasherKind::kXash, HasherKind::kBloom}) {
      auto config = HasherConfig::for_corpus(kind, 128, cat.stats());
      Index idx = Index::build(cat, config);
      for (int step = 0; step < 12; ++step) {
        Edit e = gen.edit(idx.catalog());
        idx.apply_edit(e);
        Index fresh = Index::build(idx.catalog(), config);
        auto diff = index_difference(idx, fresh);
        ASSERT_FALSE(diff.has_value()) << "seed " << seed << " step " << step << " "
                                       << edit_name(e) << ": " << *diff;
      }
    }
  }
}

TEST(Index, EditJsonRoundTrip) {
  std::vector<Edit> edits = {
      edit::InsertTable{"n", {"a", "b"}, {{"1", "2"}}}, edit::InsertRow{0, {"x", "y"}},
      edit::AddColumn{0, "z", {"1", "2"}},              edit::UpdateCell{0, 1, 2, "v"},
      edit::DeleteTable{3},                             edit::DeleteRow{1, 2},
      edit::DeleteColumn{1, 0}};
  for (const auto& e : edits) {
    EXPECT_EQ(to_json(parse_edit(to_json(e))), to_json(e));
  }
  EXPECT_THROW(parse_edit(nlohmann::json{{"op", "explode"}}), Error);
  EXPECT_THROW(parse_edit(nlohmann::json{{"op", "delete_row"}}), Error);
}

TEST(Index, SaveLoadRoundTrip) {
  for (auto kind : {HasherKind::kXash, HasherKind::kBloom, HasherKind::kLessHashingBloom,
                    HasherKind::kHashTable, HasherKind::kUniform}) {
    Index idx = people_index(kind, 256);
    idx.apply_edit(edit::DeleteColumn{0, 3});
    idx.apply_edit(edit::DeleteRow{1, 0});
    auto dir = scratch("rt");
    idx.save(dir);
    Index back = Index::load(dir);
    auto diff = index_difference(idx, back);
    EXPECT_FALSE(diff.has_value()) << to_token(kind) << ": " << *diff;
    EXPECT_EQ(back.config().hash_count, idx.config().hash_count);
    fs::remove_all(dir);
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

TEST(Index, SaveIsByteIdentical) {
  auto a = scratch("a");
  auto b = scratch("b");
  people_index().save(a);
  people_index().save(b);
  for (const char* f : {"manifest.json", "catalog.jsonl", "terms.bin", "postings.bin",
                        "superkeys.bin", "tables/0.json", "tables/1.json"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Index, CorruptionIsDetected) {
  auto dir = scratch("corrupt");
  people_index().save(dir);
  std::string bytes = slurp(dir / "postings.bin");
  bytes[bytes.size() / 2] ^= 0x5A;
  std::ofstream(dir / "postings.bin", std::ios::binary) << bytes;
  try {
    Index::load(dir);
    FAIL() << "corruption not detected";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kChecksum);
  }
  fs::remove_all(dir);
}

TEST(Index, RankingMismatchIsIncompatible) {
  Catalog cat;
  cat.add_table("people", testing::people_table());
  auto config = HasherConfig::for_corpus(HasherKind::kXash, 128, cat.stats());
  config.ranking = xash::FrequencyRanking::from_order("0123456789abcdefghijklmnopqrstuvwxyz ");
  auto dir = scratch("ranking");
  Index::build(std::move(cat), config).save(dir);
  try {
    Index::load(dir);
    FAIL() << "ranking mismatch not detected";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kCompatibility);
  }
  EXPECT_NO_THROW(Index::load(dir, config.ranking));
  fs::remove_all(dir);
}

}  // namespace
}  // namespace mate
