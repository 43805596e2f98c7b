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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mate/bit_array.hpp"
#include "mate/corpus.hpp"
#include "mate/hashers.hpp"
#include "mate/index.hpp"

namespace mate {

/// A query table (not necessarily part of the corpus), its ordered composite
/// key columns, and the number of tables wanted.
struct QueryKey {
  RawTable table;
  std::vector<std::size_t> columns;
  std::size_t k = 10;

  /// Throws kInvalidInput on empty, repeated or out-of-range columns, or k == 0.
  void validate() const;
};

enum class Mode { kMate, kScr, kMcr };
enum class InitialColumnStrategy { kMinCardinality, kColumnOrder, kLongestString, kWorst, kBest };
/// Whether a mapping scores distinct key tuples or matching (query row,
/// candidate row) pairs.
enum class JoinSemantics { kDistinctTuples, kRowPairs };

std::string_view to_token(Mode mode);
Mode parse_mode(std::string_view token);
std::string_view to_token(InitialColumnStrategy s);
InitialColumnStrategy parse_strategy(std::string_view token);

/// Number of column subsets of size m out of n_cols: C(n_cols, m), 0 if m > n_cols.
uint64_t mapping_count(std::size_t n_cols, std::size_t m);

/// Position within `columns` is not returned; the result is a query column id.
/// kWorst and kBest need `index` (they count the posting items each column
/// would fetch). Ties go to the earlier column of `columns`.
std::size_t select_initial_column(const RawTable& query, const std::vector<std::size_t>& columns,
                                  InitialColumnStrategy strategy, const Index* index = nullptr);

/// Posting items fetched when `column` seeds candidate generation.
std::size_t fetched_posting_count(const RawTable& query, std::size_t column, const Index& index);

struct QueryRowKey {
  std::size_t query_row = 0;
  std::vector<std::string> key;  // normalized values, in key-column order
  BitArray super_key;
};

/// Initial-column value -> the query rows carrying it, each with the OR of the
/// hashes of exactly its key values.
using QuerySuperKeyMap = std::unordered_map<std::string, std::vector<QueryRowKey>>;

QuerySuperKeyMap build_query_superkey_map(const RawTable& query,
                                          const std::vector<std::size_t>& columns,
                                          std::size_t initial_column,
                                          const RowValueHasher& hasher);

/// True iff query | row == row.
inline bool mask_covers(const BitArray& query_key, const BitArray& row_key) {
  return row_key.covers(query_key);
}

struct RankedTable {
  TableId table_id = 0;
  std::size_t score = 0;                // joinability
  std::vector<ColumnId> mapping;        // candidate column per key column

  friend bool operator==(const RankedTable&, const RankedTable&) = default;
};

/// Bounded top-k, best first: higher score, then lower table id.
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) {}

  bool full() const noexcept { return entries_.size() == k_; }
  /// Score of the k-th table; only meaningful when full().
  std::size_t threshold() const { return entries_.back().score; }
  /// Keeps the entry if it ranks among the best k. Zero scores are dropped.
  void offer(RankedTable entry);
  const std::vector<RankedTable>& entries() const noexcept { return entries_; }

 private:
  std::size_t k_;
  std::vector<RankedTable> entries_;
};

/// Table pruning: stop the whole scan once a table's posting count cannot
/// beat the current k-th score (tables arrive sorted by posting count).
bool prune_table_rule1(std::size_t postings_in_table, const TopK& state);
/// Skip the rest of a table once even all-remaining-match cannot beat it.
bool prune_table_rule2(std::size_t postings_in_table, std::size_t checked, std::size_t matched,
                       const TopK& state);

/// Query key values resolved against a corpus dictionary.
class PreparedQuery {
 public:
  PreparedQuery(const QueryKey& query, const Dictionary& dict);

  std::size_t rows() const noexcept { return keys_.size(); }
  std::size_t width() const noexcept { return width_; }
  /// kNoValue for values that never occur in the corpus.
  const std::vector<ValueId>& key(std::size_t row) const { return keys_[row]; }
  /// Rows with equal normalized key tuples share an id.
  uint32_t tuple_id(std::size_t row) const { return tuple_ids_[row]; }
  std::size_t distinct_tuples() const noexcept { return distinct_; }

 private:
  std::size_t width_ = 0;
  std::vector<std::vector<ValueId>> keys_;
  std::vector<uint32_t> tuple_ids_;
  std::size_t distinct_ = 0;
};

struct CandidatePair {
  uint32_t query_row = 0;
  RowId candidate_row = 0;

  friend auto operator<=>(const CandidatePair&, const CandidatePair&) = default;
};

struct JoinScore {
  std::size_t score = 0;
  std::vector<ColumnId> mapping;
  std::size_t pairs_verified = 0;
  std::size_t pairs_matched = 0;  // pairs matching under at least one mapping
};

/// Exact joinability of one candidate table over the given pairs: for every
/// injective assignment of key columns to candidate columns, counts what the
/// assignment joins, and keeps the best (ties: smallest column tuple).
JoinScore joinability(const PreparedQuery& query, const Table& candidate,
                      std::vector<CandidatePair> pairs,
                      JoinSemantics semantics = JoinSemantics::kDistinctTuples);

struct DiscoveryOptions {
  Mode mode = Mode::kMate;
  InitialColumnStrategy strategy = InitialColumnStrategy::kMinCardinality;
  bool pruning = true;
  JoinSemantics semantics = JoinSemantics::kDistinctTuples;
  /// When set, must describe the same hash as the index (kCompatibility otherwise).
  const HasherConfig* query_hasher = nullptr;
};

struct FilterStats {
  std::size_t candidates = 0;      // posting items examined
  std::size_t true_positives = 0;  // surviving pairs that verified
  std::size_t false_positives = 0;
  std::size_t rows_verified = 0;   // surviving pairs sent to verification

  double precision() const {
    const auto total = true_positives + false_positives;
    return total == 0 ? 1.0 : static_cast<double>(true_positives) / static_cast<double>(total);
  }
};

struct DiscoveryRun {
  Mode mode = Mode::kMate;
  std::string hasher;
  std::size_t bits = 0;
  std::size_t k = 0;
  std::size_t initial_column = 0;
  std::size_t tables_fetched = 0;
  std::size_t tables_pruned_rule1 = 0;
  std::size_t tables_pruned_rule2 = 0;
  std::size_t rows_checked = 0;  // posting items examined
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  double wall_time_ms = 0.0;
  std::vector<RankedTable> results;

  std::size_t rows_verified() const { return true_positives + false_positives; }
};

FilterStats count_filter_stats(const DiscoveryRun& run);

/// Top-k joinable tables for `query` (SCR: no super-key masking; MCR:
/// per-column posting intersection). All modes return the same scores.
DiscoveryRun discover_topk(const QueryKey& query, const Index& index,
                           const DiscoveryOptions& options = {});

/// Exhaustive evaluation over every ordered column selection of every table.
/// Throws kBudget when (mappings x rows) summed over tables exceeds `budget`.
std::vector<RankedTable> brute_force_topk(const QueryKey& query, const Catalog& catalog,
                                          uint64_t budget = 50'000'000);

/// Scores of `results` sorted descending.
std::vector<std::size_t> score_multiset(const std::vector<RankedTable>& results);

/// The instrumentation record emitted by the CLI and the bench harness.
nlohmann::ordered_json to_json(const DiscoveryRun& run);

}  // namespace mate
