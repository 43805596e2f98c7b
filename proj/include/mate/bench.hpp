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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mate/corpus.hpp"
#include "mate/discovery.hpp"
#include "mate/hashers.hpp"
#include "mate/index.hpp"

namespace mate::bench {

struct CountRange {
  std::size_t min = 1;
  std::size_t max = 1;
};

/// Value generator. Every column draws from one domain; a domain is either
/// text (words over a skewed alphabet) or numeric (fixed-width digit strings).
struct VocabularySpec {
  std::size_t domains = 24;
  std::size_t values_per_domain = 3000;
  double value_skew = 1.0;       // Zipf exponent of value popularity within a domain
  double char_skew = 1.0;        // Zipf exponent over letters in English frequency order
  CountRange word_length{3, 12};
  CountRange words_per_value{1, 3};
  double numeric_fraction = 0.25;
};

/// One query: `query_rows` rows with an m-column key, of which
/// round(joinable_fraction * query_rows) are copied from distinct rows of the
/// target table. The remaining rows join no table at all.
struct PlantedJoin {
  std::size_t query_rows = 60;
  std::optional<TableId> target_table;  // chosen at random when absent
  std::size_t m = 2;
  double joinable_fraction = 0.3;
};

struct SyntheticSpec {
  CountRange n_tables{500, 500};
  CountRange rows_per_table{10, 1000};
  CountRange cols_per_table{2, 8};
  VocabularySpec vocabulary;
  std::vector<PlantedJoin> planted_joins;
  uint64_t seed = 1;

  /// Desk-scale defaults: 500 tables of up to 1000 rows and 8 columns, and
  /// 20 queries with keys of two or three columns.
  static SyntheticSpec defaults(uint64_t seed);

  /// Throws kInvalidInput when the spec cannot be realized.
  void validate() const;
};

nlohmann::json to_json(const SyntheticSpec& spec);
/// Missing fields keep their defaults.
SyntheticSpec spec_from_json(const nlohmann::json& j);

struct TruthRecord {
  std::size_t query_id = 0;
  TableId table_id = 0;
  std::size_t true_j = 0;
};

struct GeneratedCorpus {
  std::vector<std::string> table_names;
  std::vector<RawTable> tables;  // table id = position
  std::vector<QueryKey> queries;
  std::vector<TruthRecord> truth;

  Catalog catalog() const;
};

/// Deterministic under spec.seed. Throws kInvalidInput for unrealizable specs.
GeneratedCorpus generate(const SyntheticSpec& spec);

/// Layout: tables/<name>.csv, queries/q<id>.csv, queries.jsonl
/// ({query_id, file, key_columns, k}) and truth.jsonl ({query_id, table_id, true_j}).
void write_corpus(const GeneratedCorpus& corpus, const std::filesystem::path& dir);

GeneratedCorpus generate_corpus(const SyntheticSpec& spec, const std::filesystem::path& dir);

struct HasherChoice {
  HasherKind kind = HasherKind::kXash;
  std::size_t bits = 128;

  std::string label() const;  // e.g. "xash-128"
  friend bool operator==(const HasherChoice&, const HasherChoice&) = default;
};

/// Parses "xash:128" style tokens.
HasherChoice parse_hasher_choice(std::string_view token);

struct MatrixSpec {
  std::vector<HasherChoice> hashers{{HasherKind::kXash, 128},
                                    {HasherKind::kBloom, 128},
                                    {HasherKind::kHashTable, 128}};
  std::vector<Mode> modes{Mode::kMate};
  std::vector<InitialColumnStrategy> strategies{InitialColumnStrategy::kMinCardinality};
  std::size_t k = 10;
  bool pruning = true;
};

/// One discovery run, reduced to what the report aggregates.
struct RunRecord {
  uint64_t seed = 0;
  std::size_t query_id = 0;
  HasherChoice hasher;
  Mode mode = Mode::kMate;
  InitialColumnStrategy strategy = InitialColumnStrategy::kMinCardinality;
  std::size_t rows_checked = 0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t tables_pruned = 0;
  double wall_time_ms = 0.0;
  std::vector<std::size_t> scores;

  std::size_t rows_verified() const { return true_positives + false_positives; }
};

/// Runs every (hasher, mode, strategy) cell over every query of one corpus.
/// Throws kConsistency when any two cells disagree on a query's scores.
std::vector<RunRecord> run_matrix(const Catalog& catalog, const std::vector<QueryKey>& queries,
                                  const MatrixSpec& matrix, uint64_t seed);

/// TP / (TP + FP) pooled over records; 1 when nothing was verified.
double pooled_precision(const std::vector<const RunRecord*>& records);

struct CellSummary {
  HasherChoice hasher;
  Mode mode = Mode::kMate;
  InitialColumnStrategy strategy = InitialColumnStrategy::kMinCardinality;
  std::size_t runs = 0;
  std::vector<double> precision_per_seed;
  std::vector<std::size_t> fp_per_seed;
  std::vector<std::size_t> rows_checked_per_seed;
  std::vector<std::size_t> rows_verified_per_seed;
  double mean_precision = 0.0;
  double stddev_precision = 0.0;
  double mean_fp = 0.0;
  double mean_rows_checked = 0.0;
  double mean_rows_verified = 0.0;
  double mean_wall_time_ms = 0.0;
};

/// Groups records by cell; per-seed values are pooled over that seed's queries.
std::vector<CellSummary> summarize(const std::vector<RunRecord>& records);

/// The component ladder, weakest first: length, chars, chars+positions,
/// chars+positions+length, full.
std::vector<std::pair<std::string, xash::Components>> ablation_ladder();

struct AblationRow {
  std::string name;
  xash::Components components;
  double precision = 0.0;
  std::size_t false_positives = 0;
  std::size_t rows_verified = 0;
};

/// Precision of each component subset with everything else fixed. The first
/// row is the unfiltered baseline ("none": every candidate is verified).
std::vector<AblationRow> ablate_xash(const Catalog& catalog, const std::vector<QueryKey>& queries,
                                     std::size_t bits,
                                     const std::vector<std::pair<std::string, xash::Components>>&
                                         ladder = ablation_ladder(),
                                     std::size_t k = 10);

struct SweepRow {
  std::size_t m = 0;
  double mean_rows_verified = 0.0;
  double mean_fp = 0.0;
  double precision = 0.0;
};

/// Runs each query with its first m key columns for m in [m_min, m_max],
/// always starting from the first key column and without pruning, so the
/// candidate set is the same for every m.
std::vector<SweepRow> key_size_sweep(const Index& index, const std::vector<QueryKey>& queries,
                                     std::size_t m_min, std::size_t m_max, std::size_t k = 10);

struct AnalyticResult {
  std::size_t bits = 0;
  std::size_t k = 0;
  std::string lhbf_side;         // 2 / (|a| (|a| - 1)), exact fraction
  std::string xash_side;         // (1/beta) * (1 / (37 - K + 1))^K
  std::string lhbf_length_side;  // 1 / (|a| (|a| - 1))
  std::string xash_length_side;  // (1/|a_l|) * (1/beta) * (1 / (37 - K + 1))^K
  bool char_only_holds = false;
  bool with_length_holds = false;
};

/// Exact rational comparison of the LHBF and XASH collision probabilities.
AnalyticResult analytic_collision_check(std::size_t bits, std::size_t k);

struct BenchConfig {
  SyntheticSpec corpus = SyntheticSpec::defaults(1);
  std::vector<uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  MatrixSpec matrix;
  bool ablate = false;
  std::size_t ablation_bits = 128;
  bool key_sweep = false;
};

BenchConfig bench_config_from_json(const nlohmann::json& j);

struct AblationSummary {
  std::string name;
  std::vector<double> precision_per_seed;
  std::vector<std::size_t> fp_per_seed;
  double mean_precision = 0.0;
  double stddev_precision = 0.0;
};

struct BenchReport {
  nlohmann::json config;
  std::vector<RunRecord> records;
  std::vector<CellSummary> cells;
  std::vector<AblationSummary> ablation;
  std::vector<SweepRow> sweep;

  /// Deterministic under fixed seeds: wall times are left out.
  nlohmann::ordered_json to_json() const;
  std::string to_csv() const;
  /// Wall times per cell.
  std::string timings_csv() const;
};

/// Generates one corpus per seed and runs the matrix (and, when asked, the
/// ablation and the key-size sweep) on each.
BenchReport run_bench(const BenchConfig& config);

}  // namespace mate::bench
