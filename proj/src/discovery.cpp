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

#include "mate/discovery.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <set>
#include <unordered_set>

namespace mate {

void QueryKey::validate() const {
  if (k == 0) throw Error(ErrorKind::kInvalidInput, "k must be at least 1");
  if (columns.empty()) throw Error(ErrorKind::kInvalidInput, "at least one key column is required");
  std::set<std::size_t> seen;
  for (std::size_t c : columns) {
    if (c >= table.column_names.size()) {
      throw Error(ErrorKind::kInvalidInput, "key column " + std::to_string(c) +
                                                " out of range for query with " +
                                                std::to_string(table.column_names.size()) +
                                                " columns");
    }
    if (!seen.insert(c).second) {
      throw Error(ErrorKind::kInvalidInput, "key column " + std::to_string(c) + " repeated");
    }
  }
}

std::string_view to_token(Mode mode) {
  switch (mode) {
    case Mode::kMate: return "mate";
    case Mode::kScr: return "scr";
    case Mode::kMcr: return "mcr";
  }
  return "?";
}

Mode parse_mode(std::string_view token) {
  for (auto m : {Mode::kMate, Mode::kScr, Mode::kMcr}) {
    if (to_token(m) == token) return m;
  }
  throw Error(ErrorKind::kInvalidInput, "unknown mode '" + std::string(token) + "'");
}

std::string_view to_token(InitialColumnStrategy s) {
  switch (s) {
    case InitialColumnStrategy::kMinCardinality: return "min_cardinality";
    case InitialColumnStrategy::kColumnOrder: return "column_order";
    case InitialColumnStrategy::kLongestString: return "longest_string";
    case InitialColumnStrategy::kWorst: return "worst";
    case InitialColumnStrategy::kBest: return "best";
  }
  return "?";
}

InitialColumnStrategy parse_strategy(std::string_view token) {
  for (auto s : {InitialColumnStrategy::kMinCardinality, InitialColumnStrategy::kColumnOrder,
                 InitialColumnStrategy::kLongestString, InitialColumnStrategy::kWorst,
                 InitialColumnStrategy::kBest}) {
    if (to_token(s) == token) return s;
  }
  throw Error(ErrorKind::kInvalidInput, "unknown strategy '" + std::string(token) + "'");
}

uint64_t mapping_count(std::size_t n_cols, std::size_t m) {
  if (m > n_cols) return 0;
  return xash::binomial_saturated(n_cols, m);
}

// ---------------------------------------------------------------------------
// Initialization

std::size_t fetched_posting_count(const RawTable& query, std::size_t column, const Index& index) {
  std::unordered_set<std::string> values;
  for (const auto& row : query.rows) values.insert(normalize_value(row[column]).text);
  std::size_t n = 0;
  for (const auto& v : values) n += index.postings(v).size();
  return n;
}

std::size_t select_initial_column(const RawTable& query, const std::vector<std::size_t>& columns,
                                  InitialColumnStrategy strategy, const Index* index) {
  if (columns.empty()) throw Error(ErrorKind::kInvalidInput, "no key columns");
  auto pick = [&](auto score, bool prefer_low) {
    std::size_t best = columns.front();
    auto best_score = score(best);
    for (std::size_t i = 1; i < columns.size(); ++i) {
      const auto s = score(columns[i]);
      if (prefer_low ? s < best_score : s > best_score) {
        best = columns[i];
        best_score = s;
      }
    }
    return best;
  };
  auto need_index = [&] {
    if (!index) {
      throw Error(ErrorKind::kInvalidInput,
                  std::string(to_token(strategy)) + " strategy needs the index");
    }
  };
  switch (strategy) {
    case InitialColumnStrategy::kColumnOrder:
      return columns.front();
    case InitialColumnStrategy::kMinCardinality:
      return pick([&](std::size_t c) { return column_cardinality(query, c); }, true);
    case InitialColumnStrategy::kLongestString:
      return pick(
          [&](std::size_t c) {
            std::size_t longest = 0;
            for (const auto& row : query.rows) {
              longest = std::max(longest, normalize_value(row[c]).length);
            }
            return longest;
          },
          false);
    case InitialColumnStrategy::kWorst:
      need_index();
      return pick([&](std::size_t c) { return fetched_posting_count(query, c, *index); }, false);
    case InitialColumnStrategy::kBest:
      need_index();
      return pick([&](std::size_t c) { return fetched_posting_count(query, c, *index); }, true);
  }
  return columns.front();
}

QuerySuperKeyMap build_query_superkey_map(const RawTable& query,
                                          const std::vector<std::size_t>& columns,
                                          std::size_t initial_column,
                                          const RowValueHasher& hasher) {
  if (std::find(columns.begin(), columns.end(), initial_column) == columns.end()) {
    throw Error(ErrorKind::kInvalidInput, "initial column is not a key column");
  }
  std::unordered_map<std::string, BitArray> cache;
  auto hash_of = [&](const NormalizedValue& v) -> const BitArray& {
    auto it = cache.find(v.text);
    if (it == cache.end()) it = cache.emplace(v.text, hasher.hash(v)).first;
    return it->second;
  };
  QuerySuperKeyMap out;
  for (std::size_t r = 0; r < query.rows.size(); ++r) {
    QueryRowKey entry{r, {}, BitArray(hasher.bits())};
    entry.key.reserve(columns.size());
    std::string initial;
    for (std::size_t c : columns) {
      NormalizedValue v = normalize_value(query.rows[r][c]);
      entry.super_key |= hash_of(v);
      if (c == initial_column) initial = v.text;
      entry.key.push_back(std::move(v.text));
    }
    out[initial].push_back(std::move(entry));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Top-k and pruning

namespace {

bool ranks_before(const RankedTable& a, const RankedTable& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.table_id < b.table_id;
}

}  // namespace

void TopK::offer(RankedTable entry) {
  if (entry.score == 0 || k_ == 0) return;
  if (full() && !ranks_before(entry, entries_.back())) return;
  entries_.insert(std::upper_bound(entries_.begin(), entries_.end(), entry, ranks_before),
                  std::move(entry));
  if (entries_.size() > k_) entries_.pop_back();
}

bool prune_table_rule1(std::size_t postings_in_table, const TopK& state) {
  return state.full() && postings_in_table <= state.threshold();
}

bool prune_table_rule2(std::size_t postings_in_table, std::size_t checked, std::size_t matched,
                       const TopK& state) {
  return state.full() && postings_in_table - checked + matched <= state.threshold();
}

// ---------------------------------------------------------------------------
// Joinability

PreparedQuery::PreparedQuery(const QueryKey& query, const Dictionary& dict)
    : width_(query.columns.size()) {
  std::map<std::vector<std::string>, uint32_t> tuples;
  keys_.reserve(query.table.rows.size());
  tuple_ids_.reserve(query.table.rows.size());
  for (const auto& row : query.table.rows) {
    std::vector<std::string> texts;
    std::vector<ValueId> ids;
    for (std::size_t c : query.columns) {
      texts.push_back(normalize_value(row[c]).text);
      ids.push_back(dict.find(texts.back()));
    }
    auto [it, inserted] = tuples.emplace(std::move(texts), static_cast<uint32_t>(tuples.size()));
    tuple_ids_.push_back(it->second);
    keys_.push_back(std::move(ids));
  }
  distinct_ = tuples.size();
}

namespace {

/// Calls `emit(mapping)` for every injective assignment of key positions to
/// live columns of `row` whose cells equal the key values.
template <typename Emit>
void for_each_assignment(const std::vector<ValueId>& key, const Table& t, RowId row, Emit&& emit) {
  for (ValueId v : key) {
    if (v == kNoValue) return;
  }
  std::vector<std::vector<ColumnId>> options(key.size());
  for (std::size_t i = 0; i < key.size(); ++i) {
    for (ColumnId c = 0; c < t.n_cols(); ++c) {
      if (t.column_live(c) && t.cell(row, c) == key[i]) options[i].push_back(c);
    }
    if (options[i].empty()) return;
  }
  std::vector<ColumnId> mapping(key.size());
  std::vector<bool> used(t.n_cols(), false);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == key.size()) {
      emit(mapping);
      return;
    }
    for (ColumnId c : options[i]) {
      if (used[c]) continue;
      used[c] = true;
      mapping[i] = c;
      rec(i + 1);
      used[c] = false;
    }
  };
  rec(0);
}

bool matches_exactly(const std::vector<ValueId>& key, const Table& t, RowId row) {
  bool found = false;
  // The first assignment is enough; remaining branches are cheap for real keys.
  for_each_assignment(key, t, row, [&](const std::vector<ColumnId>&) { found = true; });
  return found;
}

}  // namespace

JoinScore joinability(const PreparedQuery& query, const Table& candidate,
                      std::vector<CandidatePair> pairs, JoinSemantics semantics) {
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  JoinScore out;
  out.pairs_verified = pairs.size();
  // Only column tuples that actually matched something are materialized.
  std::map<std::vector<ColumnId>, std::vector<uint32_t>> hits;
  for (const CandidatePair& p : pairs) {
    bool matched = false;
    for_each_assignment(query.key(p.query_row), candidate, p.candidate_row,
                        [&](const std::vector<ColumnId>& mapping) {
                          matched = true;
                          hits[mapping].push_back(semantics == JoinSemantics::kDistinctTuples
                                                      ? query.tuple_id(p.query_row)
                                                      : p.query_row);
                        });
    if (matched) ++out.pairs_matched;
  }
  for (auto& [mapping, ids] : hits) {
    std::size_t score = ids.size();
    if (semantics == JoinSemantics::kDistinctTuples) {
      std::sort(ids.begin(), ids.end());
      score = static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
    }
    if (score > out.score) {
      out.score = score;
      out.mapping = mapping;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Discovery

namespace {

void check_query_hasher(const HasherConfig* q, const HasherConfig& idx) {
  if (!q) return;
  bool same = q->kind == idx.kind && q->bits == idx.bits;
  if (same && idx.kind == HasherKind::kXash) {
    same = q->xash == idx.xash && q->ranking.digest() == idx.ranking.digest() &&
           q->components == idx.components;
  } else if (same) {
    same = q->seed == idx.seed && q->hash_count == idx.hash_count;
  }
  if (!same) {
    throw Error(ErrorKind::kCompatibility, "query-side hasher differs from the index hasher");
  }
}

struct TableCandidates {
  TableId table = 0;
  std::vector<std::pair<PostingItem, ValueId>> items;
};

void run_single_column(const QueryKey& query, const Index& index, const DiscoveryOptions& options,
                       const PreparedQuery& prepared, DiscoveryRun& run) {
  const Catalog& catalog = index.catalog();
  const Dictionary& dict = catalog.dictionary();
  const bool pruning = options.pruning && options.semantics == JoinSemantics::kDistinctTuples;

  const QuerySuperKeyMap by_text =
      build_query_superkey_map(query.table, query.columns, run.initial_column, index.hasher());
  std::unordered_map<ValueId, const std::vector<QueryRowKey>*> by_value;
  for (const auto& [text, rows] : by_text) {
    const ValueId v = dict.find(text);
    if (v != kNoValue) by_value.emplace(v, &rows);
  }

  // Group the initial column's posting items by table, largest first.
  std::map<TableId, TableCandidates> grouped;
  for (const auto& [v, rows] : by_value) {
    for (const PostingItem& p : index.postings(v)) {
      auto& g = grouped[p.table_id];
      g.table = p.table_id;
      g.items.emplace_back(p, v);
    }
  }
  std::vector<TableCandidates> tables;
  tables.reserve(grouped.size());
  for (auto& [id, g] : grouped) {
    std::sort(g.items.begin(), g.items.end());
    tables.push_back(std::move(g));
  }
  std::stable_sort(tables.begin(), tables.end(), [](const auto& a, const auto& b) {
    return a.items.size() > b.items.size();
  });
  run.tables_fetched = tables.size();

  TopK topk(query.k);
  for (std::size_t ti = 0; ti < tables.size(); ++ti) {
    const TableCandidates& tc = tables[ti];
    const std::size_t postings_in_table = tc.items.size();
    if (pruning && prune_table_rule1(postings_in_table, topk)) {
      run.tables_pruned_rule1 = tables.size() - ti;
      break;
    }
    const Table& table = catalog.table(tc.table);
    std::vector<CandidatePair> pairs;
    std::size_t checked = 0;
    std::size_t matched = 0;
    bool skipped = false;
    for (const auto& [item, value] : tc.items) {
      if (pruning && prune_table_rule2(postings_in_table, checked, matched, topk)) {
        skipped = true;
        break;
      }
      ++run.rows_checked;
      const BitArray& row_key = index.super_key(tc.table, item.row_id);
      bool any = false;
      for (const QueryRowKey& q : *by_value.at(value)) {
        if (options.mode == Mode::kMate) {
          if (!mask_covers(q.super_key, row_key)) continue;
          any = true;
        } else if (!any && matches_exactly(prepared.key(q.query_row), table, item.row_id)) {
          any = true;
        }
        pairs.push_back({static_cast<uint32_t>(q.query_row), item.row_id});
      }
      if (any) ++matched;
      ++checked;
    }
    if (skipped) {
      ++run.tables_pruned_rule2;
      continue;
    }
    JoinScore score = joinability(prepared, table, std::move(pairs), options.semantics);
    run.true_positives += score.pairs_matched;
    run.false_positives += score.pairs_verified - score.pairs_matched;
    topk.offer({tc.table, score.score, std::move(score.mapping)});
  }
  run.results = topk.entries();
}

void run_multi_column(const QueryKey& query, const Index& index, const DiscoveryOptions& options,
                      const PreparedQuery& prepared, DiscoveryRun& run) {
  using RowRef = std::pair<TableId, RowId>;
  // Distinct (table,row) sets per fetched value.
  std::unordered_map<ValueId, std::vector<RowRef>> rows_of;
  std::set<TableId> fetched_tables;
  for (std::size_t r = 0; r < prepared.rows(); ++r) {
    for (ValueId v : prepared.key(r)) {
      if (v == kNoValue || rows_of.count(v)) continue;
      auto& refs = rows_of[v];
      for (const PostingItem& p : index.postings(v)) {
        ++run.rows_checked;
        fetched_tables.insert(p.table_id);
        refs.emplace_back(p.table_id, p.row_id);
      }
      refs.erase(std::unique(refs.begin(), refs.end()), refs.end());
    }
  }
  run.tables_fetched = fetched_tables.size();

  std::map<TableId, std::vector<CandidatePair>> pairs;
  std::map<std::vector<ValueId>, std::vector<RowRef>> intersections;
  for (std::size_t r = 0; r < prepared.rows(); ++r) {
    const auto& key = prepared.key(r);
    if (std::find(key.begin(), key.end(), kNoValue) != key.end()) continue;
    auto [it, inserted] = intersections.try_emplace(key);
    if (inserted) {
      std::vector<RowRef> acc = rows_of.at(key[0]);
      for (std::size_t i = 1; i < key.size() && !acc.empty(); ++i) {
        const auto& other = rows_of.at(key[i]);
        std::vector<RowRef> next;
        std::set_intersection(acc.begin(), acc.end(), other.begin(), other.end(),
                              std::back_inserter(next));
        acc = std::move(next);
      }
      it->second = std::move(acc);
    }
    for (const auto& [table, row] : it->second) {
      pairs[table].push_back({static_cast<uint32_t>(r), row});
    }
  }

  TopK topk(query.k);
  for (auto& [table_id, table_pairs] : pairs) {
    JoinScore score = joinability(prepared, index.catalog().table(table_id),
                                  std::move(table_pairs), options.semantics);
    run.true_positives += score.pairs_matched;
    run.false_positives += score.pairs_verified - score.pairs_matched;
    topk.offer({table_id, score.score, std::move(score.mapping)});
  }
  run.results = topk.entries();
}

}  // namespace

DiscoveryRun discover_topk(const QueryKey& query, const Index& index,
                           const DiscoveryOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  query.validate();
  check_query_hasher(options.query_hasher, index.config());

  DiscoveryRun run;
  run.mode = options.mode;
  run.hasher = std::string(index.hasher().name());
  run.bits = index.hasher().bits();
  run.k = query.k;
  run.initial_column = select_initial_column(query.table, query.columns, options.strategy, &index);

  const PreparedQuery prepared(query, index.catalog().dictionary());
  if (options.mode == Mode::kMcr) {
    run_multi_column(query, index, options, prepared, run);
  } else {
    run_single_column(query, index, options, prepared, run);
  }
  run.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return run;
}

FilterStats count_filter_stats(const DiscoveryRun& run) {
  FilterStats s;
  s.candidates = run.rows_checked;
  s.true_positives = run.true_positives;
  s.false_positives = run.false_positives;
  s.rows_verified = run.rows_verified();
  return s;
}

std::vector<std::size_t> score_multiset(const std::vector<RankedTable>& results) {
  std::vector<std::size_t> out;
  out.reserve(results.size());
  for (const auto& r : results) out.push_back(r.score);
  std::sort(out.rbegin(), out.rend());
  return out;
}

nlohmann::ordered_json to_json(const DiscoveryRun& run) {
  nlohmann::ordered_json j;
  j["mode"] = to_token(run.mode);
  j["hasher"] = run.hasher;
  j["bits"] = run.bits;
  j["k"] = run.k;
  j["initial_column"] = run.initial_column;
  j["tables_fetched"] = run.tables_fetched;
  j["tables_pruned_rule1"] = run.tables_pruned_rule1;
  j["tables_pruned_rule2"] = run.tables_pruned_rule2;
  j["rows_checked"] = run.rows_checked;
  j["rows_verified"] = run.rows_verified();
  j["TP"] = run.true_positives;
  j["FP"] = run.false_positives;
  j["precision"] = count_filter_stats(run).precision();
  j["wall_time_ms"] = run.wall_time_ms;
  auto results = nlohmann::ordered_json::array();
  for (const auto& r : run.results) {
    nlohmann::ordered_json e;
    e["table_id"] = r.table_id;
    e["j"] = r.score;
    e["mapping"] = r.mapping;
    results.push_back(std::move(e));
  }
  j["results"] = std::move(results);
  return j;
}

// ---------------------------------------------------------------------------
// Brute-force oracle

std::vector<RankedTable> brute_force_topk(const QueryKey& query, const Catalog& catalog,
                                          uint64_t budget) {
  query.validate();
  const std::size_t m = query.columns.size();
  std::set<std::vector<std::string>> wanted;
  for (const auto& row : query.table.rows) {
    std::vector<std::string> tuple;
    for (std::size_t c : query.columns) tuple.push_back(normalize_value(row[c]).text);
    wanted.insert(std::move(tuple));
  }

  const Dictionary& dict = catalog.dictionary();
  uint64_t work = 0;
  std::vector<RankedTable> scored;
  for (const auto& [id, t] : catalog.tables()) {
    std::vector<ColumnId> live;
    for (ColumnId c = 0; c < t.n_cols(); ++c) {
      if (t.column_live(c)) live.push_back(c);
    }
    if (live.size() < m) continue;
    uint64_t perms = 1;
    for (std::size_t i = 0; i < m; ++i) perms *= live.size() - i;
    work += perms * std::max<std::size_t>(1, t.live_row_count());
    if (work > budget) throw Error(ErrorKind::kBudget, "brute-force budget exceeded");

    RankedTable best{id, 0, {}};
    std::vector<ColumnId> mapping;
    std::vector<bool> used(live.size(), false);
    // Ordered selections in lexicographic order, so the first maximum wins ties.
    std::function<void()> rec = [&] {
      if (mapping.size() == m) {
        std::set<std::vector<std::string>> projected;
        for (RowId r = 0; r < t.n_rows(); ++r) {
          if (!t.row_live(r)) continue;
          std::vector<std::string> tuple;
          for (ColumnId c : mapping) tuple.push_back(dict.text(t.cell(r, c)));
          projected.insert(std::move(tuple));
        }
        std::size_t score = 0;
        for (const auto& w : wanted) score += projected.count(w);
        if (score > best.score) {
          best.score = score;
          best.mapping = mapping;
        }
        return;
      }
      for (std::size_t i = 0; i < live.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        mapping.push_back(live[i]);
        rec();
        mapping.pop_back();
        used[i] = false;
      }
    };
    rec();
    if (best.score > 0) scored.push_back(std::move(best));
  }
  std::sort(scored.begin(), scored.end(), [](const RankedTable& a, const RankedTable& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.table_id < b.table_id;
  });
  if (scored.size() > query.k) scored.resize(query.k);
  return scored;
}

}  // namespace mate
