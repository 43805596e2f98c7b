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

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "mate/corpus.hpp"
#include "mate/discovery.hpp"
#include "mate/index.hpp"

namespace mate::testing {

/// Small random corpora over a narrow vocabulary, so that random queries
/// actually join with something.
class RandomCorpus {
 public:
  explicit RandomCorpus(uint64_t seed) : rng_(seed) {}

  std::mt19937_64& rng() { return rng_; }

  std::size_t uniform(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }

  std::string word() {
    static const std::vector<std::string> vocab = {
        "ada",  "lee",    "us",     "uk",    "muhammad", "sara", "anna",  "berlin", "paris",
        "rome", "1984",   "42",     "7",     "zoe",      "max",  "li",    "wei",    "kim",
        "oslo", "lima",   "quartz", "jazz",  "a b",      "x",    "yy",    "olive",  "pear",
        "",     "Ada",    " lee ",  "new york"};
    return vocab[uniform(0, vocab.size() - 1)];
  }

  RawTable table(std::size_t max_rows, std::size_t max_cols) {
    RawTable t;
    const std::size_t cols = uniform(1, max_cols);
    const std::size_t rows = uniform(1, max_rows);
    for (std::size_t c = 0; c < cols; ++c) t.column_names.push_back("c" + std::to_string(c));
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<std::string> row;
      for (std::size_t c = 0; c < cols; ++c) row.push_back(word());
      t.rows.push_back(std::move(row));
    }
    return t;
  }

  Catalog catalog(std::size_t max_tables, std::size_t max_rows, std::size_t max_cols) {
    Catalog cat;
    const std::size_t n = uniform(1, max_tables);
    for (std::size_t i = 0; i < n; ++i) {
      cat.add_table("t" + std::to_string(i), table(max_rows, max_cols));
    }
    return cat;
  }

  /// A query of width m whose rows are partly copied (shuffled columns) from
  /// corpus rows, partly random.
  QueryKey query(const Catalog& cat, std::size_t m, std::size_t rows, std::size_t k) {
    QueryKey q;
    q.k = k;
    const std::size_t extra = uniform(0, 1);
    for (std::size_t c = 0; c < m + extra; ++c) q.table.column_names.push_back("q" + std::to_string(c));
    std::vector<TableId> ids;
    for (const auto& [id, t] : cat.tables()) ids.push_back(id);
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<std::string> row;
      const Table& t = cat.table(ids[uniform(0, ids.size() - 1)]);
      std::vector<ColumnId> live;
      for (ColumnId c = 0; c < t.n_cols(); ++c) {
        if (t.column_live(c)) live.push_back(c);
      }
      std::vector<RowId> live_rows;
      for (RowId x = 0; x < t.n_rows(); ++x) {
        if (t.row_live(x)) live_rows.push_back(x);
      }
      if (uniform(0, 3) != 0 && live.size() >= m && !live_rows.empty()) {
        std::shuffle(live.begin(), live.end(), rng_);
        const RowId src = live_rows[uniform(0, live_rows.size() - 1)];
        for (std::size_t i = 0; i < m; ++i) row.push_back(t.raw(src, live[i]));
      } else {
        for (std::size_t i = 0; i < m; ++i) row.push_back(word());
      }
      for (std::size_t i = 0; i < extra; ++i) row.push_back(word());
      q.table.rows.push_back(std::move(row));
    }
    std::vector<std::size_t> cols(m + extra);
    for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = i;
    std::shuffle(cols.begin(), cols.end(), rng_);
    cols.resize(m);
    q.columns = cols;
    return q;
  }

  /// A random valid edit against the current state of `cat`.
  Edit edit(const Catalog& cat) {
    std::vector<TableId> ids;
    for (const auto& [id, t] : cat.tables()) ids.push_back(id);
    const std::size_t op = ids.empty() ? 0 : uniform(0, 6);
    if (op == 0) {
      RawTable t = table(6, 4);
      return edit::InsertTable{"ins" + std::to_string(uniform(0, 999)), t.column_names, t.rows};
    }
    const TableId id = ids[uniform(0, ids.size() - 1)];
    const Table& t = cat.table(id);
    std::vector<RowId> rows;
    for (RowId r = 0; r < t.n_rows(); ++r) {
      if (t.row_live(r)) rows.push_back(r);
    }
    std::vector<ColumnId> cols;
    for (ColumnId c = 0; c < t.n_cols(); ++c) {
      if (t.column_live(c)) cols.push_back(c);
    }
    switch (op) {
      case 1: {
        std::vector<std::string> values;
        for (std::size_t c = 0; c < t.n_cols(); ++c) values.push_back(word());
        return edit::InsertRow{id, values};
      }
      case 2: {
        std::vector<std::string> values;
        for (std::size_t r = 0; r < t.n_rows(); ++r) values.push_back(word());
        return edit::AddColumn{id, "added", values};
      }
      case 3:
        if (!rows.empty() && !cols.empty()) {
          return edit::UpdateCell{id, rows[uniform(0, rows.size() - 1)],
                                  cols[uniform(0, cols.size() - 1)], word()};
        }
        break;
      case 4:
        return edit::DeleteTable{id};
      case 5:
        if (!rows.empty()) return edit::DeleteRow{id, rows[uniform(0, rows.size() - 1)]};
        break;
      case 6:
        if (!cols.empty()) return edit::DeleteColumn{id, cols[uniform(0, cols.size() - 1)]};
        break;
    }
    std::vector<std::string> values;
    for (std::size_t c = 0; c < t.n_cols(); ++c) values.push_back(word());
    return edit::InsertRow{id, values};
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace mate::testing
