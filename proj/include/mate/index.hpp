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

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "mate/bit_array.hpp"
#include "mate/corpus.hpp"
#include "mate/hashers.hpp"

namespace mate {

using PostingItem = CellLocation;

/// A value's occurrences ordered by (table_id, row_id, column_id).
struct PostingList {
  NormalizedValue value;
  std::vector<PostingItem> items;
};

namespace edit {

struct InsertTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};
struct InsertRow {
  TableId table_id = 0;
  std::vector<std::string> values;
};
struct AddColumn {
  TableId table_id = 0;
  std::string name;
  std::vector<std::string> values;  // one per row slot, deleted rows included
};
struct UpdateCell {
  TableId table_id = 0;
  RowId row_id = 0;
  ColumnId column_id = 0;
  std::string value;
};
struct DeleteTable {
  TableId table_id = 0;
};
struct DeleteRow {
  TableId table_id = 0;
  RowId row_id = 0;
};
struct DeleteColumn {
  TableId table_id = 0;
  ColumnId column_id = 0;
};

}  // namespace edit

using Edit = std::variant<edit::InsertTable, edit::InsertRow, edit::AddColumn, edit::UpdateCell,
                          edit::DeleteTable, edit::DeleteRow, edit::DeleteColumn>;

/// JSON form: {"op": "insert_table" | "insert_row" | "add_column" |
/// "update_cell" | "delete_table" | "delete_row" | "delete_column", ...}.
Edit parse_edit(const nlohmann::json& j);
nlohmann::json to_json(const Edit& e);
std::string_view edit_name(const Edit& e);

/// Inverted index over a catalog: value -> posting list, plus one super key
/// per live row (the OR of the hashes of its live cells).
///
/// The index owns its catalog; edits change both together.
class Index {
 public:
  static Index build(Catalog catalog, const HasherConfig& config);

  Index(Index&&) noexcept = default;
  Index& operator=(Index&&) noexcept = default;

  const Catalog& catalog() const noexcept { return catalog_; }
  const RowValueHasher& hasher() const noexcept { return *hasher_; }
  const HasherConfig& config() const noexcept { return hasher_->config(); }

  /// Empty list for values that never occur.
  PostingList lookup(const NormalizedValue& value) const;
  std::span<const PostingItem> postings(ValueId value) const;
  std::span<const PostingItem> postings(std::string_view normalized_text) const;

  const BitArray& super_key(TableId table, RowId row) const;

  /// Leaves the index identical to Index::build over the edited catalog with
  /// the same hasher config. Validates before mutating, so a failed edit
  /// changes nothing.
  void apply_edit(const Edit& e);

  /// Directory layout: manifest.json, catalog.jsonl, tables/<id>.json and the
  /// binary terms.bin, postings.bin, superkeys.bin.
  void save(const std::filesystem::path& dir) const;
  /// `ranking` is needed only when the index was built with a non-default
  /// frequency table; a ranking whose digest differs is rejected.
  static Index load(const std::filesystem::path& dir,
                    const std::optional<xash::FrequencyRanking>& ranking = std::nullopt);

  std::size_t term_count() const;
  std::size_t posting_count() const;

 private:
  Index(Catalog catalog, const HasherConfig& config);

  BitArray hash_value(ValueId v) const;
  void add_posting(ValueId v, const CellLocation& loc);
  void remove_posting(ValueId v, const CellLocation& loc);
  void index_row(const Table& t, RowId row);
  void unindex_row(const Table& t, RowId row);
  void rehash_row(const Table& t, RowId row);

  Catalog catalog_;
  std::unique_ptr<RowValueHasher> hasher_;
  std::vector<std::vector<PostingItem>> postings_;     // by ValueId
  std::map<TableId, std::vector<BitArray>> super_keys_;  // by row slot
};

/// First observable difference between two indexes (terms, postings, super
/// keys of live rows), or nullopt when they are equivalent.
std::optional<std::string> index_difference(const Index& a, const Index& b);

}  // namespace mate
