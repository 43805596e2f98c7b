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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mate/error.hpp"

namespace mate {

using TableId = uint32_t;
using ColumnId = uint16_t;
using RowId = uint32_t;
using ValueId = uint32_t;

inline constexpr ValueId kNoValue = UINT32_MAX;

/// Cell text after normalization, plus its character count.
struct NormalizedValue {
  std::string text;
  std::size_t length = 0;  // code points, not bytes

  friend bool operator==(const NormalizedValue&, const NormalizedValue&) = default;
};

/// Lowercases ASCII letters, trims, and collapses internal whitespace runs to
/// one space. Non-ASCII bytes pass through unchanged.
NormalizedValue normalize_value(std::string_view raw);

/// Number of UTF-8 code points in `text`.
std::size_t utf8_length(std::string_view text);

struct CellLocation {
  TableId table_id = 0;
  ColumnId column_id = 0;
  RowId row_id = 0;

  friend auto operator<=>(const CellLocation& a, const CellLocation& b) {
    if (auto c = a.table_id <=> b.table_id; c != 0) return c;
    if (auto c = a.row_id <=> b.row_id; c != 0) return c;
    return a.column_id <=> b.column_id;
  }
  friend bool operator==(const CellLocation&, const CellLocation&) = default;
};

struct TableHandle {
  TableId table_id = 0;
  std::string name;
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::string source_path;

  friend bool operator==(const TableHandle&, const TableHandle&) = default;
};

struct CsvOptions {
  char delimiter = ',';
  bool has_header = true;
};

/// A table's cells as raw strings, with the header (or generated names).
/// Rows are padded to the widest row.
struct RawTable {
  std::vector<std::string> column_names;
  std::vector<std::vector<std::string>> rows;
};

/// RFC 4180 reader. Throws kIo for unreadable files and kInvalidInput for
/// files with no data rows.
RawTable read_csv(const std::filesystem::path& path, const CsvOptions& options = {});
RawTable parse_csv(std::string_view text, const CsvOptions& options = {});
void write_csv(const std::filesystem::path& path, const RawTable& table, char delimiter = ',');

/// Interns normalized strings; equal values share one id.
/// Ids are never reused or invalidated.
class Dictionary {
 public:
  ValueId intern(std::string_view text);
  /// kNoValue when `text` was never interned.
  ValueId find(std::string_view text) const;
  const std::string& text(ValueId id) const { return values_[id]; }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  std::vector<std::string> values_;
  std::unordered_map<std::string, ValueId> ids_;
};

/// One corpus table. Deleted rows and columns stay as tombstones; ids never shift.
class Table {
 public:
  Table(TableHandle handle, std::vector<std::string> column_names)
      : handle_(std::move(handle)), column_names_(std::move(column_names)),
        column_live_(column_names_.size(), true) {
    handle_.n_cols = column_names_.size();
  }

  const TableHandle& handle() const noexcept { return handle_; }
  TableId id() const noexcept { return handle_.table_id; }
  std::size_t n_rows() const noexcept { return row_live_.size(); }
  std::size_t n_cols() const noexcept { return column_names_.size(); }
  const std::vector<std::string>& column_names() const noexcept { return column_names_; }

  bool row_live(RowId row) const { return row < row_live_.size() && row_live_[row]; }
  bool column_live(ColumnId col) const { return col < column_live_.size() && column_live_[col]; }

  /// Normalized value id; kNoValue for cells of deleted columns.
  ValueId cell(RowId row, ColumnId col) const { return ids_[std::size_t{row} * n_cols() + col]; }
  const std::string& raw(RowId row, ColumnId col) const {
    return raw_[std::size_t{row} * n_cols() + col];
  }

  std::size_t live_row_count() const;

  // Mutators used by ingestion and by index edits.
  RowId append_row(std::vector<std::string> raw, Dictionary& dict);
  ColumnId append_column(std::string name, const std::vector<std::string>& raw, Dictionary& dict);
  void set_cell(RowId row, ColumnId col, std::string raw, Dictionary& dict);
  void delete_row(RowId row);
  void delete_column(ColumnId col);
  void set_source_path(std::string path) { handle_.source_path = std::move(path); }

 private:
  TableHandle handle_;
  std::vector<std::string> column_names_;
  std::vector<bool> column_live_;
  std::vector<bool> row_live_;
  std::vector<ValueId> ids_;     // row-major
  std::vector<std::string> raw_;  // row-major
};

struct CorpusStats {
  std::size_t unique_value_count = 0;
  std::size_t total_rows = 0;
  double avg_columns = 1.0;
};

/// Registry of corpus tables sharing one value dictionary.
class Catalog {
 public:
  /// Reads and registers a CSV file. Table ids increase monotonically.
  const TableHandle& ingest_csv(const std::filesystem::path& path, const CsvOptions& options = {});
  const TableHandle& add_table(std::string name, RawTable raw, std::string source_path = {});
  /// Registers with an explicit id; used when reloading a persisted catalog.
  const TableHandle& add_table_with_id(TableId id, std::string name, RawTable raw,
                                       std::string source_path);
  void remove_table(TableId id);

  const Table& table(TableId id) const;
  Table& mutable_table(TableId id);
  bool contains(TableId id) const { return tables_.count(id) != 0; }
  /// Tables in ascending id order.
  const std::map<TableId, Table>& tables() const noexcept { return tables_; }
  std::vector<TableHandle> handles() const;

  std::vector<NormalizedValue> get_row(TableId table, RowId row) const;
  std::size_t column_cardinality(TableId table, ColumnId column) const;

  CorpusStats stats() const;

  const Dictionary& dictionary() const noexcept { return dict_; }
  Dictionary& dictionary() noexcept { return dict_; }
  TableId next_table_id() const noexcept { return next_id_; }
  void set_next_table_id(TableId id) { next_id_ = id; }

  /// One JSON object per line: table_id, name, n_rows, n_cols, source_path.
  void write_catalog_jsonl(const std::filesystem::path& path) const;
  static std::vector<TableHandle> read_catalog_jsonl(const std::filesystem::path& path);

 private:
  std::map<TableId, Table> tables_;
  Dictionary dict_;
  TableId next_id_ = 0;
};

/// Distinct normalized values of one column of a standalone table.
std::size_t column_cardinality(const RawTable& table, std::size_t column);

}  // namespace mate
