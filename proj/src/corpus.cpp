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

#include "mate/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace mate {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

std::size_t utf8_length(std::string_view text) {
  std::size_t n = 0;
  for (char c : text) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  }
  return n;
}

NormalizedValue normalize_value(std::string_view raw) {
  NormalizedValue out;
  out.text.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    if (is_space(c)) {
      pending_space = !out.text.empty();
      continue;
    }
    if (pending_space) {
      out.text.push_back(' ');
      pending_space = false;
    }
    out.text.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }
  out.length = utf8_length(out.text);
  return out;
}

// ---------------------------------------------------------------------------
// CSV

RawTable parse_csv(std::string_view text, const CsvOptions& options) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;  // distinguishes "" (one empty field) from a blank line

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    if (field_started || !record.empty()) {
      end_field();
      records.push_back(std::move(record));
    }
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      field_started = true;
    } else if (c == options.delimiter) {
      field_started = true;
      end_field();
      field_started = true;
    } else if (c == '\n') {
      end_record();
    } else if (c == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n') continue;
      end_record();
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) throw Error(ErrorKind::kInvalidInput, "unterminated quoted field");
  end_record();

  RawTable table;
  std::size_t first_data = 0;
  if (options.has_header && !records.empty()) {
    table.column_names = std::move(records.front());
    first_data = 1;
  }
  if (records.size() <= first_data) {
    throw Error(ErrorKind::kInvalidInput, "csv has no data rows");
  }
  std::size_t width = table.column_names.size();
  for (std::size_t r = first_data; r < records.size(); ++r) {
    width = std::max(width, records[r].size());
  }
  for (std::size_t c = table.column_names.size(); c < width; ++c) {
    table.column_names.push_back("col" + std::to_string(c));
  }
  table.rows.reserve(records.size() - first_data);
  for (std::size_t r = first_data; r < records.size(); ++r) {
    records[r].resize(width);
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

RawTable read_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv(buf.str(), options);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

namespace {

void write_csv_field(std::ostream& out, const std::string& value, char delimiter) {
  const bool quote = value.find_first_of(std::string{delimiter, '"', '\n', '\r'}) !=
                         std::string::npos ||
                     (!value.empty() && (is_space(value.front()) || is_space(value.back())));
  if (!quote) {
    out << value;
    return;
  }
  out << '"';
  for (char c : value) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

void write_csv_record(std::ostream& out, const std::vector<std::string>& fields, char delimiter) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << delimiter;
    write_csv_field(out, fields[i], delimiter);
  }
  // A lone empty field would read back as a blank line.
  if (fields.size() == 1 && fields[0].empty()) out << "\"\"";
  out << '\n';
}

}  // namespace

void write_csv(const std::filesystem::path& path, const RawTable& table, char delimiter) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  write_csv_record(out, table.column_names, delimiter);
  for (const auto& row : table.rows) write_csv_record(out, row, delimiter);
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Dictionary

ValueId Dictionary::intern(std::string_view text) {
  auto it = ids_.find(std::string(text));
  if (it != ids_.end()) return it->second;
  const auto id = static_cast<ValueId>(values_.size());
  values_.emplace_back(text);
  ids_.emplace(values_.back(), id);
  return id;
}

ValueId Dictionary::find(std::string_view text) const {
  auto it = ids_.find(std::string(text));
  return it == ids_.end() ? kNoValue : it->second;
}

// ---------------------------------------------------------------------------
// Table

std::size_t Table::live_row_count() const {
  return static_cast<std::size_t>(std::count(row_live_.begin(), row_live_.end(), true));
}

RowId Table::append_row(std::vector<std::string> raw, Dictionary& dict) {
  if (raw.size() > n_cols()) {
    throw Error(ErrorKind::kInvalidInput, "row has " + std::to_string(raw.size()) +
                                              " values but table has " +
                                              std::to_string(n_cols()) + " columns");
  }
  raw.resize(n_cols());
  const auto row = static_cast<RowId>(row_live_.size());
  for (std::size_t c = 0; c < n_cols(); ++c) {
    if (column_live_[c]) {
      ids_.push_back(dict.intern(normalize_value(raw[c]).text));
      raw_.push_back(std::move(raw[c]));
    } else {
      ids_.push_back(kNoValue);
      raw_.emplace_back();
    }
  }
  row_live_.push_back(true);
  handle_.n_rows = row_live_.size();
  return row;
}

ColumnId Table::append_column(std::string name, const std::vector<std::string>& raw,
                              Dictionary& dict) {
  if (raw.size() != n_rows()) {
    throw Error(ErrorKind::kInvalidInput, "new column needs one value per row slot (" +
                                              std::to_string(n_rows()) + "), got " +
                                              std::to_string(raw.size()));
  }
  if (n_cols() >= UINT16_MAX) throw Error(ErrorKind::kParameter, "too many columns");
  const std::size_t old_cols = n_cols();
  const std::size_t new_cols = old_cols + 1;
  std::vector<ValueId> ids;
  std::vector<std::string> raws;
  ids.reserve(n_rows() * new_cols);
  raws.reserve(n_rows() * new_cols);
  for (std::size_t r = 0; r < n_rows(); ++r) {
    for (std::size_t c = 0; c < old_cols; ++c) {
      ids.push_back(ids_[r * old_cols + c]);
      raws.push_back(std::move(raw_[r * old_cols + c]));
    }
    if (row_live_[r]) {
      ids.push_back(dict.intern(normalize_value(raw[r]).text));
      raws.push_back(raw[r]);
    } else {
      ids.push_back(kNoValue);
      raws.emplace_back();
    }
  }
  ids_ = std::move(ids);
  raw_ = std::move(raws);
  column_names_.push_back(std::move(name));
  column_live_.push_back(true);
  handle_.n_cols = new_cols;
  return static_cast<ColumnId>(old_cols);
}

void Table::set_cell(RowId row, ColumnId col, std::string raw, Dictionary& dict) {
  if (!row_live(row) || !column_live(col)) {
    throw Error(ErrorKind::kNotFound, "no cell (" + std::to_string(row) + ", " +
                                          std::to_string(col) + ") in table " +
                                          std::to_string(id()));
  }
  const std::size_t at = std::size_t{row} * n_cols() + col;
  ids_[at] = dict.intern(normalize_value(raw).text);
  raw_[at] = std::move(raw);
}

void Table::delete_row(RowId row) {
  if (!row_live(row)) {
    throw Error(ErrorKind::kNotFound, "no row " + std::to_string(row) + " in table " +
                                          std::to_string(id()));
  }
  row_live_[row] = false;
  for (std::size_t c = 0; c < n_cols(); ++c) {
    ids_[std::size_t{row} * n_cols() + c] = kNoValue;
    raw_[std::size_t{row} * n_cols() + c].clear();
  }
}

void Table::delete_column(ColumnId col) {
  if (!column_live(col)) {
    throw Error(ErrorKind::kNotFound, "no column " + std::to_string(col) + " in table " +
                                          std::to_string(id()));
  }
  column_live_[col] = false;
  for (std::size_t r = 0; r < n_rows(); ++r) {
    ids_[r * n_cols() + col] = kNoValue;
    raw_[r * n_cols() + col].clear();
  }
}

// ---------------------------------------------------------------------------
// Catalog

const TableHandle& Catalog::ingest_csv(const std::filesystem::path& path,
                                       const CsvOptions& options) {
  RawTable raw = read_csv(path, options);
  return add_table(path.stem().string(), std::move(raw), path.string());
}

const TableHandle& Catalog::add_table(std::string name, RawTable raw, std::string source_path) {
  return add_table_with_id(next_id_, std::move(name), std::move(raw), std::move(source_path));
}

const TableHandle& Catalog::add_table_with_id(TableId id, std::string name, RawTable raw,
                                              std::string source_path) {
  if (tables_.count(id)) {
    throw Error(ErrorKind::kInvalidInput, "duplicate table id " + std::to_string(id));
  }
  if (raw.column_names.empty()) {
    throw Error(ErrorKind::kInvalidInput, "table '" + name + "' has no columns");
  }
  if (raw.column_names.size() > UINT16_MAX) {
    throw Error(ErrorKind::kParameter, "table '" + name + "' has too many columns");
  }
  TableHandle handle{id, std::move(name), 0, raw.column_names.size(), std::move(source_path)};
  Table table(std::move(handle), std::move(raw.column_names));
  for (auto& row : raw.rows) table.append_row(std::move(row), dict_);
  next_id_ = std::max(next_id_, id + 1);
  return tables_.emplace(id, std::move(table)).first->second.handle();
}

void Catalog::remove_table(TableId id) {
  if (tables_.erase(id) == 0) {
    throw Error(ErrorKind::kNotFound, "no table " + std::to_string(id));
  }
}

const Table& Catalog::table(TableId id) const {
  auto it = tables_.find(id);
  if (it == tables_.end()) throw Error(ErrorKind::kNotFound, "no table " + std::to_string(id));
  return it->second;
}

Table& Catalog::mutable_table(TableId id) {
  auto it = tables_.find(id);
  if (it == tables_.end()) throw Error(ErrorKind::kNotFound, "no table " + std::to_string(id));
  return it->second;
}

std::vector<TableHandle> Catalog::handles() const {
  std::vector<TableHandle> out;
  out.reserve(tables_.size());
  for (const auto& [id, t] : tables_) out.push_back(t.handle());
  return out;
}

std::vector<NormalizedValue> Catalog::get_row(TableId table_id, RowId row) const {
  const Table& t = table(table_id);
  if (!t.row_live(row)) {
    throw Error(ErrorKind::kNotFound,
                "no row " + std::to_string(row) + " in table " + std::to_string(table_id));
  }
  std::vector<NormalizedValue> out;
  out.reserve(t.n_cols());
  for (ColumnId c = 0; c < t.n_cols(); ++c) {
    if (!t.column_live(c)) continue;
    const std::string& text = dict_.text(t.cell(row, c));
    out.push_back({text, utf8_length(text)});
  }
  return out;
}

std::size_t Catalog::column_cardinality(TableId table_id, ColumnId column) const {
  const Table& t = table(table_id);
  if (!t.column_live(column)) {
    throw Error(ErrorKind::kNotFound,
                "no column " + std::to_string(column) + " in table " + std::to_string(table_id));
  }
  std::unordered_set<ValueId> seen;
  for (RowId r = 0; r < t.n_rows(); ++r) {
    if (t.row_live(r)) seen.insert(t.cell(r, column));
  }
  return seen.size();
}

CorpusStats Catalog::stats() const {
  CorpusStats s;
  std::vector<bool> seen(dict_.size(), false);
  std::size_t live_cols = 0;
  for (const auto& [id, t] : tables_) {
    for (ColumnId c = 0; c < t.n_cols(); ++c) live_cols += t.column_live(c) ? 1 : 0;
    for (RowId r = 0; r < t.n_rows(); ++r) {
      if (!t.row_live(r)) continue;
      ++s.total_rows;
      for (ColumnId c = 0; c < t.n_cols(); ++c) {
        if (!t.column_live(c)) continue;
        const ValueId v = t.cell(r, c);
        if (!seen[v]) {
          seen[v] = true;
          ++s.unique_value_count;
        }
      }
    }
  }
  if (!tables_.empty() && live_cols > 0) {
    s.avg_columns = std::max(1.0, static_cast<double>(live_cols) / tables_.size());
  }
  return s;
}

void Catalog::write_catalog_jsonl(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  for (const auto& [id, t] : tables_) {
    const TableHandle& h = t.handle();
    nlohmann::ordered_json j;
    j["table_id"] = h.table_id;
    j["name"] = h.name;
    j["n_rows"] = h.n_rows;
    j["n_cols"] = h.n_cols;
    j["source_path"] = h.source_path;
    out << j.dump() << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

std::vector<TableHandle> Catalog::read_catalog_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::vector<TableHandle> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TableHandle h;
      h.table_id = j.at("table_id").get<TableId>();
      h.name = j.at("name").get<std::string>();
      h.n_rows = j.at("n_rows").get<std::size_t>();
      h.n_cols = j.at("n_cols").get<std::size_t>();
      h.source_path = j.at("source_path").get<std::string>();
      out.push_back(std::move(h));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kFormat,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::size_t column_cardinality(const RawTable& table, std::size_t column) {
  if (column >= table.column_names.size()) {
    throw Error(ErrorKind::kNotFound, "no column " + std::to_string(column));
  }
  std::unordered_set<std::string> seen;
  for (const auto& row : table.rows) seen.insert(normalize_value(row[column]).text);
  return seen.size();
}

}  // namespace mate
