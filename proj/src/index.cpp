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

#include "mate/index.hpp"

#include <algorithm>
#include <set>

namespace mate {

Index::Index(Catalog catalog, const HasherConfig& config)
    : catalog_(std::move(catalog)), hasher_(make_hasher(config)) {}

Index Index::build(Catalog catalog, const HasherConfig& config) {
  if (config.kind == HasherKind::kXash && config.xash.bits != config.bits) {
    throw Error(ErrorKind::kParameter, "hasher width " + std::to_string(config.bits) +
                                           " differs from xash params width " +
                                           std::to_string(config.xash.bits));
  }
  Index index(std::move(catalog), config);
  const Dictionary& dict = index.catalog_.dictionary();
  index.postings_.assign(dict.size(), {});

  // Each distinct value is hashed once.
  std::vector<std::optional<BitArray>> hashes(dict.size());
  for (const auto& [id, t] : index.catalog_.tables()) {
    auto& keys = index.super_keys_[id];
    keys.assign(t.n_rows(), BitArray(config.bits));
    for (RowId r = 0; r < t.n_rows(); ++r) {
      if (!t.row_live(r)) continue;
      for (ColumnId c = 0; c < t.n_cols(); ++c) {
        if (!t.column_live(c)) continue;
        const ValueId v = t.cell(r, c);
        // Tables, rows and columns are visited in order, so appending keeps
        // every posting list sorted.
        index.postings_[v].push_back({id, c, r});
        if (!hashes[v]) hashes[v] = index.hash_value(v);
        keys[r] |= *hashes[v];
      }
    }
  }
  return index;
}

BitArray Index::hash_value(ValueId v) const {
  return hasher_->hash_text(catalog_.dictionary().text(v));
}

PostingList Index::lookup(const NormalizedValue& value) const {
  PostingList out{value, {}};
  const auto items = postings(value.text);
  out.items.assign(items.begin(), items.end());
  return out;
}

std::span<const PostingItem> Index::postings(ValueId value) const {
  if (value >= postings_.size()) return {};
  return postings_[value];
}

std::span<const PostingItem> Index::postings(std::string_view normalized_text) const {
  return postings(catalog_.dictionary().find(normalized_text));
}

const BitArray& Index::super_key(TableId table, RowId row) const {
  auto it = super_keys_.find(table);
  if (it == super_keys_.end() || !catalog_.table(table).row_live(row)) {
    throw Error(ErrorKind::kNotFound, "no super key for table " + std::to_string(table) +
                                          " row " + std::to_string(row));
  }
  return it->second[row];
}

std::size_t Index::term_count() const {
  return static_cast<std::size_t>(
      std::count_if(postings_.begin(), postings_.end(), [](const auto& p) { return !p.empty(); }));
}

std::size_t Index::posting_count() const {
  std::size_t n = 0;
  for (const auto& p : postings_) n += p.size();
  return n;
}

// ---------------------------------------------------------------------------
// Edits

void Index::add_posting(ValueId v, const CellLocation& loc) {
  if (v >= postings_.size()) postings_.resize(std::size_t{v} + 1);
  auto& list = postings_[v];
  list.insert(std::lower_bound(list.begin(), list.end(), loc), loc);
}

void Index::remove_posting(ValueId v, const CellLocation& loc) {
  auto& list = postings_.at(v);
  auto it = std::lower_bound(list.begin(), list.end(), loc);
  if (it == list.end() || *it != loc) {
    throw Error(ErrorKind::kConsistency, "posting missing during edit");
  }
  list.erase(it);
}

void Index::index_row(const Table& t, RowId row) {
  for (ColumnId c = 0; c < t.n_cols(); ++c) {
    if (t.column_live(c)) add_posting(t.cell(row, c), {t.id(), c, row});
  }
  rehash_row(t, row);
}

void Index::unindex_row(const Table& t, RowId row) {
  for (ColumnId c = 0; c < t.n_cols(); ++c) {
    if (t.column_live(c)) remove_posting(t.cell(row, c), {t.id(), c, row});
  }
}

void Index::rehash_row(const Table& t, RowId row) {
  auto& keys = super_keys_[t.id()];
  if (keys.size() < t.n_rows()) keys.resize(t.n_rows(), BitArray(hasher_->bits()));
  BitArray key(hasher_->bits());
  if (t.row_live(row)) {
    for (ColumnId c = 0; c < t.n_cols(); ++c) {
      if (t.column_live(c)) key |= hash_value(t.cell(row, c));
    }
  }
  keys[row] = key;
}

namespace {

void require_row(const Table& t, RowId row) {
  if (!t.row_live(row)) {
    throw Error(ErrorKind::kNotFound,
                "no row " + std::to_string(row) + " in table " + std::to_string(t.id()));
  }
}

void require_column(const Table& t, ColumnId col) {
  if (!t.column_live(col)) {
    throw Error(ErrorKind::kNotFound,
                "no column " + std::to_string(col) + " in table " + std::to_string(t.id()));
  }
}

}  // namespace

void Index::apply_edit(const Edit& e) {
  Dictionary& dict = catalog_.dictionary();
  std::visit(
      [&](const auto& op) {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, edit::InsertTable>) {
          RawTable raw{op.columns, op.rows};
          for (const auto& row : raw.rows) {
            if (row.size() > raw.column_names.size()) {
              throw Error(ErrorKind::kInvalidInput, "inserted row wider than its table");
            }
          }
          const TableHandle& h = catalog_.add_table(op.name, std::move(raw));
          const Table& t = catalog_.table(h.table_id);
          super_keys_[t.id()].assign(t.n_rows(), BitArray(hasher_->bits()));
          for (RowId r = 0; r < t.n_rows(); ++r) index_row(t, r);
        } else if constexpr (std::is_same_v<T, edit::InsertRow>) {
          Table& t = catalog_.mutable_table(op.table_id);
          const RowId r = t.append_row(op.values, dict);
          index_row(t, r);
        } else if constexpr (std::is_same_v<T, edit::AddColumn>) {
          Table& t = catalog_.mutable_table(op.table_id);
          const ColumnId c = t.append_column(op.name, op.values, dict);
          // The new column only adds bits, so OR into the existing keys.
          auto& keys = super_keys_[t.id()];
          for (RowId r = 0; r < t.n_rows(); ++r) {
            if (!t.row_live(r)) continue;
            add_posting(t.cell(r, c), {t.id(), c, r});
            keys[r] |= hash_value(t.cell(r, c));
          }
        } else if constexpr (std::is_same_v<T, edit::UpdateCell>) {
          Table& t = catalog_.mutable_table(op.table_id);
          require_row(t, op.row_id);
          require_column(t, op.column_id);
          remove_posting(t.cell(op.row_id, op.column_id), {t.id(), op.column_id, op.row_id});
          t.set_cell(op.row_id, op.column_id, op.value, dict);
          add_posting(t.cell(op.row_id, op.column_id), {t.id(), op.column_id, op.row_id});
          rehash_row(t, op.row_id);
        } else if constexpr (std::is_same_v<T, edit::DeleteTable>) {
          const Table& t = catalog_.table(op.table_id);
          for (RowId r = 0; r < t.n_rows(); ++r) {
            if (t.row_live(r)) unindex_row(t, r);
          }
          super_keys_.erase(op.table_id);
          catalog_.remove_table(op.table_id);
        } else if constexpr (std::is_same_v<T, edit::DeleteRow>) {
          Table& t = catalog_.mutable_table(op.table_id);
          require_row(t, op.row_id);
          unindex_row(t, op.row_id);
          t.delete_row(op.row_id);
          super_keys_[t.id()][op.row_id] = BitArray(hasher_->bits());
        } else if constexpr (std::is_same_v<T, edit::DeleteColumn>) {
          Table& t = catalog_.mutable_table(op.table_id);
          require_column(t, op.column_id);
          for (RowId r = 0; r < t.n_rows(); ++r) {
            if (t.row_live(r)) {
              remove_posting(t.cell(r, op.column_id), {t.id(), op.column_id, r});
            }
          }
          t.delete_column(op.column_id);
          for (RowId r = 0; r < t.n_rows(); ++r) {
            if (t.row_live(r)) rehash_row(t, r);
          }
        }
      },
      e);
}

std::string_view edit_name(const Edit& e) {
  static constexpr std::string_view kNames[] = {"insert_table", "insert_row",   "add_column",
                                                "update_cell",  "delete_table", "delete_row",
                                                "delete_column"};
  return kNames[e.index()];
}

// ---------------------------------------------------------------------------

std::optional<std::string> index_difference(const Index& a, const Index& b) {
  const Dictionary& da = a.catalog().dictionary();
  const Dictionary& db = b.catalog().dictionary();
  if (!(a.config().kind == b.config().kind && a.config().bits == b.config().bits)) {
    return "hasher differs";
  }
  auto terms = [](const Index& idx, const Dictionary& d) {
    std::set<std::string> out;
    for (ValueId v = 0; v < d.size(); ++v) {
      if (!idx.postings(v).empty()) out.insert(d.text(v));
    }
    return out;
  };
  const auto ta = terms(a, da);
  const auto tb = terms(b, db);
  if (ta != tb) return "term sets differ (" + std::to_string(ta.size()) + " vs " +
                       std::to_string(tb.size()) + ")";
  for (const auto& term : ta) {
    const auto pa = a.postings(term);
    const auto pb = b.postings(term);
    if (!std::equal(pa.begin(), pa.end(), pb.begin(), pb.end())) {
      return "postings differ for '" + term + "'";
    }
  }
  const auto& tables_a = a.catalog().tables();
  const auto& tables_b = b.catalog().tables();
  if (tables_a.size() != tables_b.size()) return "table counts differ";
  for (const auto& [id, t] : tables_a) {
    if (!b.catalog().contains(id)) return "table " + std::to_string(id) + " missing";
    const Table& u = b.catalog().table(id);
    if (t.n_rows() != u.n_rows()) return "row counts differ in table " + std::to_string(id);
    for (RowId r = 0; r < t.n_rows(); ++r) {
      if (t.row_live(r) != u.row_live(r)) return "row liveness differs";
      if (t.row_live(r) && !(a.super_key(id, r) == b.super_key(id, r))) {
        return "super key differs at table " + std::to_string(id) + " row " + std::to_string(r);
      }
    }
  }
  return std::nullopt;
}

}  // namespace mate
