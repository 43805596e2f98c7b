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

// On-disk layout of an index directory.
//
// Each binary file is: header | body | u64 checksum, all little-endian.
//   header: "MATEIDX1" | u16 version | u8 token length | token bytes |
//           u16 bits | u16 alpha | u16 beta | u16 length bits |
//           u64 frequency-table digest | u64 seed | u16 hash count
//   terms.bin     body: u64 n | n x (u32 len | bytes | u64 first posting | u32 count)
//   postings.bin  body: u64 n | n x (u32 table | u16 column | u32 row)
//   superkeys.bin body: u64 n | n x (u32 table | u32 row | bits/8 bytes, MSB first)
// The checksum is FNV-1a over every byte before it.

#include <algorithm>
#include <cstring>
#include <fstream>

#include "mate/checksum.hpp"
#include "mate/index.hpp"

namespace mate {

namespace {

constexpr char kMagic[8] = {'M', 'A', 'T', 'E', 'I', 'D', 'X', '1'};
constexpr uint16_t kVersion = 1;

class Writer {
 public:
  void u8(uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u16(uint16_t v) { put(v, 2); }
  void u32(uint32_t v) { put(v, 4); }
  void u64(uint64_t v) { put(v, 8); }
  void bytes(std::string_view s) { buf_.append(s); }
  const std::string& data() const { return buf_; }

  void finish_and_write(const std::filesystem::path& path) {
    u64(fnv1a64(buf_));
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
    out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
  }

 private:
  void put(uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::string buf_;
};

class Reader {
 public:
  Reader(std::string data, std::string name) : data_(std::move(data)), name_(std::move(name)) {}

  uint8_t u8() { return static_cast<uint8_t>(get(1)); }
  uint16_t u16() { return static_cast<uint16_t>(get(2)); }
  uint32_t u32() { return static_cast<uint32_t>(get(4)); }
  uint64_t u64() { return get(8); }
  std::string_view bytes(std::size_t n) {
    need(n);
    std::string_view s(data_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  bool at_end() const { return pos_ == data_.size(); }
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::kFormat, name_ + ": " + what);
  }

  static Reader open(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::string name = path.filename().string();
    if (data.size() < sizeof(kMagic) + 8) {
      throw Error(ErrorKind::kFormat, name + ": truncated");
    }
    if (std::memcmp(data.data(), kMagic, sizeof(kMagic)) != 0) {
      throw Error(ErrorKind::kFormat, name + ": bad magic");
    }
    uint64_t stored = 0;
    for (int i = 0; i < 8; ++i) {
      stored |= uint64_t{static_cast<unsigned char>(data[data.size() - 8 + i])} << (8 * i);
    }
    data.resize(data.size() - 8);
    if (fnv1a64(data) != stored) throw Error(ErrorKind::kChecksum, name + ": checksum mismatch");
    Reader r(std::move(data), name);
    r.pos_ = sizeof(kMagic);
    return r;
  }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) fail("truncated");
  }
  uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= uint64_t{static_cast<unsigned char>(data_[pos_ + i])} << (8 * i);
    }
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::string data_;
  std::string name_;
  std::size_t pos_ = 0;
};

struct Header {
  std::string token;
  uint16_t bits = 0, alpha = 0, beta = 0, length_bits = 0;
  uint64_t ranking_digest = 0;
  uint64_t seed = 0;
  uint16_t hash_count = 0;

  friend bool operator==(const Header&, const Header&) = default;
};

Header header_of(const HasherConfig& c) {
  Header h;
  h.token = std::string(to_token(c.kind));
  h.bits = static_cast<uint16_t>(c.bits);
  if (c.kind == HasherKind::kXash) {
    h.alpha = static_cast<uint16_t>(c.xash.ones_budget);
    h.beta = static_cast<uint16_t>(c.xash.segment_width);
    h.length_bits = static_cast<uint16_t>(c.xash.length_bits);
    h.ranking_digest = c.ranking.digest();
  }
  h.seed = c.seed;
  h.hash_count = static_cast<uint16_t>(c.hash_count);
  return h;
}

void write_header(Writer& w, const Header& h) {
  w.bytes(std::string_view(kMagic, sizeof(kMagic)));
  w.u16(kVersion);
  w.u8(static_cast<uint8_t>(h.token.size()));
  w.bytes(h.token);
  w.u16(h.bits);
  w.u16(h.alpha);
  w.u16(h.beta);
  w.u16(h.length_bits);
  w.u64(h.ranking_digest);
  w.u64(h.seed);
  w.u16(h.hash_count);
}

Header read_header(Reader& r) {
  const uint16_t version = r.u16();
  if (version != kVersion) r.fail("unsupported version " + std::to_string(version));
  Header h;
  h.token = std::string(r.bytes(r.u8()));
  h.bits = r.u16();
  h.alpha = r.u16();
  h.beta = r.u16();
  h.length_bits = r.u16();
  h.ranking_digest = r.u64();
  h.seed = r.u64();
  h.hash_count = r.u16();
  return h;
}

nlohmann::ordered_json table_snapshot(const Table& t) {
  nlohmann::ordered_json j;
  j["table_id"] = t.id();
  j["name"] = t.handle().name;
  j["columns"] = t.column_names();
  std::vector<ColumnId> dead_cols;
  for (ColumnId c = 0; c < t.n_cols(); ++c) {
    if (!t.column_live(c)) dead_cols.push_back(c);
  }
  std::vector<RowId> dead_rows;
  auto rows = nlohmann::ordered_json::array();
  for (RowId r = 0; r < t.n_rows(); ++r) {
    std::vector<std::string> cells;
    if (t.row_live(r)) {
      cells.reserve(t.n_cols());
      for (ColumnId c = 0; c < t.n_cols(); ++c) cells.push_back(t.raw(r, c));
    } else {
      dead_rows.push_back(r);
    }
    rows.push_back(std::move(cells));
  }
  j["deleted_columns"] = dead_cols;
  j["deleted_rows"] = dead_rows;
  j["rows"] = std::move(rows);
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kFormat, path.string() + ": " + e.what());
  }
}

}  // namespace

void Index::save(const std::filesystem::path& dir) const {
  namespace fs = std::filesystem;
  if (!(config().components == xash::Components::full())) {
    throw Error(ErrorKind::kParameter, "indexes built with partial xash components are not saved");
  }
  fs::create_directories(dir / "tables");
  for (const auto& entry : fs::directory_iterator(dir / "tables")) fs::remove(entry.path());

  const Header header = header_of(config());
  const Dictionary& dict = catalog_.dictionary();

  nlohmann::ordered_json manifest;
  manifest["format"] = "mate-index";
  manifest["version"] = kVersion;
  manifest["hasher"] = header.token;
  manifest["bits"] = header.bits;
  manifest["next_table_id"] = catalog_.next_table_id();
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");

  catalog_.write_catalog_jsonl(dir / "catalog.jsonl");
  for (const auto& [id, t] : catalog_.tables()) {
    write_text(dir / "tables" / (std::to_string(id) + ".json"), table_snapshot(t).dump() + "\n");
  }

  std::vector<ValueId> terms;
  for (ValueId v = 0; v < postings_.size(); ++v) {
    if (!postings_[v].empty()) terms.push_back(v);
  }
  std::sort(terms.begin(), terms.end(),
            [&](ValueId a, ValueId b) { return dict.text(a) < dict.text(b); });

  Writer tw, pw, sw;
  write_header(tw, header);
  write_header(pw, header);
  write_header(sw, header);

  tw.u64(terms.size());
  pw.u64(posting_count());
  uint64_t offset = 0;
  for (ValueId v : terms) {
    const std::string& text = dict.text(v);
    tw.u32(static_cast<uint32_t>(text.size()));
    tw.bytes(text);
    tw.u64(offset);
    tw.u32(static_cast<uint32_t>(postings_[v].size()));
    for (const PostingItem& p : postings_[v]) {
      pw.u32(p.table_id);
      pw.u16(p.column_id);
      pw.u32(p.row_id);
    }
    offset += postings_[v].size();
  }

  std::size_t live_rows = 0;
  for (const auto& [id, t] : catalog_.tables()) live_rows += t.live_row_count();
  sw.u64(live_rows);
  std::string bytes(hasher_->bits() / 8 + (hasher_->bits() % 8 != 0), '\0');
  for (const auto& [id, t] : catalog_.tables()) {
    const auto& keys = super_keys_.at(id);
    for (RowId r = 0; r < t.n_rows(); ++r) {
      if (!t.row_live(r)) continue;
      sw.u32(id);
      sw.u32(r);
      keys[r].write_bytes({reinterpret_cast<uint8_t*>(bytes.data()), bytes.size()});
      sw.bytes(bytes);
    }
  }

  tw.finish_and_write(dir / "terms.bin");
  pw.finish_and_write(dir / "postings.bin");
  sw.finish_and_write(dir / "superkeys.bin");
}

Index Index::load(const std::filesystem::path& dir,
                  const std::optional<xash::FrequencyRanking>& ranking) {
  Reader tr = Reader::open(dir / "terms.bin");
  Reader pr = Reader::open(dir / "postings.bin");
  Reader sr = Reader::open(dir / "superkeys.bin");
  const Header header = read_header(tr);
  if (!(read_header(pr) == header) || !(read_header(sr) == header)) {
    throw Error(ErrorKind::kFormat, "index files disagree on their headers");
  }

  HasherConfig config;
  config.kind = parse_hasher_token(header.token);
  config.bits = header.bits;
  config.seed = header.seed;
  config.hash_count = header.hash_count;
  if (config.kind == HasherKind::kXash) {
    config.xash = xash::params_with_budget(header.bits, header.alpha);
    if (config.xash.segment_width != header.beta || config.xash.length_bits != header.length_bits) {
      throw Error(ErrorKind::kFormat, "xash layout in header is inconsistent");
    }
    const auto& chosen = ranking ? *ranking : xash::FrequencyRanking::english();
    if (chosen.digest() != header.ranking_digest) {
      throw Error(ErrorKind::kCompatibility,
                  "index was built with a different character frequency table");
    }
    config.ranking = chosen;
  }

  const nlohmann::json manifest = read_json(dir / "manifest.json");
  Catalog catalog;
  for (const TableHandle& h : Catalog::read_catalog_jsonl(dir / "catalog.jsonl")) {
    const nlohmann::json snap = read_json(dir / "tables" / (std::to_string(h.table_id) + ".json"));
    RawTable raw;
    std::vector<RowId> dead_rows;
    std::vector<ColumnId> dead_cols;
    try {
      raw.column_names = snap.at("columns").get<std::vector<std::string>>();
      dead_rows = snap.at("deleted_rows").get<std::vector<RowId>>();
      dead_cols = snap.at("deleted_columns").get<std::vector<ColumnId>>();
      for (const auto& row : snap.at("rows")) {
        auto cells = row.get<std::vector<std::string>>();
        cells.resize(raw.column_names.size());
        raw.rows.push_back(std::move(cells));
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kFormat, "table snapshot " + std::to_string(h.table_id) + ": " + e.what());
    }
    catalog.add_table_with_id(h.table_id, h.name, std::move(raw), h.source_path);
    Table& t = catalog.mutable_table(h.table_id);
    for (RowId r : dead_rows) t.delete_row(r);
    for (ColumnId c : dead_cols) t.delete_column(c);
    if (t.n_rows() != h.n_rows || t.n_cols() != h.n_cols) {
      throw Error(ErrorKind::kFormat, "catalog and snapshot disagree for table " +
                                          std::to_string(h.table_id));
    }
  }
  catalog.set_next_table_id(manifest.value("next_table_id", catalog.next_table_id()));

  Index index(std::move(catalog), config);
  const Dictionary& dict = index.catalog_.dictionary();
  index.postings_.assign(dict.size(), {});

  const uint64_t n_terms = tr.u64();
  const uint64_t n_postings = pr.u64();
  uint64_t expected_offset = 0;
  for (uint64_t i = 0; i < n_terms; ++i) {
    const std::string_view text = tr.bytes(tr.u32());
    const uint64_t offset = tr.u64();
    const uint32_t count = tr.u32();
    if (offset != expected_offset || offset + count > n_postings) tr.fail("bad posting range");
    expected_offset += count;
    const ValueId v = dict.find(text);
    if (v == kNoValue) tr.fail("term '" + std::string(text) + "' absent from catalog");
    auto& list = index.postings_[v];
    list.reserve(count);
    for (uint32_t k = 0; k < count; ++k) {
      PostingItem p;
      p.table_id = pr.u32();
      p.column_id = pr.u16();
      p.row_id = pr.u32();
      list.push_back(p);
    }
  }
  if (expected_offset != n_postings || !tr.at_end() || !pr.at_end()) {
    tr.fail("terms and postings do not line up");
  }

  for (const auto& [id, t] : index.catalog_.tables()) {
    index.super_keys_[id].assign(t.n_rows(), BitArray(config.bits));
  }
  const uint64_t n_keys = sr.u64();
  const std::size_t key_bytes = (config.bits + 7) / 8;
  for (uint64_t i = 0; i < n_keys; ++i) {
    const TableId table = sr.u32();
    const RowId row = sr.u32();
    const std::string_view b = sr.bytes(key_bytes);
    auto it = index.super_keys_.find(table);
    if (it == index.super_keys_.end() || row >= it->second.size()) {
      sr.fail("super key for unknown row");
    }
    it->second[row] = BitArray::from_bytes(
        config.bits, {reinterpret_cast<const uint8_t*>(b.data()), b.size()});
  }
  if (!sr.at_end()) sr.fail("trailing bytes");
  return index;
}

// ---------------------------------------------------------------------------
// Edit records

Edit parse_edit(const nlohmann::json& j) {
  try {
    const std::string op = j.at("op").get<std::string>();
    if (op == "insert_table") {
      return edit::InsertTable{j.at("name").get<std::string>(),
                               j.at("columns").get<std::vector<std::string>>(),
                               j.value("rows", std::vector<std::vector<std::string>>{})};
    }
    if (op == "insert_row") {
      return edit::InsertRow{j.at("table_id").get<TableId>(),
                             j.at("values").get<std::vector<std::string>>()};
    }
    if (op == "add_column") {
      return edit::AddColumn{j.at("table_id").get<TableId>(), j.at("name").get<std::string>(),
                             j.at("values").get<std::vector<std::string>>()};
    }
    if (op == "update_cell") {
      return edit::UpdateCell{j.at("table_id").get<TableId>(), j.at("row_id").get<RowId>(),
                              j.at("column_id").get<ColumnId>(), j.at("value").get<std::string>()};
    }
    if (op == "delete_table") return edit::DeleteTable{j.at("table_id").get<TableId>()};
    if (op == "delete_row") {
      return edit::DeleteRow{j.at("table_id").get<TableId>(), j.at("row_id").get<RowId>()};
    }
    if (op == "delete_column") {
      return edit::DeleteColumn{j.at("table_id").get<TableId>(),
                                j.at("column_id").get<ColumnId>()};
    }
    throw Error(ErrorKind::kInvalidInput, "unknown edit op '" + op + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kInvalidInput, std::string("malformed edit: ") + e.what());
  }
}

nlohmann::json to_json(const Edit& e) {
  nlohmann::json j;
  j["op"] = edit_name(e);
  std::visit(
      [&](const auto& op) {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, edit::InsertTable>) {
          j["name"] = op.name;
          j["columns"] = op.columns;
          j["rows"] = op.rows;
        } else if constexpr (std::is_same_v<T, edit::InsertRow>) {
          j["table_id"] = op.table_id;
          j["values"] = op.values;
        } else if constexpr (std::is_same_v<T, edit::AddColumn>) {
          j["table_id"] = op.table_id;
          j["name"] = op.name;
          j["values"] = op.values;
        } else if constexpr (std::is_same_v<T, edit::UpdateCell>) {
          j["table_id"] = op.table_id;
          j["row_id"] = op.row_id;
          j["column_id"] = op.column_id;
          j["value"] = op.value;
        } else if constexpr (std::is_same_v<T, edit::DeleteTable>) {
          j["table_id"] = op.table_id;
        } else if constexpr (std::is_same_v<T, edit::DeleteRow>) {
          j["table_id"] = op.table_id;
          j["row_id"] = op.row_id;
        } else {
          j["table_id"] = op.table_id;
          j["column_id"] = op.column_id;
        }
      },
      e);
  return j;
}

}  // namespace mate
