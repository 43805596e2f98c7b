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


#include "mate/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <boost/multiprecision/cpp_int.hpp>

namespace mate::bench {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Spec

SyntheticSpec SyntheticSpec::defaults(uint64_t seed) {
  SyntheticSpec s;
  s.seed = seed;
  for (std::size_t i = 0; i < 20; ++i) {
    PlantedJoin p;
    p.m = 2 + i % 2;
    p.query_rows = 60;
    p.joinable_fraction = 0.3;
    s.planted_joins.push_back(p);
  }
  return s;
}

void SyntheticSpec::validate() const {
  auto check_range = [](const CountRange& r, const char* what, std::size_t floor) {
    if (r.min < floor || r.min > r.max) {
      throw Error(ErrorKind::kInvalidInput, std::string(what) + " range is empty or below " +
                                                std::to_string(floor));
    }
  };
  check_range(n_tables, "n_tables", 1);
  check_range(rows_per_table, "rows_per_table", 1);
  check_range(cols_per_table, "cols_per_table", 1);
  check_range(vocabulary.word_length, "word_length", 1);
  check_range(vocabulary.words_per_value, "words_per_value", 1);
  if (vocabulary.domains == 0 || vocabulary.values_per_domain == 0) {
    throw Error(ErrorKind::kInvalidInput, "vocabulary needs at least one domain and value");
  }
  if (vocabulary.numeric_fraction < 0 || vocabulary.numeric_fraction > 1) {
    throw Error(ErrorKind::kInvalidInput, "numeric_fraction must be in [0, 1]");
  }
  for (std::size_t i = 0; i < planted_joins.size(); ++i) {
    const PlantedJoin& p = planted_joins[i];
    const std::string where = "planted join " + std::to_string(i) + ": ";
    if (p.m == 0 || p.m > cols_per_table.max) {
      throw Error(ErrorKind::kInvalidInput, where + "key width " + std::to_string(p.m) +
                                                " exceeds the widest table");
    }
    if (p.query_rows == 0) throw Error(ErrorKind::kInvalidInput, where + "no query rows");
    if (p.joinable_fraction < 0 || p.joinable_fraction > 1) {
      throw Error(ErrorKind::kInvalidInput, where + "joinable_fraction must be in [0, 1]");
    }
    const auto planted = static_cast<std::size_t>(std::lround(p.joinable_fraction * p.query_rows));
    if (planted > rows_per_table.max) {
      throw Error(ErrorKind::kInvalidInput, where + "more joinable rows than any table holds");
    }
    if (p.target_table && *p.target_table >= n_tables.max) {
      throw Error(ErrorKind::kInvalidInput, where + "target table out of range");
    }
  }
}

namespace {

nlohmann::json range_json(const CountRange& r) { return {r.min, r.max}; }

CountRange range_from(const nlohmann::json& j, CountRange fallback) {
  if (j.is_number_unsigned()) return {j.get<std::size_t>(), j.get<std::size_t>()};
  if (j.is_array() && j.size() == 2) return {j[0].get<std::size_t>(), j[1].get<std::size_t>()};
  if (j.is_null()) return fallback;
  throw Error(ErrorKind::kInvalidInput, "ranges are [min, max] or a single count");
}

}  // namespace

nlohmann::json to_json(const SyntheticSpec& s) {
  nlohmann::json planted = nlohmann::json::array();
  for (const auto& p : s.planted_joins) {
    nlohmann::json e{{"query_rows", p.query_rows},
                     {"m", p.m},
                     {"joinable_fraction", p.joinable_fraction}};
    if (p.target_table) e["target_table"] = *p.target_table;
    planted.push_back(e);
  }
  const auto& v = s.vocabulary;
  return {{"n_tables", range_json(s.n_tables)},
          {"rows_per_table", range_json(s.rows_per_table)},
          {"cols_per_table", range_json(s.cols_per_table)},
          {"vocabulary",
           {{"domains", v.domains},
            {"values_per_domain", v.values_per_domain},
            {"value_skew", v.value_skew},
            {"char_skew", v.char_skew},
            {"word_length", range_json(v.word_length)},
            {"words_per_value", range_json(v.words_per_value)},
            {"numeric_fraction", v.numeric_fraction}}},
          {"planted_joins", planted},
          {"seed", s.seed}};
}

SyntheticSpec spec_from_json(const nlohmann::json& j) {
  try {
    SyntheticSpec s = SyntheticSpec::defaults(j.value("seed", uint64_t{1}));
    s.n_tables = range_from(j.value("n_tables", nlohmann::json()), s.n_tables);
    s.rows_per_table = range_from(j.value("rows_per_table", nlohmann::json()), s.rows_per_table);
    s.cols_per_table = range_from(j.value("cols_per_table", nlohmann::json()), s.cols_per_table);
    if (j.contains("vocabulary")) {
      const auto& v = j["vocabulary"];
      auto& o = s.vocabulary;
      o.domains = v.value("domains", o.domains);
      o.values_per_domain = v.value("values_per_domain", o.values_per_domain);
      o.value_skew = v.value("value_skew", o.value_skew);
      o.char_skew = v.value("char_skew", o.char_skew);
      o.word_length = range_from(v.value("word_length", nlohmann::json()), o.word_length);
      o.words_per_value =
          range_from(v.value("words_per_value", nlohmann::json()), o.words_per_value);
      o.numeric_fraction = v.value("numeric_fraction", o.numeric_fraction);
    }
    if (j.contains("planted_joins")) {
      s.planted_joins.clear();
      for (const auto& e : j["planted_joins"]) {
        PlantedJoin p;
        p.query_rows = e.value("query_rows", p.query_rows);
        p.m = e.value("m", p.m);
        p.joinable_fraction = e.value("joinable_fraction", p.joinable_fraction);
        if (e.contains("target_table")) p.target_table = e["target_table"].get<TableId>();
        s.planted_joins.push_back(p);
      }
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kInvalidInput, std::string("bad synthetic spec: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Generation

namespace {

using Rng = std::mt19937_64;

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::discrete_distribution<std::size_t> zipf(std::size_t n, double s) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / std::pow(static_cast<double>(i + 1), s);
  return {w.begin(), w.end()};
}

struct Domain {
  std::vector<std::string> values;
  std::discrete_distribution<std::size_t> popularity;

  const std::string& draw(Rng& rng) { return values[popularity(rng)]; }
};

Domain text_domain(const VocabularySpec& v, Rng& rng) {
  static constexpr std::string_view kLetters = "etaoinsrhldcumfpgwybvkxjqz";
  // Letter weights follow the English order, perturbed per domain.
  std::vector<double> weights(kLetters.size());
  std::lognormal_distribution<double> noise(0.0, 0.6);
  for (std::size_t i = 0; i < kLetters.size(); ++i) {
    weights[i] = noise(rng) / std::pow(static_cast<double>(i + 1), v.char_skew);
  }
  std::discrete_distribution<std::size_t> letter(weights.begin(), weights.end());
  const double mean_len = static_cast<double>(uniform(rng, v.word_length.min, v.word_length.max));
  std::normal_distribution<double> len_dist(mean_len, 1.5);
  const std::size_t words = uniform(rng, v.words_per_value.min, v.words_per_value.max);

  Domain d;
  std::unordered_set<std::string> seen;
  for (std::size_t attempt = 0;
       attempt < v.values_per_domain * 20 && d.values.size() < v.values_per_domain; ++attempt) {
    std::string value;
    const std::size_t n_words = uniform(rng, words > 1 ? words - 1 : 1, words);
    for (std::size_t w = 0; w < n_words; ++w) {
      if (w) value += ' ';
      const auto len = static_cast<std::size_t>(std::clamp(
          std::lround(len_dist(rng)), static_cast<long>(v.word_length.min),
          static_cast<long>(v.word_length.max)));
      for (std::size_t i = 0; i < len; ++i) {
        char c = kLetters[letter(rng)];
        if (i == 0) c = static_cast<char>(c - 'a' + 'A');
        value += c;
      }
    }
    if (seen.insert(value).second) d.values.push_back(std::move(value));
  }
  return d;
}

Domain numeric_domain(const VocabularySpec& v, Rng& rng) {
  const std::size_t digits = uniform(rng, 2, 8);
  Domain d;
  std::unordered_set<std::string> seen;
  for (std::size_t attempt = 0;
       attempt < v.values_per_domain * 20 && d.values.size() < v.values_per_domain; ++attempt) {
    std::string value(1, static_cast<char>('1' + uniform(rng, 0, 8)));
    for (std::size_t i = 1; i < digits; ++i) value += static_cast<char>('0' + uniform(rng, 0, 9));
    if (seen.insert(value).second) d.values.push_back(std::move(value));
  }
  return d;
}

/// Rows per normalized value, for checking that a tuple co-occurs nowhere.
class CoOccurrence {
 public:
  explicit CoOccurrence(const std::vector<RawTable>& tables) {
    for (std::size_t t = 0; t < tables.size(); ++t) {
      for (std::size_t r = 0; r < tables[t].rows.size(); ++r) {
        const uint64_t ref = (uint64_t{t} << 32) | r;
        for (const auto& cell : tables[t].rows[r]) {
          auto& refs = rows_[normalize_value(cell).text];
          if (refs.empty() || refs.back() != ref) refs.push_back(ref);
        }
      }
    }
  }

  /// True if some row holds every value of `tuple` (values assumed distinct).
  bool any_row_has_all(const std::vector<std::string>& tuple) const {
    std::vector<uint64_t> acc;
    for (std::size_t i = 0; i < tuple.size(); ++i) {
      auto it = rows_.find(normalize_value(tuple[i]).text);
      if (it == rows_.end()) return false;
      if (i == 0) {
        acc = it->second;
      } else {
        std::vector<uint64_t> next;
        std::set_intersection(acc.begin(), acc.end(), it->second.begin(), it->second.end(),
                              std::back_inserter(next));
        acc = std::move(next);
      }
      if (acc.empty()) return false;
    }
    return true;
  }

 private:
  std::unordered_map<std::string, std::vector<uint64_t>> rows_;
};

bool distinct_normalized(const std::vector<std::string>& tuple) {
  std::set<std::string> s;
  for (const auto& v : tuple) {
    if (!s.insert(normalize_value(v).text).second) return false;
  }
  return true;
}

std::size_t exact_joinability(const QueryKey& query, const std::string& name,
                              const RawTable& target) {
  Catalog cat;
  cat.add_table(name, target);
  PreparedQuery prepared(query, cat.dictionary());
  const Table& t = cat.table(0);
  std::vector<CandidatePair> pairs;
  for (uint32_t q = 0; q < prepared.rows(); ++q) {
    const ValueId first = prepared.key(q)[0];
    if (first == kNoValue) continue;
    for (RowId r = 0; r < t.n_rows(); ++r) {
      for (ColumnId c = 0; c < t.n_cols(); ++c) {
        if (t.cell(r, c) == first) {
          pairs.push_back({q, r});
          break;
        }
      }
    }
  }
  return joinability(prepared, t, std::move(pairs)).score;
}

}  // namespace

Catalog GeneratedCorpus::catalog() const {
  Catalog cat;
  for (std::size_t i = 0; i < tables.size(); ++i) cat.add_table(table_names[i], tables[i]);
  return cat;
}

GeneratedCorpus generate(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const VocabularySpec& v = spec.vocabulary;

  std::vector<Domain> domains;
  std::vector<bool> numeric;
  for (std::size_t d = 0; d < v.domains; ++d) {
    std::bernoulli_distribution is_numeric(v.numeric_fraction);
    numeric.push_back(is_numeric(rng));
    domains.push_back(numeric.back() ? numeric_domain(v, rng) : text_domain(v, rng));
    domains.back().popularity = zipf(domains.back().values.size(), v.value_skew);
  }

  GeneratedCorpus out;
  std::vector<std::vector<std::size_t>> column_domains;
  const std::size_t n_tables = uniform(rng, spec.n_tables.min, spec.n_tables.max);
  // Column counts are heavy-tailed: P(c) falls off as 1 / (c - min + 1).
  std::vector<double> col_weights;
  for (std::size_t c = spec.cols_per_table.min; c <= spec.cols_per_table.max; ++c) {
    col_weights.push_back(1.0 / static_cast<double>(c - spec.cols_per_table.min + 1));
  }
  std::discrete_distribution<std::size_t> col_dist(col_weights.begin(), col_weights.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double log_lo = std::log(static_cast<double>(spec.rows_per_table.min));
  const double log_hi = std::log(static_cast<double>(spec.rows_per_table.max) + 1.0);

  for (std::size_t t = 0; t < n_tables; ++t) {
    const std::size_t cols = spec.cols_per_table.min + col_dist(rng);
    const auto rows = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::exp(log_lo + unit(rng) * (log_hi - log_lo))),
        spec.rows_per_table.min, spec.rows_per_table.max);
    std::vector<std::size_t> doms(v.domains);
    std::iota(doms.begin(), doms.end(), 0);
    std::shuffle(doms.begin(), doms.end(), rng);
    doms.resize(std::min(cols, v.domains));
    while (doms.size() < cols) doms.push_back(uniform(rng, 0, v.domains - 1));

    RawTable raw;
    for (std::size_t c = 0; c < cols; ++c) raw.column_names.push_back("col" + std::to_string(c));
    raw.rows.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<std::string> row;
      row.reserve(cols);
      for (std::size_t c = 0; c < cols; ++c) row.push_back(domains[doms[c]].draw(rng));
      raw.rows.push_back(std::move(row));
    }
    char name[32];
    std::snprintf(name, sizeof(name), "t%04zu", t);
    out.table_names.emplace_back(name);
    out.tables.push_back(std::move(raw));
    column_domains.push_back(std::move(doms));
  }

  const CoOccurrence co(out.tables);
  for (std::size_t qi = 0; qi < spec.planted_joins.size(); ++qi) {
    const PlantedJoin& p = spec.planted_joins[qi];
    const auto planted = static_cast<std::size_t>(std::lround(p.joinable_fraction * p.query_rows));

    // Candidate targets, tried in random order until one has enough distinct key tuples.
    std::vector<TableId> targets;
    if (p.target_table) {
      if (*p.target_table >= out.tables.size()) {
        throw Error(ErrorKind::kInvalidInput, "planted join " + std::to_string(qi) +
                                                  ": target table does not exist");
      }
      targets.push_back(*p.target_table);
    } else {
      for (TableId t = 0; t < out.tables.size(); ++t) {
        if (out.tables[t].column_names.size() >= p.m && out.tables[t].rows.size() >= planted) {
          targets.push_back(t);
        }
      }
      std::shuffle(targets.begin(), targets.end(), rng);
    }

    bool placed = false;
    for (TableId target : targets) {
      const RawTable& t = out.tables[target];
      if (t.column_names.size() < p.m) continue;
      std::vector<std::size_t> cols(t.column_names.size());
      std::iota(cols.begin(), cols.end(), 0);
      std::shuffle(cols.begin(), cols.end(), rng);
      cols.resize(p.m);

      std::vector<std::size_t> order(t.rows.size());
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<std::vector<std::string>> rows;
      std::set<std::vector<std::string>> seen;
      for (std::size_t r : order) {
        if (rows.size() == planted) break;
        std::vector<std::string> tuple, norm;
        for (std::size_t c : cols) {
          tuple.push_back(t.rows[r][c]);
          norm.push_back(normalize_value(tuple.back()).text);
        }
        if (!distinct_normalized(tuple) || !seen.insert(norm).second) continue;
        rows.push_back(std::move(tuple));
      }
      if (rows.size() < planted) continue;

      // Rows that join nothing: popular values from the same domains that
      // never share a row anywhere in the corpus.
      while (rows.size() < p.query_rows) {
        std::vector<std::string> tuple;
        for (std::size_t attempt = 0; attempt < 200; ++attempt) {
          tuple.clear();
          for (std::size_t c : cols) tuple.push_back(domains[column_domains[target][c]].draw(rng));
          if (distinct_normalized(tuple) && !co.any_row_has_all(tuple)) break;
          tuple.clear();
        }
        if (tuple.empty()) {
          throw Error(ErrorKind::kInvalidInput,
                      "planted join " + std::to_string(qi) +
                          ": cannot draw non-joinable rows; the vocabulary is too small");
        }
        rows.push_back(std::move(tuple));
      }
      std::shuffle(rows.begin(), rows.end(), rng);

      QueryKey q;
      q.k = 10;
      for (std::size_t i = 0; i < p.m; ++i) q.table.column_names.push_back("key" + std::to_string(i));
      q.table.column_names.push_back("info");
      for (auto& row : rows) {
        row.push_back(domains[uniform(rng, 0, v.domains - 1)].draw(rng));
        q.table.rows.push_back(std::move(row));
      }
      q.columns.resize(p.m);
      std::iota(q.columns.begin(), q.columns.end(), 0);
      out.truth.push_back(
          {qi, target, exact_joinability(q, out.table_names[target], out.tables[target])});
      out.queries.push_back(std::move(q));
      placed = true;
      break;
    }
    if (!placed) {
      throw Error(ErrorKind::kInvalidInput, "planted join " + std::to_string(qi) +
                                                ": no table can hold " + std::to_string(planted) +
                                                " distinct " + std::to_string(p.m) +
                                                "-column tuples");
    }
  }
  return out;
}

void write_corpus(const GeneratedCorpus& corpus, const fs::path& dir) {
  fs::create_directories(dir / "tables");
  fs::create_directories(dir / "queries");
  for (std::size_t i = 0; i < corpus.tables.size(); ++i) {
    write_csv(dir / "tables" / (corpus.table_names[i] + ".csv"), corpus.tables[i]);
  }
  std::ofstream queries(dir / "queries.jsonl", std::ios::binary);
  for (std::size_t i = 0; i < corpus.queries.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "q%03zu.csv", i);
    write_csv(dir / "queries" / name, corpus.queries[i].table);
    nlohmann::ordered_json j;
    j["query_id"] = i;
    j["file"] = std::string("queries/") + name;
    j["key_columns"] = corpus.queries[i].columns;
    j["k"] = corpus.queries[i].k;
    queries << j.dump() << '\n';
  }
  std::ofstream truth(dir / "truth.jsonl", std::ios::binary);
  for (const auto& t : corpus.truth) {
    nlohmann::ordered_json j;
    j["query_id"] = t.query_id;
    j["table_id"] = t.table_id;
    j["true_j"] = t.true_j;
    truth << j.dump() << '\n';
  }
  if (!queries || !truth) throw Error(ErrorKind::kIo, "cannot write corpus to " + dir.string());
}

GeneratedCorpus generate_corpus(const SyntheticSpec& spec, const fs::path& dir) {
  GeneratedCorpus c = generate(spec);
  write_corpus(c, dir);
  return c;
}

// ---------------------------------------------------------------------------
// Matrix

std::string HasherChoice::label() const {
  return std::string(to_token(kind)) + "-" + std::to_string(bits);
}

HasherChoice parse_hasher_choice(std::string_view token) {
  const auto colon = token.find(':');
  HasherChoice c;
  c.kind = parse_hasher_token(token.substr(0, colon));
  if (colon != std::string_view::npos) {
    try {
      c.bits = std::stoul(std::string(token.substr(colon + 1)));
    } catch (const std::exception&) {
      throw Error(ErrorKind::kInvalidInput, "bad hash width in '" + std::string(token) + "'");
    }
    if (c.bits != 128 && c.bits != 256 && c.bits != 512) {
      throw Error(ErrorKind::kInvalidInput, "hash width must be 128, 256 or 512");
    }
  }
  return c;
}

namespace {

Index build_index(const Catalog& catalog, const CorpusStats& stats, HasherChoice h,
                  xash::Components components = xash::Components::full()) {
  HasherConfig config = HasherConfig::for_corpus(h.kind, h.bits, stats);
  config.components = components;
  return Index::build(catalog, config);
}

RunRecord to_record(const DiscoveryRun& run, uint64_t seed, std::size_t query_id, HasherChoice h,
                    InitialColumnStrategy strategy) {
  RunRecord r;
  r.seed = seed;
  r.query_id = query_id;
  r.hasher = h;
  r.mode = run.mode;
  r.strategy = strategy;
  r.rows_checked = run.rows_checked;
  r.true_positives = run.true_positives;
  r.false_positives = run.false_positives;
  r.tables_pruned = run.tables_pruned_rule1 + run.tables_pruned_rule2;
  r.wall_time_ms = run.wall_time_ms;
  r.scores = score_multiset(run.results);
  return r;
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stddev(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

template <typename T>
std::vector<double> as_doubles(const std::vector<T>& xs) {
  return {xs.begin(), xs.end()};
}

}  // namespace

std::vector<RunRecord> run_matrix(const Catalog& catalog, const std::vector<QueryKey>& queries,
                                  const MatrixSpec& matrix, uint64_t seed) {
  const CorpusStats stats = catalog.stats();
  std::vector<RunRecord> records;
  std::vector<const RunRecord*> reference(queries.size(), nullptr);
  std::vector<std::size_t> reference_idx(queries.size(), SIZE_MAX);
  for (const HasherChoice& h : matrix.hashers) {
    const Index index = build_index(catalog, stats, h);
    for (Mode mode : matrix.modes) {
      for (InitialColumnStrategy strategy : matrix.strategies) {
        for (std::size_t qi = 0; qi < queries.size(); ++qi) {
          QueryKey q = queries[qi];
          q.k = matrix.k;
          DiscoveryOptions opt;
          opt.mode = mode;
          opt.strategy = strategy;
          opt.pruning = matrix.pruning;
          records.push_back(to_record(discover_topk(q, index, opt), seed, qi, h, strategy));
          if (reference_idx[qi] == SIZE_MAX) {
            reference_idx[qi] = records.size() - 1;
          } else if (records[reference_idx[qi]].scores != records.back().scores) {
            const RunRecord& a = records[reference_idx[qi]];
            const RunRecord& b = records.back();
            throw Error(ErrorKind::kConsistency,
                        "seed " + std::to_string(seed) + " query " + std::to_string(qi) + ": " +
                            a.hasher.label() + "/" + std::string(to_token(a.mode)) + " and " +
                            b.hasher.label() + "/" + std::string(to_token(b.mode)) +
                            " return different joinability scores");
          }
        }
      }
    }
  }
  return records;
}

double pooled_precision(const std::vector<const RunRecord*>& records) {
  std::size_t tp = 0, fp = 0;
  for (const RunRecord* r : records) {
    tp += r->true_positives;
    fp += r->false_positives;
  }
  return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

std::vector<CellSummary> summarize(const std::vector<RunRecord>& records) {
  using Key = std::tuple<std::size_t, std::size_t, Mode, InitialColumnStrategy>;
  // Cells keep the order in which they first appear.
  std::vector<Key> order;
  std::map<Key, std::map<uint64_t, std::vector<const RunRecord*>>> groups;
  std::map<Key, HasherChoice> choice;
  for (const RunRecord& r : records) {
    Key key{static_cast<std::size_t>(r.hasher.kind), r.hasher.bits, r.mode, r.strategy};
    if (!groups.count(key)) order.push_back(key);
    groups[key][r.seed].push_back(&r);
    choice[key] = r.hasher;
  }
  std::vector<CellSummary> out;
  for (const Key& key : order) {
    CellSummary c;
    c.hasher = choice[key];
    c.mode = std::get<2>(key);
    c.strategy = std::get<3>(key);
    std::vector<double> times;
    for (const auto& [seed, runs] : groups[key]) {
      c.runs += runs.size();
      c.precision_per_seed.push_back(pooled_precision(runs));
      std::size_t fp = 0, checked = 0, verified = 0;
      for (const RunRecord* r : runs) {
        fp += r->false_positives;
        checked += r->rows_checked;
        verified += r->rows_verified();
        times.push_back(r->wall_time_ms);
      }
      c.fp_per_seed.push_back(fp);
      c.rows_checked_per_seed.push_back(checked);
      c.rows_verified_per_seed.push_back(verified);
    }
    c.mean_precision = mean(c.precision_per_seed);
    c.stddev_precision = stddev(c.precision_per_seed);
    c.mean_fp = mean(as_doubles(c.fp_per_seed));
    c.mean_rows_checked = mean(as_doubles(c.rows_checked_per_seed));
    c.mean_rows_verified = mean(as_doubles(c.rows_verified_per_seed));
    c.mean_wall_time_ms = mean(times);
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ablation and sweeps

std::vector<std::pair<std::string, xash::Components>> ablation_ladder() {
  auto make = [](bool length, bool characters, bool positions, bool rotation) {
    xash::Components c;
    c.length = length;
    c.characters = characters;
    c.positions = positions;
    c.rotation = rotation;
    return c;
  };
  return {{"length", make(true, false, false, false)},
          {"chars", make(false, true, false, false)},
          {"chars+positions", make(false, true, true, false)},
          {"chars+positions+length", make(true, true, true, false)},
          {"full", make(true, true, true, true)}};
}

std::vector<AblationRow> ablate_xash(const Catalog& catalog, const std::vector<QueryKey>& queries,
                                     std::size_t bits,
                                     const std::vector<std::pair<std::string, xash::Components>>& ladder,
                                     std::size_t k) {
  const CorpusStats stats = catalog.stats();
  auto run_all = [&](const Index& index, Mode mode) {
    AblationRow row;
    std::size_t tp = 0;
    for (const QueryKey& query : queries) {
      QueryKey q = query;
      q.k = k;
      DiscoveryOptions opt;
      opt.mode = mode;
      const DiscoveryRun run = discover_topk(q, index, opt);
      tp += run.true_positives;
      row.false_positives += run.false_positives;
    }
    row.rows_verified = tp + row.false_positives;
    row.precision = row.rows_verified == 0
                        ? 1.0
                        : static_cast<double>(tp) / static_cast<double>(row.rows_verified);
    return row;
  };

  std::vector<AblationRow> out;
  {
    const Index index = build_index(catalog, stats, {HasherKind::kXash, bits});
    AblationRow none = run_all(index, Mode::kScr);
    none.name = "none";
    none.components.length = none.components.characters = none.components.positions =
        none.components.rotation = false;
    out.push_back(std::move(none));
  }
  for (const auto& [name, components] : ladder) {
    const Index index = build_index(catalog, stats, {HasherKind::kXash, bits}, components);
    AblationRow row = run_all(index, Mode::kMate);
    row.name = name;
    row.components = components;
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<SweepRow> key_size_sweep(const Index& index, const std::vector<QueryKey>& queries,
                                     std::size_t m_min, std::size_t m_max, std::size_t k) {
  if (m_min == 0 || m_min > m_max) throw Error(ErrorKind::kInvalidInput, "empty key-size range");
  std::vector<SweepRow> out;
  for (std::size_t m = m_min; m <= m_max; ++m) {
    SweepRow row;
    row.m = m;
    std::size_t tp = 0, fp = 0, n = 0;
    for (const QueryKey& query : queries) {
      if (query.columns.size() < m) continue;
      QueryKey q = query;
      q.columns.resize(m);
      q.k = k;
      DiscoveryOptions opt;
      opt.strategy = InitialColumnStrategy::kColumnOrder;
      opt.pruning = false;
      const DiscoveryRun run = discover_topk(q, index, opt);
      tp += run.true_positives;
      fp += run.false_positives;
      ++n;
    }
    if (n == 0) {
      throw Error(ErrorKind::kInvalidInput,
                  "no query has " + std::to_string(m) + " key columns");
    }
    row.mean_rows_verified = static_cast<double>(tp + fp) / static_cast<double>(n);
    row.mean_fp = static_cast<double>(fp) / static_cast<double>(n);
    row.precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    out.push_back(row);
  }
  return out;
}

AnalyticResult analytic_collision_check(std::size_t bits, std::size_t k) {
  using boost::multiprecision::cpp_rational;
  if (k < 1 || k > xash::kAlphabetSize) {
    throw Error(ErrorKind::kParameter, "K must be in [1, 37]");
  }
  const xash::Params p = xash::params_with_budget(bits, 2);
  const cpp_rational a(bits);
  const cpp_rational beta(p.segment_width);
  const cpp_rational length_bits(p.length_bits);

  cpp_rational chars(1);
  for (std::size_t i = 0; i < k; ++i) chars /= cpp_rational(xash::kAlphabetSize - k + 1);

  const cpp_rational lhbf = cpp_rational(2) / (a * (a - 1));
  const cpp_rational xash_side = chars / beta;
  const cpp_rational lhbf_length = cpp_rational(1) / (a * (a - 1));
  const cpp_rational xash_length = chars / (beta * length_bits);

  AnalyticResult r;
  r.bits = bits;
  r.k = k;
  r.lhbf_side = lhbf.str();
  r.xash_side = xash_side.str();
  r.lhbf_length_side = lhbf_length.str();
  r.xash_length_side = xash_length.str();
  r.char_only_holds = lhbf > xash_side;
  r.with_length_holds = lhbf_length > xash_length;
  return r;
}

// ---------------------------------------------------------------------------
// Bench driver and report

BenchConfig bench_config_from_json(const nlohmann::json& j) {
  BenchConfig c;
  try {
    if (j.contains("corpus")) c.corpus = spec_from_json(j["corpus"]);
    if (j.contains("seeds")) {
      c.seeds = j["seeds"].get<std::vector<uint64_t>>();
    } else if (j.contains("n_seeds")) {
      c.seeds.clear();
      for (uint64_t s = 1; s <= j["n_seeds"].get<uint64_t>(); ++s) c.seeds.push_back(s);
    }
    if (j.contains("hashers")) {
      c.matrix.hashers.clear();
      for (const auto& h : j["hashers"]) {
        c.matrix.hashers.push_back(parse_hasher_choice(h.get<std::string>()));
      }
    }
    if (j.contains("modes")) {
      c.matrix.modes.clear();
      for (const auto& m : j["modes"]) c.matrix.modes.push_back(parse_mode(m.get<std::string>()));
    }
    if (j.contains("strategies")) {
      c.matrix.strategies.clear();
      for (const auto& s : j["strategies"]) {
        c.matrix.strategies.push_back(parse_strategy(s.get<std::string>()));
      }
    }
    c.matrix.k = j.value("k", c.matrix.k);
    c.matrix.pruning = j.value("pruning", c.matrix.pruning);
    c.ablate = j.value("ablate", c.ablate);
    c.ablation_bits = j.value("ablation_bits", c.ablation_bits);
    c.key_sweep = j.value("key_sweep", c.key_sweep);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kInvalidInput, std::string("bad bench spec: ") + e.what());
  }
  if (c.seeds.empty()) throw Error(ErrorKind::kInvalidInput, "bench spec has no seeds");
  if (c.matrix.k == 0) throw Error(ErrorKind::kInvalidInput, "k must be at least 1");
  if (c.matrix.hashers.empty() || c.matrix.modes.empty() || c.matrix.strategies.empty()) {
    throw Error(ErrorKind::kInvalidInput, "bench matrix has an empty axis");
  }
  return c;
}

namespace {

nlohmann::json config_json(const BenchConfig& c) {
  nlohmann::json hashers = nlohmann::json::array();
  for (const auto& h : c.matrix.hashers) {
    hashers.push_back(std::string(to_token(h.kind)) + ":" + std::to_string(h.bits));
  }
  nlohmann::json modes = nlohmann::json::array();
  for (Mode m : c.matrix.modes) modes.push_back(to_token(m));
  nlohmann::json strategies = nlohmann::json::array();
  for (auto s : c.matrix.strategies) strategies.push_back(to_token(s));
  return {{"corpus", to_json(c.corpus)}, {"seeds", c.seeds},
          {"hashers", hashers},          {"modes", modes},
          {"strategies", strategies},    {"k", c.matrix.k},
          {"pruning", c.matrix.pruning}, {"ablate", c.ablate},
          {"ablation_bits", c.ablation_bits}, {"key_sweep", c.key_sweep}};
}

SyntheticSpec sweep_spec(const SyntheticSpec& base) {
  SyntheticSpec s = base;
  s.planted_joins.clear();
  for (std::size_t i = 0; i < 20; ++i) {
    PlantedJoin p;
    p.m = 6;
    p.query_rows = 60;
    p.joinable_fraction = 0.3;
    s.planted_joins.push_back(p);
  }
  return s;
}

}  // namespace

BenchReport run_bench(const BenchConfig& config) {
  BenchReport report;
  report.config = config_json(config);
  std::map<std::string, AblationSummary> ablation;
  std::vector<std::string> ablation_order;
  std::vector<std::vector<SweepRow>> sweeps;

  for (uint64_t seed : config.seeds) {
    SyntheticSpec spec = config.corpus;
    spec.seed = seed;
    const GeneratedCorpus corpus = generate(spec);
    const Catalog catalog = corpus.catalog();
    auto records = run_matrix(catalog, corpus.queries, config.matrix, seed);
    report.records.insert(report.records.end(), records.begin(), records.end());

    if (config.ablate) {
      for (const AblationRow& row :
           ablate_xash(catalog, corpus.queries, config.ablation_bits, ablation_ladder(),
                       config.matrix.k)) {
        if (!ablation.count(row.name)) ablation_order.push_back(row.name);
        auto& a = ablation[row.name];
        a.name = row.name;
        a.precision_per_seed.push_back(row.precision);
        a.fp_per_seed.push_back(row.false_positives);
      }
    }
    if (config.key_sweep && spec.cols_per_table.max >= 6) {
      SyntheticSpec s = sweep_spec(spec);
      const GeneratedCorpus sc = generate(s);
      const Catalog cat = sc.catalog();
      const Index index = build_index(cat, cat.stats(), {HasherKind::kXash, 128});
      sweeps.push_back(key_size_sweep(index, sc.queries, 2, 6, config.matrix.k));
    }
  }
  report.cells = summarize(report.records);
  for (const auto& name : ablation_order) {
    AblationSummary a = ablation[name];
    a.mean_precision = mean(a.precision_per_seed);
    a.stddev_precision = stddev(a.precision_per_seed);
    report.ablation.push_back(std::move(a));
  }
  if (!sweeps.empty()) {
    for (std::size_t i = 0; i < sweeps.front().size(); ++i) {
      SweepRow row;
      row.m = sweeps.front()[i].m;
      std::vector<double> verified, fp, precision;
      for (const auto& s : sweeps) {
        verified.push_back(s[i].mean_rows_verified);
        fp.push_back(s[i].mean_fp);
        precision.push_back(s[i].precision);
      }
      row.mean_rows_verified = mean(verified);
      row.mean_fp = mean(fp);
      row.precision = mean(precision);
      report.sweep.push_back(row);
    }
  }
  return report;
}

nlohmann::ordered_json BenchReport::to_json() const {
  nlohmann::ordered_json j;
  j["config"] = config;
  auto cells_json = nlohmann::ordered_json::array();
  for (const auto& c : cells) {
    nlohmann::ordered_json e;
    e["hasher"] = to_token(c.hasher.kind);
    e["bits"] = c.hasher.bits;
    e["mode"] = to_token(c.mode);
    e["strategy"] = to_token(c.strategy);
    e["runs"] = c.runs;
    e["mean_precision"] = c.mean_precision;
    e["stddev_precision"] = c.stddev_precision;
    e["mean_fp"] = c.mean_fp;
    e["mean_rows_checked"] = c.mean_rows_checked;
    e["mean_rows_verified"] = c.mean_rows_verified;
    e["precision_per_seed"] = c.precision_per_seed;
    e["fp_per_seed"] = c.fp_per_seed;
    cells_json.push_back(std::move(e));
  }
  j["cells"] = std::move(cells_json);
  auto ablation_json = nlohmann::ordered_json::array();
  for (const auto& a : ablation) {
    nlohmann::ordered_json e;
    e["components"] = a.name;
    e["mean_precision"] = a.mean_precision;
    e["stddev_precision"] = a.stddev_precision;
    e["precision_per_seed"] = a.precision_per_seed;
    e["fp_per_seed"] = a.fp_per_seed;
    ablation_json.push_back(std::move(e));
  }
  j["ablation"] = std::move(ablation_json);
  auto sweep_json = nlohmann::ordered_json::array();
  for (const auto& s : sweep) {
    sweep_json.push_back({{"m", s.m},
                          {"mean_rows_verified", s.mean_rows_verified},
                          {"mean_fp", s.mean_fp},
                          {"precision", s.precision}});
  }
  j["key_sweep"] = std::move(sweep_json);
  auto records_json = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json e;
    e["seed"] = r.seed;
    e["query_id"] = r.query_id;
    e["hasher"] = to_token(r.hasher.kind);
    e["bits"] = r.hasher.bits;
    e["mode"] = to_token(r.mode);
    e["strategy"] = to_token(r.strategy);
    e["rows_checked"] = r.rows_checked;
    e["TP"] = r.true_positives;
    e["FP"] = r.false_positives;
    e["tables_pruned"] = r.tables_pruned;
    e["scores"] = r.scores;
    records_json.push_back(std::move(e));
  }
  j["records"] = std::move(records_json);
  return j;
}

std::string BenchReport::to_csv() const {
  std::ostringstream out;
  out.precision(6);
  out << "section,hasher,bits,mode,strategy,runs,mean_precision,stddev_precision,mean_fp,"
         "mean_rows_checked,mean_rows_verified\n";
  for (const auto& c : cells) {
    out << "matrix," << to_token(c.hasher.kind) << ',' << c.hasher.bits << ','
        << to_token(c.mode) << ',' << to_token(c.strategy) << ',' << c.runs << ','
        << c.mean_precision << ',' << c.stddev_precision << ',' << c.mean_fp << ','
        << c.mean_rows_checked << ',' << c.mean_rows_verified << '\n';
  }
  for (const auto& a : ablation) {
    out << "ablation," << a.name << ",,,," << a.precision_per_seed.size() << ','
        << a.mean_precision << ',' << a.stddev_precision << ','
        << mean(as_doubles(a.fp_per_seed)) << ",,\n";
  }
  for (const auto& s : sweep) {
    out << "key_sweep,xash,128,mate,column_order," << s.m << ',' << s.precision << ",,"
        << s.mean_fp << ",," << s.mean_rows_verified << '\n';
  }
  return out.str();
}

std::string BenchReport::timings_csv() const {
  std::ostringstream out;
  out << "hasher,bits,mode,strategy,runs,mean_wall_time_ms\n";
  for (const auto& c : cells) {
    out << to_token(c.hasher.kind) << ',' << c.hasher.bits << ',' << to_token(c.mode) << ','
        << to_token(c.strategy) << ',' << c.runs << ',' << c.mean_wall_time_ms << '\n';
  }
  return out.str();
}

}  // namespace mate::bench
