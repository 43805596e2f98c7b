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


// Acceptance suite. Run with criterion numbers as arguments (all when none
// are given); prints one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mate/bench.hpp"
#include "mate/discovery.hpp"
#include "mate/index.hpp"
#include "mate/xash.hpp"
#include "fixtures.hpp"
#include "random_corpus.hpp"

namespace mate {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  std::ostringstream out;
  out.precision(4);
  out << std::fixed << x;
  return out.str();
}

// 1 ---------------------------------------------------------------------------

Outcome parameters() {
  const auto p128 = xash::compute_params(128, 700'000'000);
  const auto p512 = xash::compute_params(512, 700'000'000);
  std::ostringstream d;
  d << "128 bits: alpha=" << p128.ones_budget << " beta=" << p128.segment_width
    << " a_l=" << p128.length_bits << "; 512 bits: beta=" << p512.segment_width
    << " a_l=" << p512.length_bits;
  return {p128.ones_budget == 6 && p128.segment_width == 3 && p128.length_bits == 17 &&
              p512.segment_width == 13 && p512.length_bits == 31,
          d.str()};
}

// 2 ---------------------------------------------------------------------------

Outcome toy_filter() {
  auto h = [](const char* s) { return BitArray::from_string(s); };
  const BitArray key = h("01001000") | h("01100000") | h("00010100");
  const bool covers_row1 = mask_covers(key, h("11111110"));
  const bool covers_row4 = mask_covers(key, h("11011101"));
  const bool covers_row5 = mask_covers(key, h("11101001"));
  std::ostringstream d;
  d << "query key " << key.to_string() << "; covers 11111110=" << covers_row1
    << " 11011101=" << covers_row4 << " 11101001=" << covers_row5;
  return {key.to_string() == "01111100" && covers_row1 && !covers_row4 && !covers_row5, d.str()};
}

// 3 ---------------------------------------------------------------------------

/// Distinct query key tuples found in `table` under one fixed column mapping.
std::size_t fixed_mapping_score(const QueryKey& q, const Catalog& cat, TableId table,
                                const std::vector<ColumnId>& mapping) {
  std::set<std::vector<std::string>> wanted, present;
  for (const auto& row : q.table.rows) {
    std::vector<std::string> t;
    for (std::size_t c : q.columns) t.push_back(normalize_value(row[c]).text);
    wanted.insert(t);
  }
  const Table& t = cat.table(table);
  for (RowId r = 0; r < t.n_rows(); ++r) {
    std::vector<std::string> tuple;
    for (ColumnId c : mapping) tuple.push_back(cat.dictionary().text(t.cell(r, c)));
    present.insert(tuple);
  }
  std::size_t n = 0;
  for (const auto& w : wanted) n += present.count(w);
  return n;
}

Outcome running_example() {
  Catalog cat;
  cat.add_table("T1", testing::people_table());
  cat.add_table("decoy", testing::decoy_table());
  const auto config = HasherConfig::for_corpus(HasherKind::kXash, 128, cat.stats());
  const Index index = Index::build(cat, config);
  const QueryKey q = testing::people_key(1);
  const DiscoveryRun run = discover_topk(q, index);
  const std::size_t reversed = fixed_mapping_score(q, cat, 0, {1, 0, 2});
  std::ostringstream d;
  bool ok = run.results.size() == 1;
  if (ok) {
    const auto& r = run.results[0];
    d << "top-1 table " << r.table_id << " j=" << r.score << " mapping (";
    for (std::size_t i = 0; i < r.mapping.size(); ++i) {
      d << (i ? "," : "") << cat.table(r.table_id).column_names()[r.mapping[i]];
    }
    d << ")";
    ok = r.table_id == 0 && r.score == 5 && r.mapping == std::vector<ColumnId>{0, 1, 2};
  } else {
    d << run.results.size() << " results";
  }
  d << "; reversed mapping j=" << reversed;
  return {ok && reversed == 0, d.str()};
}

// 4 ---------------------------------------------------------------------------

HasherConfig random_config(testing::RandomCorpus& gen, const CorpusStats& stats,
                           std::size_t trial) {
  static const HasherKind kinds[] = {HasherKind::kXash, HasherKind::kBloom,
                                     HasherKind::kLessHashingBloom, HasherKind::kHashTable,
                                     HasherKind::kUniform};
  static const std::size_t widths[] = {128, 256, 512};
  return HasherConfig::for_corpus(kinds[trial % 5], widths[gen.uniform(0, 2)], stats,
                                  gen.rng()());
}

/// True when `row` holds every key value in pairwise distinct live columns.
bool row_joins(const std::vector<ValueId>& key, const Table& t, RowId row) {
  std::vector<bool> used(t.n_cols(), false);
  std::function<bool(std::size_t)> rec = [&](std::size_t i) {
    if (i == key.size()) return true;
    for (ColumnId c = 0; c < t.n_cols(); ++c) {
      if (used[c] || !t.column_live(c) || t.cell(row, c) != key[i]) continue;
      used[c] = true;
      if (rec(i + 1)) return true;
      used[c] = false;
    }
    return false;
  };
  return rec(0);
}

Outcome no_false_negatives() {
  std::size_t pairs = 0, failures = 0;
  const std::size_t trials = 10'000;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    testing::RandomCorpus gen(1'000'000 + trial);
    const Catalog cat = gen.catalog(20, 50, 6);
    const std::size_t m = 1 + trial % 4;
    const QueryKey q = gen.query(cat, m, gen.uniform(1, 10), 10);
    const Index index = Index::build(cat, random_config(gen, cat.stats(), trial));
    const PreparedQuery prepared(q, cat.dictionary());
    for (std::size_t qr = 0; qr < q.table.rows.size(); ++qr) {
      std::vector<NormalizedValue> values;
      for (std::size_t c : q.columns) values.push_back(normalize_value(q.table.rows[qr][c]));
      const BitArray query_key = super_key(values, index.hasher());
      for (const auto& [id, t] : cat.tables()) {
        for (RowId r = 0; r < t.n_rows(); ++r) {
          if (!t.row_live(r) || !row_joins(prepared.key(qr), t, r)) continue;
          ++pairs;
          if (!mask_covers(query_key, index.super_key(id, r))) ++failures;
        }
      }
    }
  }
  return {failures == 0 && pairs > 0, std::to_string(trials) + " trials, " +
                                          std::to_string(pairs) + " joinable pairs, " +
                                          std::to_string(failures) + " filtered out"};
}

// 5 ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
  const std::size_t trials = 200;
  std::size_t mismatches = 0, nonempty = 0, runs = 0;
  std::string first;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    testing::RandomCorpus gen(2'000'000 + trial);
    const Catalog cat = gen.catalog(20, 50, 6);
    const QueryKey q = gen.query(cat, gen.uniform(1, 4), gen.uniform(1, 30), gen.uniform(1, 6));
    const auto expected = score_multiset(brute_force_topk(q, cat));
    if (!expected.empty()) ++nonempty;
    const Index index = Index::build(cat, random_config(gen, cat.stats(), trial));
    for (Mode mode : {Mode::kMate, Mode::kScr, Mode::kMcr}) {
      for (bool pruning : {true, false}) {
        DiscoveryOptions opt;
        opt.mode = mode;
        opt.pruning = pruning;
        ++runs;
        if (score_multiset(discover_topk(q, index, opt).results) != expected) {
          ++mismatches;
          if (first.empty()) {
            first = "; first mismatch: trial " + std::to_string(trial) + " mode " +
                    std::string(to_token(mode)) + (pruning ? " with" : " without") + " pruning";
          }
        }
      }
    }
  }
  return {mismatches == 0, std::to_string(trials) + " trials (" + std::to_string(nonempty) +
                               " with joinable tables), " + std::to_string(runs) + " runs, " +
                               std::to_string(mismatches) + " mismatches" + first};
}

// 6 ---------------------------------------------------------------------------

Outcome update_equivalence() {
  const std::size_t sequences = 100;
  std::size_t mismatches = 0, edits = 0;
  std::map<std::string, std::size_t> seen;
  std::string first;
  for (std::size_t s = 0; s < sequences; ++s) {
    testing::RandomCorpus gen(3'000'000 + s);
    const Catalog cat = gen.catalog(6, 20, 5);
    const HasherConfig config = random_config(gen, cat.stats(), s);
    Index index = Index::build(cat, config);
    for (std::size_t step = 0; step < 20; ++step) {
      const Edit e = gen.edit(index.catalog());
      index.apply_edit(e);
      ++edits;
      ++seen[std::string(edit_name(e))];
    }
    const Index fresh = Index::build(index.catalog(), config);
    if (auto diff = index_difference(index, fresh)) {
      ++mismatches;
      if (first.empty()) first = "; first mismatch: sequence " + std::to_string(s) + ": " + *diff;
    }
  }
  std::string variants;
  for (const auto& [name, n] : seen) variants += (variants.empty() ? "" : " ") + name + "=" + std::to_string(n);
  return {mismatches == 0 && seen.size() == 7,
          std::to_string(sequences) + " sequences, " + std::to_string(edits) + " edits (" +
              variants + "), " + std::to_string(mismatches) + " mismatches" + first};
}

// 7 ---------------------------------------------------------------------------

std::vector<uint64_t> ten_seeds() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}; }

Outcome precision_ordering() {
  bench::BenchConfig config;
  config.seeds = ten_seeds();
  config.matrix.hashers = {{HasherKind::kXash, 128},
                           {HasherKind::kBloom, 128},
                           {HasherKind::kHashTable, 128},
                           {HasherKind::kXash, 512}};
  const bench::BenchReport report = bench::run_bench(config);
  const auto& xash128 = report.cells[0];
  const auto& bf128 = report.cells[1];
  const auto& ht128 = report.cells[2];
  const auto& xash512 = report.cells[3];
  std::size_t fp_wins = 0;
  for (std::size_t i = 0; i < xash128.fp_per_seed.size(); ++i) {
    if (xash128.fp_per_seed[i] <= bf128.fp_per_seed[i]) ++fp_wins;
  }
  const bool ordering = xash128.mean_precision > bf128.mean_precision &&
                        bf128.mean_precision > ht128.mean_precision;
  const bool wider = xash512.mean_precision > xash128.mean_precision;
  std::ostringstream d;
  d << "mean precision xash-128=" << fmt(xash128.mean_precision)
    << " bf-128=" << fmt(bf128.mean_precision) << " ht-128=" << fmt(ht128.mean_precision)
    << " xash-512=" << fmt(xash512.mean_precision) << "; xash FP <= bf FP on " << fp_wins
    << "/10 seeds; xash>bf>ht " << (ordering ? "holds" : "fails") << ", xash-512>xash-128 "
    << (wider ? "holds" : "fails");
  return {ordering && wider && fp_wins >= 8, d.str()};
}

// 8 ---------------------------------------------------------------------------

Outcome ablation_ordering() {
  const auto ladder = bench::ablation_ladder();
  std::map<std::string, std::vector<double>> precision;
  for (uint64_t seed : ten_seeds()) {
    const auto corpus = bench::generate(bench::SyntheticSpec::defaults(seed));
    for (const auto& row : bench::ablate_xash(corpus.catalog(), corpus.queries, 128, ladder)) {
      precision[row.name].push_back(row.precision);
    }
  }
  auto mean = [](const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  };
  std::ostringstream d;
  d << "mean precision";
  std::size_t inversions = 0;
  double previous = -1.0;
  for (const auto& [name, components] : ladder) {
    const double m = mean(precision[name]);
    d << ' ' << name << '=' << fmt(m);
    if (previous > m) ++inversions;
    previous = m;
  }
  d << " (unfiltered " << fmt(mean(precision["none"])) << "); " << inversions
    << " adjacent inversions";
  return {inversions <= 1, d.str()};
}

// 9 ---------------------------------------------------------------------------

Outcome key_size_behavior() {
  bench::SyntheticSpec spec = bench::SyntheticSpec::defaults(1);
  for (auto& p : spec.planted_joins) p.m = 6;
  const auto corpus = bench::generate(spec);
  const Catalog cat = corpus.catalog();
  const Index index =
      Index::build(cat, HasherConfig::for_corpus(HasherKind::kXash, 128, cat.stats()));
  const auto sweep = bench::key_size_sweep(index, corpus.queries, 2, 6);
  bool ok = true;
  std::ostringstream d;
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    d << (i ? "; " : "") << "|Q|=" << sweep[i].m << " verified=" << fmt(sweep[i].mean_rows_verified)
      << " FP=" << fmt(sweep[i].mean_fp);
    if (i > 0) {
      ok = ok && sweep[i].mean_rows_verified <= sweep[i - 1].mean_rows_verified &&
           sweep[i].mean_fp <= sweep[i - 1].mean_fp;
    }
  }
  return {ok, d.str()};
}

// 10 --------------------------------------------------------------------------

Outcome analytic_check() {
  std::vector<std::size_t> chars, with_length;
  bool ok = true;
  for (std::size_t k = 1; k <= 37; ++k) {
    const auto r = bench::analytic_collision_check(128, k);
    if (r.char_only_holds) chars.push_back(k);
    if (r.with_length_holds) with_length.push_back(k);
    ok = ok && r.char_only_holds == (k > 3) && r.with_length_holds == (k > 2);
  }
  auto range = [](const std::vector<std::size_t>& ks) {
    if (ks.empty()) return std::string("never");
    return "K in [" + std::to_string(ks.front()) + ", " + std::to_string(ks.back()) + "]";
  };
  const auto k3 = bench::analytic_collision_check(128, 3);
  return {ok, "character-only holds for " + range(chars) + ", with length for " +
                  range(with_length) + " (expected K>3 and K>2); at K=3: " + k3.lhbf_side +
                  " vs " + k3.xash_side};
}

// 11 --------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome persistence() {
  bench::SyntheticSpec spec = bench::SyntheticSpec::defaults(11);
  spec.n_tables = {60, 60};
  spec.rows_per_table = {5, 300};
  const Catalog cat = bench::generate(spec).catalog();
  const fs::path base = fs::temp_directory_path() / "mate_acceptance_persistence";
  fs::remove_all(base);

  std::size_t checked_files = 0, differing_files = 0, roundtrip_failures = 0;
  std::string first;
  for (auto kind : {HasherKind::kXash, HasherKind::kBloom, HasherKind::kLessHashingBloom,
                    HasherKind::kHashTable, HasherKind::kUniform}) {
    const HasherConfig config = HasherConfig::for_corpus(kind, 256, cat.stats());
    const fs::path a = base / (std::string(to_token(kind)) + "_a");
    const fs::path b = base / (std::string(to_token(kind)) + "_b");
    const Index built = Index::build(cat, config);
    built.save(a);
    Index::build(cat, config).save(b);
    const Index loaded = Index::load(a);
    if (auto diff = index_difference(built, loaded)) {
      ++roundtrip_failures;
      if (first.empty()) first = "; " + std::string(to_token(kind)) + ": " + *diff;
    }
    for (const auto& e : fs::recursive_directory_iterator(a)) {
      if (!e.is_regular_file()) continue;
      ++checked_files;
      if (slurp(e.path()) != slurp(b / fs::relative(e.path(), a))) ++differing_files;
    }
  }
  fs::remove_all(base);
  return {roundtrip_failures == 0 && differing_files == 0 && checked_files > 0,
          "5 hashers: " + std::to_string(roundtrip_failures) + " round-trip differences, " +
              std::to_string(differing_files) + "/" + std::to_string(checked_files) +
              " files differ between identical builds" + first};
}

// 12 --------------------------------------------------------------------------

Outcome popcount_budget() {
  std::mt19937_64 rng(12);
  const std::string chars = "abcdefghijklmnopqrstuvwxyz0123456789 ABCXYZ-_./,;:'\"!?#%&()";
  const uint64_t uniques[] = {1, 1000, 1'000'000, 700'000'000};
  const std::size_t widths[] = {128, 256, 512};
  std::size_t over_budget = 0, mismatched = 0;
  const std::size_t n = 100'000;
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = xash::compute_params(widths[i % 3], uniques[(i / 3) % 4]);
    std::string s;
    const std::size_t len = rng() % 30;
    for (std::size_t j = 0; j < len; ++j) s += chars[rng() % chars.size()];
    const NormalizedValue v = normalize_value(s);
    std::set<char> distinct;
    for (char c : v.text) {
      if (xash::alphabet_index(c)) distinct.insert(c);
    }
    const std::size_t pc = xash::hash(v, p).popcount();
    if (pc > p.ones_budget) ++over_budget;
    if (pc != 1 + std::min(p.ones_budget - 1, distinct.size())) ++mismatched;
  }
  return {over_budget == 0 && mismatched == 0,
          std::to_string(n) + " values, " + std::to_string(over_budget) + " over alpha, " +
              std::to_string(mismatched) + " differ from 1+min(alpha-1, distinct chars)"};
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "parameter reproduction", parameters},
    {2, "toy filter example", toy_filter},
    {3, "running example", running_example},
    {4, "no false negatives", no_false_negatives},
    {5, "oracle equivalence", oracle_equivalence},
    {6, "update equivalence", update_equivalence},
    {7, "precision ordering", precision_ordering},
    {8, "component ablation ordering", ablation_ordering},
    {9, "key-size behavior", key_size_behavior},
    {10, "analytic collision check", analytic_check},
    {11, "persistence", persistence},
    {12, "popcount budget", popcount_budget},
};

}  // namespace
}  // namespace mate

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : mate::kCriteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    mate::Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << c.id << " (" << c.name
              << "): " << o.detail << " [" << mate::fmt(secs) << " s]" << std::endl;
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
