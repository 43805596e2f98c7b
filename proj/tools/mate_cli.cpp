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


// Command-line front end: index build/update, query, bench, oracle.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mate/bench.hpp"
#include "mate/corpus.hpp"
#include "mate/discovery.hpp"
#include "mate/hashers.hpp"
#include "mate/index.hpp"

namespace fs = std::filesystem;
using namespace mate;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kIncompatible = 3, kInconsistent = 4 };

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kCompatibility: return kIncompatible;
    case ErrorKind::kConsistency: return kInconsistent;
    default: return kUsage;
  }
}

bool verbose = false;

void note(const std::string& msg) {
  if (verbose) std::cerr << "mate: " << msg << '\n';
}

/// Falls back to $MATE_DATA_DIR/<leaf> when the flag was not given.
fs::path resolve_dir(const std::string& flag_value, const char* leaf, const char* flag) {
  if (!flag_value.empty()) return flag_value;
  if (const char* base = std::getenv("MATE_DATA_DIR"); base && *base) return fs::path(base) / leaf;
  throw Error(ErrorKind::kInvalidInput,
              std::string(flag) + " is required (or set MATE_DATA_DIR)");
}

CsvOptions csv_options(const std::string& delimiter, bool no_header) {
  if (delimiter.size() != 1) throw Error(ErrorKind::kInvalidInput, "delimiter must be one character");
  CsvOptions o;
  o.delimiter = delimiter[0];
  o.has_header = !no_header;
  return o;
}

std::optional<xash::FrequencyRanking> load_ranking(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return xash::FrequencyRanking::load_json(path);
}

void print_json(const nlohmann::ordered_json& j) { std::cout << j.dump(2) << '\n'; }

// ---------------------------------------------------------------------------

struct BuildArgs {
  std::string corpus, index, hasher = "xash", freq_table, delimiter = ",";
  std::size_t bits = 128;
  uint64_t seed = kDefaultSeed;
  bool no_header = false;
};

int cmd_index_build(const BuildArgs& a) {
  const fs::path corpus = resolve_dir(a.corpus, "corpus", "--corpus");
  const fs::path index_dir = resolve_dir(a.index, "index", "--index");
  const HasherKind kind = parse_hasher_token(a.hasher);
  if (kind == HasherKind::kXash && a.bits != 128 && a.bits != 256 && a.bits != 512) {
    throw Error(ErrorKind::kParameter, "xash supports 128, 256 or 512 bits");
  }
  if (a.bits == 0 || a.bits > BitArray::kMaxBits) {
    throw Error(ErrorKind::kParameter, "bits must be in [1, 512]");
  }
  const auto ranking = load_ranking(a.freq_table);
  const CsvOptions opts = csv_options(a.delimiter, a.no_header);

  if (!fs::is_directory(corpus)) throw Error(ErrorKind::kNotFound, "no corpus directory " + corpus.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(corpus)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  }
  if (files.empty()) throw Error(ErrorKind::kInvalidInput, "no tables in " + corpus.string());
  std::sort(files.begin(), files.end());

  Catalog catalog;
  for (const auto& f : files) {
    note("reading " + f.string());
    catalog.ingest_csv(f, opts);
  }
  const CorpusStats stats = catalog.stats();
  HasherConfig config = HasherConfig::for_corpus(kind, a.bits, stats, a.seed);
  if (ranking) config.ranking = *ranking;
  const Index index = Index::build(std::move(catalog), config);
  index.save(index_dir);

  nlohmann::ordered_json j;
  j["index"] = index_dir.string();
  j["tables"] = index.catalog().tables().size();
  j["rows"] = stats.total_rows;
  j["C_unique"] = stats.unique_value_count;
  j["hasher"] = to_token(kind);
  j["bits"] = a.bits;
  if (kind == HasherKind::kXash) {
    j["alpha"] = config.xash.ones_budget;
    j["beta"] = config.xash.segment_width;
    j["a_l"] = config.xash.length_bits;
  } else {
    j["hash_count"] = config.hash_count;
  }
  j["terms"] = index.term_count();
  j["postings"] = index.posting_count();
  print_json(j);
  return kOk;
}

// ---------------------------------------------------------------------------

struct UpdateArgs {
  std::string index, edits, freq_table;
};

int cmd_index_update(const UpdateArgs& a) {
  const fs::path index_dir = resolve_dir(a.index, "index", "--index");
  std::ifstream in(a.edits);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + a.edits);
  Index index = Index::load(index_dir, load_ranking(a.freq_table));

  std::map<std::string, std::size_t> counts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::kInvalidInput, std::string("malformed JSON: ") + e.what());
      }
      const Edit e = parse_edit(j);
      index.apply_edit(e);
      ++counts[std::string(edit_name(e))];
    } catch (const Error& e) {
      throw Error(e.kind() == ErrorKind::kConsistency ? e.kind() : ErrorKind::kInvalidInput,
                  a.edits + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }

  // Write the new state beside the old one, then swap directories.
  const fs::path staging = index_dir.string() + ".staging";
  const fs::path retired = index_dir.string() + ".retired";
  fs::remove_all(staging);
  fs::remove_all(retired);
  index.save(staging);
  fs::rename(index_dir, retired);
  fs::rename(staging, index_dir);
  fs::remove_all(retired);

  nlohmann::ordered_json j;
  j["index"] = index_dir.string();
  j["edits"] = counts;
  j["tables"] = index.catalog().tables().size();
  j["postings"] = index.posting_count();
  print_json(j);
  return kOk;
}

// ---------------------------------------------------------------------------

struct QueryArgs {
  std::string index, query, key_columns, mode = "mate", strategy = "min_cardinality";
  std::string hasher, freq_table, delimiter = ",", output;
  std::size_t k = 10;
  std::size_t bits = 0;
  bool no_pruning = false, row_pairs = false, no_header = false;
};

std::vector<std::size_t> resolve_key_columns(const std::string& spec, const RawTable& table) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = spec.find(',', start);
    std::string token = spec.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto b = token.find_first_not_of(' ');
    const auto e = token.find_last_not_of(' ');
    token = b == std::string::npos ? "" : token.substr(b, e - b + 1);
    if (token.empty()) throw Error(ErrorKind::kInvalidInput, "empty entry in --key-columns");
    const auto& names = table.column_names;
    if (auto it = std::find(names.begin(), names.end(), token); it != names.end()) {
      out.push_back(static_cast<std::size_t>(it - names.begin()));
    } else if (std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      out.push_back(std::stoul(token));
    } else {
      throw Error(ErrorKind::kInvalidInput, "no query column named '" + token + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

nlohmann::ordered_json oracle_json(const QueryKey& q, const Catalog& catalog) {
  nlohmann::ordered_json j;
  j["mode"] = "oracle";
  j["k"] = q.k;
  auto results = nlohmann::ordered_json::array();
  for (const auto& r : brute_force_topk(q, catalog)) {
    results.push_back({{"table_id", r.table_id}, {"j", r.score}, {"mapping", r.mapping}});
  }
  j["results"] = std::move(results);
  return j;
}

int cmd_query(const QueryArgs& a, bool force_oracle) {
  const fs::path index_dir = resolve_dir(a.index, "index", "--index");
  if (a.k == 0) throw Error(ErrorKind::kInvalidInput, "k must be at least 1");
  const bool oracle = force_oracle || a.mode == "oracle";
  const Mode mode = oracle ? Mode::kMate : parse_mode(a.mode);
  const InitialColumnStrategy strategy = parse_strategy(a.strategy);
  const auto ranking = load_ranking(a.freq_table);

  QueryKey q;
  q.table = read_csv(a.query, csv_options(a.delimiter, a.no_header));
  q.columns = resolve_key_columns(a.key_columns, q.table);
  q.k = a.k;
  q.validate();

  const Index index = Index::load(index_dir, ranking);
  nlohmann::ordered_json out;
  if (oracle) {
    out = oracle_json(q, index.catalog());
  } else {
    // A hasher named on the command line must agree with the index.
    std::optional<HasherConfig> query_side;
    if (!a.hasher.empty() || a.bits != 0) {
      query_side = index.config();
      if (!a.hasher.empty()) query_side->kind = parse_hasher_token(a.hasher);
      if (a.bits != 0) query_side->bits = a.bits;
    }
    DiscoveryOptions opt;
    opt.mode = mode;
    opt.strategy = strategy;
    opt.pruning = !a.no_pruning;
    opt.semantics = a.row_pairs ? JoinSemantics::kRowPairs : JoinSemantics::kDistinctTuples;
    opt.query_hasher = query_side ? &*query_side : nullptr;
    out = to_json(discover_topk(q, index, opt));
  }
  if (!a.output.empty()) {
    std::ofstream f(a.output, std::ios::binary);
    f << out.dump(2) << '\n';
    if (!f) throw Error(ErrorKind::kIo, "cannot write " + a.output);
  }
  print_json(out);
  return kOk;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string spec, out;
  bool ablate = false, key_sweep = false;
};

int cmd_bench(const BenchArgs& a) {
  nlohmann::json spec = nlohmann::json::object();
  if (!a.spec.empty()) {
    std::ifstream in(a.spec);
    if (!in) throw Error(ErrorKind::kIo, "cannot read " + a.spec);
    try {
      spec = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kInvalidInput, a.spec + ": " + e.what());
    }
  }
  bench::BenchConfig config = bench::bench_config_from_json(spec);
  config.ablate = config.ablate || a.ablate;
  config.key_sweep = config.key_sweep || a.key_sweep;
  const fs::path out = resolve_dir(a.out, "bench", "--out");

  note("running " + std::to_string(config.seeds.size()) + " seeds");
  const bench::BenchReport report = bench::run_bench(config);
  fs::create_directories(out);
  {
    std::ofstream f(out / "report.json", std::ios::binary);
    f << report.to_json().dump(2) << '\n';
    std::ofstream c(out / "report.csv", std::ios::binary);
    c << report.to_csv();
    std::ofstream t(out / "timings.csv", std::ios::binary);
    t << report.timings_csv();
    if (!f || !c || !t) throw Error(ErrorKind::kIo, "cannot write report to " + out.string());
  }

  nlohmann::ordered_json j;
  j["out"] = out.string();
  auto cells = nlohmann::ordered_json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"hasher", c.hasher.label()},
                     {"mode", to_token(c.mode)},
                     {"strategy", to_token(c.strategy)},
                     {"mean_precision", c.mean_precision},
                     {"mean_fp", c.mean_fp}});
  }
  j["cells"] = std::move(cells);
  if (!report.ablation.empty()) {
    auto ablation = nlohmann::ordered_json::array();
    for (const auto& r : report.ablation) {
      ablation.push_back({{"components", r.name}, {"mean_precision", r.mean_precision}});
    }
    j["ablation"] = std::move(ablation);
  }
  print_json(j);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Composite-key join discovery over table corpora"};
  app.require_subcommand(1);
  app.add_flag("-v,--verbose", verbose, "Diagnostics on stderr");

  auto* index_cmd = app.add_subcommand("index", "Build or update an index");
  index_cmd->require_subcommand(1);

  BuildArgs build;
  auto* build_cmd = index_cmd->add_subcommand("build", "Index a directory of CSV files");
  build_cmd->add_option("--corpus", build.corpus, "Directory of CSV tables");
  build_cmd->add_option("--index", build.index, "Output index directory");
  build_cmd->add_option("--hasher", build.hasher, "xash|bf|lhbf|ht|uniform")->capture_default_str();
  build_cmd->add_option("--bits", build.bits, "Hash width")->capture_default_str();
  build_cmd->add_option("--seed", build.seed, "Seed for the baseline hashers");
  build_cmd->add_option("--freq-table", build.freq_table, "JSON array of 37 characters, most frequent first");
  build_cmd->add_option("--delimiter", build.delimiter, "CSV delimiter")->capture_default_str();
  build_cmd->add_flag("--no-header", build.no_header, "CSV files have no header row");

  UpdateArgs update;
  auto* update_cmd = index_cmd->add_subcommand("update", "Apply a JSON-lines edit file");
  update_cmd->add_option("--index", update.index, "Index directory");
  update_cmd->add_option("--edits", update.edits, "JSON lines of edits")->required();
  update_cmd->add_option("--freq-table", update.freq_table, "Frequency table the index was built with");

  QueryArgs query;
  auto add_query_options = [&](CLI::App* cmd, bool with_mode) {
    cmd->add_option("--index", query.index, "Index directory");
    cmd->add_option("--query", query.query, "Query CSV")->required();
    cmd->add_option("--key-columns", query.key_columns, "Comma-separated 0-based indexes or header names")
        ->required();
    cmd->add_option("-k,--k", query.k, "Number of tables")->capture_default_str();
    cmd->add_option("--freq-table", query.freq_table, "Frequency table the index was built with");
    cmd->add_option("--delimiter", query.delimiter, "CSV delimiter")->capture_default_str();
    cmd->add_flag("--no-header", query.no_header, "Query CSV has no header row");
    cmd->add_option("--output", query.output, "Also write the JSON result here");
    if (!with_mode) return;
    cmd->add_option("--mode", query.mode, "mate|scr|mcr|oracle")->capture_default_str();
    cmd->add_option("--strategy", query.strategy,
                    "min_cardinality|column_order|longest_string|worst|best")
        ->capture_default_str();
    cmd->add_option("--hasher", query.hasher, "Expected index hasher");
    cmd->add_option("--bits", query.bits, "Expected index hash width");
    cmd->add_flag("--no-pruning", query.no_pruning, "Disable table pruning");
    cmd->add_flag("--row-pairs", query.row_pairs, "Score matching row pairs instead of distinct key tuples");
  };
  auto* query_cmd = app.add_subcommand("query", "Find the top-k joinable tables");
  add_query_options(query_cmd, true);
  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive top-k, for checking results");
  add_query_options(oracle_cmd, false);

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Run the synthetic benchmark");
  bench_cmd->add_option("--spec", bench_args.spec, "Bench spec JSON (defaults when omitted)");
  bench_cmd->add_option("--out", bench_args.out, "Report directory");
  bench_cmd->add_flag("--ablate", bench_args.ablate, "Add the XASH component table");
  bench_cmd->add_flag("--key-sweep", bench_args.key_sweep, "Add the key-size sweep");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "mate: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (build_cmd->parsed()) return cmd_index_build(build);
    if (update_cmd->parsed()) return cmd_index_update(update);
    if (query_cmd->parsed()) return cmd_query(query, false);
    if (oracle_cmd->parsed()) return cmd_query(query, true);
    if (bench_cmd->parsed()) return cmd_bench(bench_args);
  } catch (const Error& e) {
    std::cerr << "mate: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "mate: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
