// Copyright 2026 The adchain Authors.
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

// Command-line front end: corpus setup, scenario simulation, benchmarks and
// chain dump inspection.
//
// Exit codes: 0 ok, 1 usage or input error, 2 failed check or invariant.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "adchain/admatch.hpp"
#include "adchain/bench.hpp"
#include "adchain/corpus.hpp"
#include "adchain/error.hpp"
#include "adchain/ledger.hpp"
#include "adchain/random.hpp"
#include "adchain/scenario.hpp"
#include "adchain/storage.hpp"

namespace fs = std::filesystem;
using namespace adchain;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailed = 2;

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path.string());
  out << text;
}

// ---- setup ----------------------------------------------------------------

struct SetupArgs {
  std::size_t ads = 1000;
  std::string taxonomy;
  std::uint64_t seed = 42;
  std::string out_dir;
  std::string scheme = "sha256";
  int key_bits = 2048;
  std::size_t block_capacity = 64;
};

int run_setup(const SetupArgs& a) {
  const auto taxonomy = a.taxonomy.empty() ? synthetic_taxonomy() : load_taxonomy(a.taxonomy);
  const auto ads = generate_ads(a.ads, taxonomy, a.seed);
  const MatchResult match = assign_ads(ads, taxonomy);
  SeededByteSource rng(a.seed, "setup");
  SeededByteSource key_stream(a.seed, "key/group");
  const KeyPair group = generate_keypair(a.key_bits, key_stream());
  const auto index = global_setup(ads, taxonomy, group.public_key(),
                                  parse_digest_scheme(a.scheme), rng);
  std::size_t bytes = 0;
  for (const auto& ad : ads) bytes += ad.payload.size();

  std::cout << "ads              " << ads.size() << " (" << bytes << " payload bytes)\n"
            << "interests        " << taxonomy.size() << "\n"
            << "interests w/ ads " << index.entries.size() << "\n"
            << "unassigned ads   " << match.unassigned.size() << "\n"
            << "index records    " << index.record_count() << "\n"
            << "storage blocks   "
            << blocking_factor(index.record_count(), a.block_capacity) << " of "
            << a.block_capacity << " records\n";
  if (!a.out_dir.empty()) {
    std::ostringstream ads_tsv, tax_tsv;
    write_ads_manifest(ads_tsv, ads);
    write_taxonomy(tax_tsv, taxonomy);
    write_file(fs::path(a.out_dir) / "ads.tsv", ads_tsv.str());
    write_file(fs::path(a.out_dir) / "taxonomy.tsv", tax_tsv.str());
    std::cout << "wrote " << (fs::path(a.out_dir) / "ads.tsv").string() << " and "
              << (fs::path(a.out_dir) / "taxonomy.tsv").string() << "\n";
  }
  return kExitOk;
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::vector<std::string> scenarios;
  std::optional<std::uint64_t> seed;
  std::string log;
  std::string dump;
  std::string out_dir;
  unsigned jobs = 1;
};

struct SimulateOutcome {
  std::string text;
  SimulationReport report;
  bool ok = false;
};

SimulateOutcome simulate_one(const std::string& path, std::optional<std::uint64_t> seed) {
  SimulateOutcome o;
  o.report = simulate(load_scenario(path), seed);
  std::ostringstream s;
  s << "scenario " << path << "\n";
  for (const auto& c : o.report.checks) {
    s << "  " << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  }
  for (const auto& n : o.report.notes) s << "  note " << n << "\n";
  s << "  billing queue: " << o.report.queued_billing << "\n";
  o.ok = o.report.ok();
  s << "  result: " << (o.ok ? "ok" : "FAILED") << "\n";
  o.text = s.str();
  return o;
}

int run_simulate(SimulateArgs a) {
  if (a.scenarios.empty()) a.scenarios.push_back(ADCHAIN_DEFAULT_SCENARIO);
  if (a.scenarios.size() > 1 && (!a.log.empty() || !a.dump.empty())) {
    throw CLI::ValidationError("--log/--dump", "take one scenario; use --out-dir for several");
  }
  std::vector<std::optional<SimulateOutcome>> results(a.scenarios.size());
  std::vector<std::string> errors(a.scenarios.size());
  std::mutex mu;
  std::size_t next = 0;
  auto worker = [&] {
    while (true) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next == a.scenarios.size()) return;
        i = next++;
      }
      try {
        results[i] = simulate_one(a.scenarios[i], a.seed);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(a.jobs, a.scenarios.size()));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int rc = kExitOk;
  for (std::size_t i = 0; i < a.scenarios.size(); ++i) {
    if (!results[i]) {
      std::cerr << "scenario " << a.scenarios[i] << ": " << errors[i] << "\n";
      rc = std::max(rc, kExitUsage);
      continue;
    }
    const auto& r = *results[i];
    std::cout << r.text;
    if (!r.ok) rc = kExitFailed;
    if (!a.log.empty()) write_file(a.log, r.report.run_log);
    if (!a.dump.empty()) write_file(a.dump, r.report.chain_dump);
    if (!a.out_dir.empty()) {
      const std::string stem = fs::path(a.scenarios[i]).stem().string();
      write_file(fs::path(a.out_dir) / (stem + ".log"), r.report.run_log);
      write_file(fs::path(a.out_dir) / (stem + ".chain"), r.report.chain_dump);
    }
  }
  return rc;
}

// ---- bench ----------------------------------------------------------------

struct BenchArgs {
  std::vector<int> key_sizes;
  std::vector<std::size_t> tree_sizes;
  std::vector<std::string> schemes = {"sha1", "sha224", "sha256", "sha384", "sha512"};
  std::size_t count = 10000;
  std::size_t profiles = 1000;
  std::size_t ads = 1000;
  std::size_t trials = 1000;
  std::string placement = "random";
  std::uint64_t seed = 42;
  std::string out;
  std::string summary;
  std::string trends;
  std::string cdf;
  std::string out_dir;
  double budget_min = 0;
};

BenchOptions options_for(const BenchArgs& a) {
  BenchOptions o;
  o.seed = a.seed;
  if (a.budget_min > 0) {
    o.deadline = std::chrono::steady_clock::now() +
                 std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                     std::chrono::duration<double, std::ratio<60>>(a.budget_min));
  }
  o.progress = [](Suite s, const std::string& variant, std::uint64_t p) {
    std::cerr << "done " << to_string(s) << " " << variant << " " << p << "\n";
  };
  return o;
}

std::vector<Placement> placements(const std::string& name) {
  if (name == "both") return {Placement::kRandom, Placement::kSequential};
  return {parse_placement(name)};
}

void emit(const std::vector<BenchRecord>& records, fs::path out,
          fs::path summary, fs::path trends, fs::path cdf) {
  const auto sums = summarize(records);
  std::ostringstream rec_csv, sum_csv, trend_csv;
  write_records_csv(rec_csv, records);
  write_summary_csv(sum_csv, sums);
  if (!out.empty()) write_file(out, rec_csv.str());
  if (!summary.empty()) write_file(summary, sum_csv.str());
  std::cout << sum_csv.str();
  std::vector<TrendRow> fits;
  try {
    fits = trend_fits(sums);
  } catch (const Error&) {
    // Too few distinct parameters for a fit; the summary stands alone.
  }
  if (!fits.empty()) {
    write_trends(trend_csv, fits);
    std::cout << trend_csv.str();
    if (!trends.empty()) write_file(trends, trend_csv.str());
  }
  if (!cdf.empty()) {
    std::ostringstream c;
    write_policy_cdf(c, records);
    write_file(cdf, c.str());
  }
}

int run_bench(const std::string& suite, const BenchArgs& a) {
  std::vector<BenchRecord> records;
  const BenchOptions o = options_for(a);
  std::vector<DigestScheme> schemes;
  for (const auto& s : a.schemes) schemes.push_back(parse_digest_scheme(s));

  fs::path out = a.out, summary = a.summary, trends = a.trends, cdf = a.cdf;
  if (suite == "parity") {
    const fs::path dir = a.out_dir.empty() ? fs::path("parity") : fs::path(a.out_dir);
    out = dir / "records.csv";
    summary = dir / "summary.csv";
    trends = dir / "trends.csv";
    cdf = dir / "policy_cdf.csv";
  }
  int rc = kExitOk;
  try {
    if (suite == "keygen") {
      bench_keygen(a.key_sizes.empty() ? std::vector<int>{512, 1024, 2048, 4096} : a.key_sizes,
                   a.count, records, o);
    } else if (suite == "hash") {
      bench_hash(schemes, a.profiles, records, o);
    } else if (suite == "encdec") {
      bench_encdec(a.key_sizes.empty() ? std::vector<int>{1024, 2048, 4096, 8192} : a.key_sizes,
                   a.ads, records, o);
    } else if (suite == "policy") {
      std::vector<std::size_t> sizes = a.tree_sizes;
      if (sizes.empty()) {
        for (std::size_t n = 100; n <= 1000; n += 100) sizes.push_back(n);
      }
      for (Placement p : placements(a.placement)) bench_policy(sizes, p, a.trials, records, o);
    } else {
      // The full configuration, cheapest suites first so a budget overrun
      // still leaves them complete.
      bench_hash(schemes, 1000, records, o);
      std::vector<std::size_t> sizes;
      for (std::size_t n = 100; n <= 1000; n += 100) sizes.push_back(n);
      for (Placement p : {Placement::kRandom, Placement::kSequential}) {
        bench_policy(sizes, p, 1000, records, o);
      }
      bench_encdec({1024, 2048, 4096, 8192}, 1000, records, o);
      bench_keygen({512, 1024, 2048, 4096}, 10000, records, o);
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDeadlineExceeded) throw;
    std::cerr << "budget of " << a.budget_min << " min exhausted after " << records.size()
              << " records; writing what was measured\n";
    rc = kExitFailed;
  }
  emit(records, out, summary, trends, cdf);
  return rc;
}

// ---- inspect --------------------------------------------------------------

int run_inspect(const std::string& chain) {
  std::ifstream in(chain, std::ios::binary);
  if (!in) throw Error(ErrorCode::kParse, "cannot open " + chain);
  for (const auto& rec : read_dump(in)) {
    if (rec.kind == DumpKind::kTransaction) {
      std::cout << inspect_json(decode_transaction(rec.bytes)) << "\n";
    } else {
      std::cout << inspect_json(decode_block(rec.bytes)) << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adchain: private ad delivery over a local transaction chain"};
  app.require_subcommand(1);

  SetupArgs setup;
  auto* setup_cmd = app.add_subcommand("setup", "generate an ad corpus and build the index");
  setup_cmd->add_option("--ads", setup.ads, "number of ads")->check(CLI::PositiveNumber);
  setup_cmd->add_option("--taxonomy", setup.taxonomy, "taxonomy TSV (synthetic when absent)")
      ->check(CLI::ExistingFile);
  setup_cmd->add_option("--seed", setup.seed);
  setup_cmd->add_option("--out-dir", setup.out_dir, "write ads.tsv and taxonomy.tsv here");
  setup_cmd->add_option("--scheme", setup.scheme, "interest digest scheme");
  setup_cmd->add_option("--key-bits", setup.key_bits, "group key size");
  setup_cmd->add_option("--block-capacity", setup.block_capacity)
      ->check(CLI::PositiveNumber);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "run scenarios end to end");
  sim_cmd->add_option("--scenario", sim.scenarios, "scenario file (repeatable)")
      ->check(CLI::ExistingFile);
  sim_cmd->add_option("--seed", sim.seed, "override the scenario seed");
  sim_cmd->add_option("--log", sim.log, "write the run log here");
  sim_cmd->add_option("--dump", sim.dump, "write the chain dump here");
  sim_cmd->add_option("--out-dir", sim.out_dir, "write <scenario>.log and .chain here");
  sim_cmd->add_option("--jobs", sim.jobs, "scenarios run in parallel")
      ->check(CLI::PositiveNumber);

  BenchArgs bench;
  std::string suite;
  auto* bench_cmd = app.add_subcommand("bench", "timing suites");
  bench_cmd->add_option("suite", suite, "keygen, hash, encdec, policy or parity")
      ->required()
      ->check(CLI::IsMember({"keygen", "hash", "encdec", "policy", "parity"}));
  bench_cmd->add_option("--sizes", bench.key_sizes, "key sizes (keygen, encdec)")
      ->delimiter(',');
  bench_cmd->add_option("--tree-sizes", bench.tree_sizes, "policy tree sizes")
      ->delimiter(',');
  bench_cmd->add_option("--schemes", bench.schemes, "digest schemes (hash)")->delimiter(',');
  bench_cmd->add_option("--count", bench.count, "keys per size (keygen)");
  bench_cmd->add_option("--profiles", bench.profiles, "profiles (hash)");
  bench_cmd->add_option("--ads", bench.ads, "ads per key size (encdec)");
  bench_cmd->add_option("--trials", bench.trials, "trials per tree size (policy)");
  bench_cmd->add_option("--placement", bench.placement, "random, sequential or both")
      ->check(CLI::IsMember({"random", "sequential", "both"}));
  bench_cmd->add_option("--seed", bench.seed);
  bench_cmd->add_option("--out", bench.out, "raw records CSV");
  bench_cmd->add_option("--summary", bench.summary, "summary CSV");
  bench_cmd->add_option("--trends", bench.trends, "trend fit CSV");
  bench_cmd->add_option("--cdf", bench.cdf, "policy delay CDF CSV");
  bench_cmd->add_option("--out-dir", bench.out_dir, "output directory (parity)");
  bench_cmd->add_option("--budget-min", bench.budget_min, "stop after this many minutes")
      ->check(CLI::NonNegativeNumber);

  std::string chain;
  auto* inspect_cmd = app.add_subcommand("inspect", "print a chain dump as JSON lines");
  inspect_cmd->add_option("--chain", chain, "dump file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*setup_cmd) return run_setup(setup);
    if (*sim_cmd) return run_simulate(sim);
    if (*bench_cmd) return run_bench(suite, bench);
    return run_inspect(chain);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kInvariantViolation ? kExitFailed : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
