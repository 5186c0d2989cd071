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

// Benchmark suites, their CSV records and summary statistics.
//
// Records keep every trial. Summaries drop the first 5% of each group
// (floor(n * 5 / 100) trials, by trial order) as warm-up and are computed in
// integer nanoseconds: min and max exactly, avg and stdev as fixed point
// with three decimals, both rounded toward zero. stdev is the sample
// deviation, sqrt(floor(1e6 * (n * sum(x^2) - sum(x)^2) / (n * (n - 1)))) in
// milli-nanoseconds, with an integer square root.

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "adchain/cryptokit.hpp"
#include "adchain/policy.hpp"

namespace adchain {

enum class Suite : std::uint8_t { kKeygen, kHash, kEncdec, kPolicy };

std::string_view to_string(Suite suite);
Suite parse_suite(std::string_view name);

// One trial. `variant` is "-" for keygen, the scheme for hash, encrypt or
// decrypt for encdec and the placement for policy. `parameter` is key bits,
// the 1-based scheme index or the tree size. `aux` is the profile's interest
// count (hash), the plaintext size (encdec) or the path length (policy).
struct BenchRecord {
  Suite suite = Suite::kKeygen;
  std::string variant = "-";
  std::uint64_t parameter = 0;
  std::uint64_t trial = 0;
  std::uint64_t aux = 0;
  std::uint64_t elapsed_ns = 0;

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

inline constexpr std::string_view kBenchCsvHeader =
    "suite,variant,parameter,trial,aux,elapsed_ns";

void write_records_csv(std::ostream& out, const std::vector<BenchRecord>& records);
// Throws Error(kParse) for a wrong header or malformed row.
std::vector<BenchRecord> read_records_csv(std::istream& in);

struct BenchOptions {
  // Suites stop with Error(kDeadlineExceeded) once this passes; the records
  // gathered so far stay in the output vector.
  std::optional<std::chrono::steady_clock::time_point> deadline;
  std::uint64_t seed = 42;
  // Called after each finished group with (suite, variant, parameter).
  std::function<void(Suite, const std::string&, std::uint64_t)> progress;
};

// Key sizes must be in {512, 1024, 2048, 4096} and count >= 100. Keys come
// from the native generator.
void bench_keygen(const std::vector<int>& sizes, std::size_t count,
                  std::vector<BenchRecord>& out, const BenchOptions& options = {});

// Times hash_profile over `profiles` generated profiles per scheme.
void bench_hash(const std::vector<DigestScheme>& schemes, std::size_t profiles,
                std::vector<BenchRecord>& out, const BenchOptions& options = {});

// Hybrid encryption of `ads` generated ads per key size in
// {1024, 2048, 4096, 8192}. Every round trip must be bit-exact; a mismatch
// throws Error(kInvariantViolation).
void bench_encdec(const std::vector<int>& sizes, std::size_t ads,
                  std::vector<BenchRecord>& out, const BenchOptions& options = {});

// Traversals timed back to back per policy trial. A single traversal takes
// well under the scheduler's preemption cost, so one stray context switch
// would otherwise swamp a whole size's mean.
inline constexpr std::size_t kPolicyRepeats = 64;

// Tree sizes in {100, 200, ..., 1000}. Each trial places the root, builds
// the spine tree (untimed) and times kPolicyRepeats traversals of a context
// that only the leaf of the longer side matches. elapsed_ns is the rounded
// per-traversal delay.
void bench_policy(const std::vector<std::size_t>& sizes, Placement placement,
                  std::size_t trials, std::vector<BenchRecord>& out,
                  const BenchOptions& options = {});

// Rules with distinct requesters and the worst-case context for a spine
// tree rooted at `root_position`.
struct WorstCasePolicy {
  std::vector<Rule> rules;
  RequestContext context;
};
WorstCasePolicy worst_case_policy(const std::vector<Rule>& base, std::size_t root_position);
std::vector<Rule> distinct_requester_rules(std::size_t count, std::uint64_t seed);

struct BenchSummary {
  Suite suite = Suite::kKeygen;
  std::string variant;
  std::uint64_t parameter = 0;
  std::uint64_t n = 0;
  std::uint64_t min_ns = 0;
  std::uint64_t max_ns = 0;
  // Thousandths of a nanosecond.
  std::uint64_t avg_milli_ns = 0;
  std::uint64_t stdev_milli_ns = 0;

  friend bool operator==(const BenchSummary&, const BenchSummary&) = default;
};

inline constexpr std::string_view kSummaryCsvHeader =
    "suite,variant,parameter,n,min_ns,max_ns,avg_ns,stdev_ns";

// Groups by (suite, variant, parameter) in order of first appearance.
std::vector<BenchSummary> summarize(const std::vector<BenchRecord>& records);
void write_summary_csv(std::ostream& out, const std::vector<BenchSummary>& summaries);
std::vector<BenchSummary> read_summary_csv(std::istream& in);

// "123.456" from 123456.
std::string format_milli(std::uint64_t milli);
std::uint64_t parse_milli(std::string_view text);

enum class TrendModel : std::uint8_t { kPower, kExponential };
std::string_view to_string(TrendModel model);

// Least squares on ln(y): power fits ln y = ln a + b ln x, exponential
// ln y = ln a + b x. r_squared is measured in the same log space.
struct TrendFit {
  TrendModel model = TrendModel::kPower;
  double a = 0;
  double b = 0;
  double r_squared = 0;
};

// Needs two distinct positive x values and positive y values. Throws
// Error(kInvalidArgument) otherwise.
TrendFit fit_trend(TrendModel model, const std::vector<double>& x,
                   const std::vector<double>& y);

// Both fits of mean elapsed over parameter for each (suite, variant) with
// at least two parameters.
struct TrendRow {
  Suite suite;
  std::string variant;
  TrendFit fit;
};
std::vector<TrendRow> trend_fits(const std::vector<BenchSummary>& summaries);
void write_trends(std::ostream& out, const std::vector<TrendRow>& rows);

// Policy delay CDF: for each (placement, size) the nearest-rank percentile
// 1..100 of the elapsed times, warm-up included.
void write_policy_cdf(std::ostream& out, const std::vector<BenchRecord>& records);

std::uint64_t isqrt(unsigned __int128 v);

}  // namespace adchain
