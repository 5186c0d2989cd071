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

#include "adchain/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "adchain/admatch.hpp"
#include "adchain/corpus.hpp"
#include "adchain/error.hpp"
#include "adchain/profile.hpp"
#include "adchain/storage.hpp"

namespace adchain {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t since(Clock::time_point t0) {
  const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0);
  return std::max<std::int64_t>(1, ns.count());
}

void check_deadline(const BenchOptions& o) {
  if (o.deadline && Clock::now() >= *o.deadline) {
    throw Error(ErrorCode::kDeadlineExceeded, "benchmark budget exhausted");
  }
}

void done(const BenchOptions& o, Suite s, const std::string& variant, std::uint64_t p) {
  if (o.progress) o.progress(s, variant, p);
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::uint64_t to_u64(std::string_view s, const std::string& what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorCode::kParse, "bad " + what + " '" + std::string(s) + "'");
  }
  return v;
}

std::string chomp(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::string_view to_string(Suite suite) {
  switch (suite) {
    case Suite::kKeygen: return "keygen";
    case Suite::kHash: return "hash";
    case Suite::kEncdec: return "encdec";
    case Suite::kPolicy: return "policy";
  }
  return "?";
}

Suite parse_suite(std::string_view name) {
  for (Suite s : {Suite::kKeygen, Suite::kHash, Suite::kEncdec, Suite::kPolicy}) {
    if (to_string(s) == name) return s;
  }
  throw Error(ErrorCode::kParse, "unknown suite '" + std::string(name) + "'");
}

void write_records_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << kBenchCsvHeader << '\n';
  for (const auto& r : records) {
    out << to_string(r.suite) << ',' << r.variant << ',' << r.parameter << ',' << r.trial
        << ',' << r.aux << ',' << r.elapsed_ns << '\n';
  }
}

std::vector<BenchRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || chomp(line) != kBenchCsvHeader) {
    throw Error(ErrorCode::kParse, "missing benchmark CSV header");
  }
  std::vector<BenchRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = chomp(line);
    if (line.empty()) continue;
    auto f = split(line, ',');
    if (f.size() != 6 || f[1].empty()) {
      throw Error(ErrorCode::kParse, "CSV line " + std::to_string(lineno) + ": 6 fields expected");
    }
    BenchRecord r{parse_suite(f[0]), f[1], to_u64(f[2], "parameter"), to_u64(f[3], "trial"),
                  to_u64(f[4], "aux"), to_u64(f[5], "elapsed_ns")};
    if (r.elapsed_ns == 0) {
      throw Error(ErrorCode::kParse, "CSV line " + std::to_string(lineno) + ": zero elapsed");
    }
    out.push_back(std::move(r));
  }
  return out;
}

void bench_keygen(const std::vector<int>& sizes, std::size_t count,
                  std::vector<BenchRecord>& out, const BenchOptions& options) {
  if (count < 100) throw Error(ErrorCode::kInvalidArgument, "keygen needs at least 100 keys");
  if (sizes.empty()) throw Error(ErrorCode::kInvalidArgument, "no key sizes");
  for (int bits : sizes) {
    if (bits != 512 && bits != 1024 && bits != 2048 && bits != 4096) {
      throw Error(ErrorCode::kUnsupportedKeySize,
                  "keygen sizes are 512, 1024, 2048 and 4096, got " + std::to_string(bits));
    }
  }
  for (int bits : sizes) {
    for (std::size_t t = 0; t < count; ++t) {
      check_deadline(options);
      const auto t0 = Clock::now();
      KeyPair k = generate_keypair(bits);
      const std::uint64_t ns = since(t0);
      out.push_back({Suite::kKeygen, "-", static_cast<std::uint64_t>(bits), t,
                     static_cast<std::uint64_t>(k.modulus_bits()), ns});
    }
    done(options, Suite::kKeygen, "-", bits);
  }
}

void bench_hash(const std::vector<DigestScheme>& schemes, std::size_t profiles,
                std::vector<BenchRecord>& out, const BenchOptions& options) {
  if (profiles == 0) throw Error(ErrorCode::kInvalidArgument, "hash needs at least one profile");
  if (schemes.empty()) throw Error(ErrorCode::kInvalidArgument, "no digest schemes");
  const auto taxonomy = synthetic_taxonomy();
  const auto corpus = generate_profiles(profiles, taxonomy, options.seed);
  for (DigestScheme scheme : schemes) {
    const std::string name(to_string(scheme));
    const auto index = static_cast<std::uint64_t>(scheme) + 1;
    for (std::size_t t = 0; t < corpus.size(); ++t) {
      check_deadline(options);
      const auto t0 = Clock::now();
      auto digests = hash_profile(corpus[t], scheme);
      const std::uint64_t ns = since(t0);
      out.push_back({Suite::kHash, name, index, t, digests.size(), ns});
    }
    done(options, Suite::kHash, name, index);
  }
}

void bench_encdec(const std::vector<int>& sizes, std::size_t ads,
                  std::vector<BenchRecord>& out, const BenchOptions& options) {
  if (ads == 0) throw Error(ErrorCode::kInvalidArgument, "encdec needs at least one ad");
  if (sizes.empty()) throw Error(ErrorCode::kInvalidArgument, "no key sizes");
  for (int bits : sizes) {
    if (bits != 1024 && bits != 2048 && bits != 4096 && bits != 8192) {
      throw Error(ErrorCode::kUnsupportedKeySize,
                  "encdec sizes are 1024, 2048, 4096 and 8192, got " + std::to_string(bits));
    }
  }
  const auto corpus = generate_ads(ads, synthetic_taxonomy(), options.seed);
  std::vector<Bytes> plain;
  for (const auto& ad : corpus) plain.push_back(encode_ad(ad));
  for (int bits : sizes) {
    check_deadline(options);
    const KeyPair key = generate_keypair(bits);
    const auto p = static_cast<std::uint64_t>(bits);
    std::vector<BenchRecord> dec;
    for (std::size_t t = 0; t < plain.size(); ++t) {
      check_deadline(options);
      auto t0 = Clock::now();
      HybridEnvelope env = hybrid_encrypt(plain[t], key.public_key());
      const std::uint64_t enc_ns = since(t0);
      t0 = Clock::now();
      Bytes back = hybrid_decrypt(env, key);
      const std::uint64_t dec_ns = since(t0);
      if (back != plain[t]) {
        throw Error(ErrorCode::kInvariantViolation,
                    "ad " + std::to_string(corpus[t].ad_id) + " did not round trip");
      }
      out.push_back({Suite::kEncdec, "encrypt", p, t, plain[t].size(), enc_ns});
      dec.push_back({Suite::kEncdec, "decrypt", p, t, plain[t].size(), dec_ns});
    }
    out.insert(out.end(), dec.begin(), dec.end());
    done(options, Suite::kEncdec, "encrypt", p);
    done(options, Suite::kEncdec, "decrypt", p);
  }
}

std::vector<Rule> distinct_requester_rules(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::vector<Rule> rules(count);
  for (std::size_t i = 0; i < count; ++i) {
    Digest32 d{};
    for (std::size_t j = 0; j < d.size(); j += 8) {
      const std::uint64_t v = g();
      for (std::size_t k = 0; k < 8; ++k) d[j + k] = static_cast<std::uint8_t>(v >> (8 * k));
    }
    // Index bytes keep the requesters distinct whatever the generator does.
    d[0] = static_cast<std::uint8_t>(i);
    d[1] = static_cast<std::uint8_t>(i >> 8);
    rules[i].match.requesters = {d};
    rules[i].match.tx_types = {TxType::kRequest};
    rules[i].match.resources = {"ads"};
    rules[i].action = Action::kAllow;
    rules[i].tag = "rule-" + std::to_string(i + 1);
  }
  return rules;
}

WorstCasePolicy worst_case_policy(const std::vector<Rule>& base, std::size_t root_position) {
  const std::size_t n = base.size();
  if (root_position == 0 || root_position > n) {
    throw Error(ErrorCode::kInvalidArgument, "root position out of range");
  }
  WorstCasePolicy w{base, {}};
  const bool left_longer = root_position - 1 > n - root_position;
  // The left spine is 1..p-1 and the right spine p+1..n, both in list order.
  const std::size_t target = left_longer ? root_position - 2 : n - 1;
  w.context = {base[target].match.requesters.at(0), TxType::kRequest, "ads"};
  if (left_longer) {
    // The walk only enters the left side when the root matches too.
    w.rules[root_position - 1].match.requesters.push_back(w.context.requester_id);
  }
  return w;
}

void bench_policy(const std::vector<std::size_t>& sizes, Placement placement,
                  std::size_t trials, std::vector<BenchRecord>& out,
                  const BenchOptions& options) {
  if (trials == 0) throw Error(ErrorCode::kInvalidArgument, "policy needs at least one trial");
  if (sizes.empty()) throw Error(ErrorCode::kInvalidArgument, "no tree sizes");
  for (std::size_t n : sizes) {
    if (n < 100 || n > 1000 || n % 100 != 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "tree sizes are 100..1000 in steps of 100, got " + std::to_string(n));
    }
  }
  const std::string variant(to_string(placement));
  std::mt19937_64 placement_rng(options.seed);
  for (std::size_t n : sizes) {
    const auto base = distinct_requester_rules(n, options.seed ^ n);
    for (std::size_t t = 0; t < trials; ++t) {
      check_deadline(options);
      const std::size_t root = choose_root(placement, n, t, placement_rng);
      WorstCasePolicy w = worst_case_policy(base, root);
      const PolicyTree tree = PolicyTree::build(std::move(w.rules), root);
      TraversalResult r;
      const auto t0 = Clock::now();
      for (std::size_t k = 0; k < kPolicyRepeats; ++k) {
        r = tree.traverse(w.context);
        if (r.decision != Decision::kAllow || r.path_length != tree.height()) {
          throw Error(ErrorCode::kInvariantViolation, "worst-case context missed its leaf");
        }
      }
      const std::uint64_t total = since(t0);
      const std::uint64_t ns =
          std::max<std::uint64_t>(1, (total + kPolicyRepeats / 2) / kPolicyRepeats);
      out.push_back({Suite::kPolicy, variant, n, t, r.path_length, ns});
    }
    done(options, Suite::kPolicy, variant, n);
  }
}

std::uint64_t isqrt(unsigned __int128 v) {
  if (v == 0) return 0;
  // Newton from above converges monotonically to floor(sqrt(v)).
  unsigned __int128 x = v;
  unsigned __int128 y = (x + 1) / 2;
  while (y < x) {
    x = y;
    y = (x + v / x) / 2;
  }
  return static_cast<std::uint64_t>(x);
}

std::vector<BenchSummary> summarize(const std::vector<BenchRecord>& records) {
  struct Key {
    Suite suite;
    std::string variant;
    std::uint64_t parameter;
    auto operator<=>(const Key&) const = default;
  };
  std::vector<Key> order;
  std::map<Key, std::vector<const BenchRecord*>> groups;
  for (const auto& r : records) {
    Key k{r.suite, r.variant, r.parameter};
    auto [it, fresh] = groups.try_emplace(k);
    if (fresh) order.push_back(k);
    it->second.push_back(&r);
  }
  std::vector<BenchSummary> out;
  for (const auto& k : order) {
    auto g = groups.at(k);
    std::stable_sort(g.begin(), g.end(), [](const BenchRecord* a, const BenchRecord* b) {
      return a->trial < b->trial;
    });
    const std::size_t skip = g.size() * 5 / 100;
    BenchSummary s{k.suite, k.variant, k.parameter, g.size() - skip, 0, 0, 0, 0};
    unsigned __int128 sum = 0, sum_sq = 0;
    s.min_ns = UINT64_MAX;
    for (std::size_t i = skip; i < g.size(); ++i) {
      const std::uint64_t x = g[i]->elapsed_ns;
      s.min_ns = std::min(s.min_ns, x);
      s.max_ns = std::max(s.max_ns, x);
      sum += x;
      sum_sq += static_cast<unsigned __int128>(x) * x;
    }
    const unsigned __int128 n = s.n;
    s.avg_milli_ns = static_cast<std::uint64_t>(sum * 1000 / n);
    if (s.n > 1) {
      const unsigned __int128 num = n * sum_sq - sum * sum;
      const unsigned __int128 den = n * (n - 1);
      // 1e6 * num can overflow for very slow trials; split the division.
      const unsigned __int128 q = num / den, r = num % den;
      s.stdev_milli_ns = isqrt(q * 1000000 + r * 1000000 / den);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string format_milli(std::uint64_t milli) {
  std::ostringstream o;
  o << milli / 1000 << '.' << std::setw(3) << std::setfill('0') << milli % 1000;
  return o.str();
}

std::uint64_t parse_milli(std::string_view text) {
  const auto dot = text.find('.');
  if (dot == std::string_view::npos || text.size() - dot != 4) {
    throw Error(ErrorCode::kParse, "expected three decimals in '" + std::string(text) + "'");
  }
  return to_u64(text.substr(0, dot), "integer part") * 1000 +
         to_u64(text.substr(dot + 1), "fraction");
}

void write_summary_csv(std::ostream& out, const std::vector<BenchSummary>& summaries) {
  out << kSummaryCsvHeader << '\n';
  for (const auto& s : summaries) {
    out << to_string(s.suite) << ',' << s.variant << ',' << s.parameter << ',' << s.n << ','
        << s.min_ns << ',' << s.max_ns << ',' << format_milli(s.avg_milli_ns) << ','
        << format_milli(s.stdev_milli_ns) << '\n';
  }
}

std::vector<BenchSummary> read_summary_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || chomp(line) != kSummaryCsvHeader) {
    throw Error(ErrorCode::kParse, "missing summary CSV header");
  }
  std::vector<BenchSummary> out;
  while (std::getline(in, line)) {
    line = chomp(line);
    if (line.empty()) continue;
    auto f = split(line, ',');
    if (f.size() != 8) throw Error(ErrorCode::kParse, "summary row needs 8 fields");
    out.push_back({parse_suite(f[0]), f[1], to_u64(f[2], "parameter"), to_u64(f[3], "n"),
                   to_u64(f[4], "min"), to_u64(f[5], "max"), parse_milli(f[6]),
                   parse_milli(f[7])});
  }
  return out;
}

std::string_view to_string(TrendModel model) {
  return model == TrendModel::kPower ? "power" : "exponential";
}

TrendFit fit_trend(TrendModel model, const std::vector<double>& x,
                   const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "trend fit needs two or more points");
  }
  std::vector<double> u, v;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] <= 0 || (model == TrendModel::kPower && x[i] <= 0)) {
      throw Error(ErrorCode::kInvalidArgument, "trend fit needs positive values");
    }
    u.push_back(model == TrendModel::kPower ? std::log(x[i]) : x[i]);
    v.push_back(std::log(y[i]));
  }
  const double n = static_cast<double>(u.size());
  double su = 0, sv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    su += u[i];
    sv += v[i];
  }
  const double mu = su / n, mv = sv / n;
  double suu = 0, suv = 0, svv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    suu += (u[i] - mu) * (u[i] - mu);
    suv += (u[i] - mu) * (v[i] - mv);
    svv += (v[i] - mv) * (v[i] - mv);
  }
  if (suu == 0) throw Error(ErrorCode::kInvalidArgument, "trend fit needs distinct x values");
  TrendFit f;
  f.model = model;
  f.b = suv / suu;
  f.a = std::exp(mv - f.b * mu);
  f.r_squared = svv == 0 ? 1.0 : (suv * suv) / (suu * svv);
  return f;
}

std::vector<TrendRow> trend_fits(const std::vector<BenchSummary>& summaries) {
  std::vector<std::pair<Suite, std::string>> order;
  std::map<std::pair<Suite, std::string>, std::pair<std::vector<double>, std::vector<double>>>
      series;
  for (const auto& s : summaries) {
    auto key = std::make_pair(s.suite, s.variant);
    auto [it, fresh] = series.try_emplace(key);
    if (fresh) order.push_back(key);
    it->second.first.push_back(static_cast<double>(s.parameter));
    it->second.second.push_back(static_cast<double>(s.avg_milli_ns) / 1000.0);
  }
  std::vector<TrendRow> out;
  for (const auto& key : order) {
    const auto& [x, y] = series.at(key);
    if (x.size() < 2) continue;
    for (TrendModel m : {TrendModel::kPower, TrendModel::kExponential}) {
      out.push_back({key.first, key.second, fit_trend(m, x, y)});
    }
  }
  return out;
}

void write_trends(std::ostream& out, const std::vector<TrendRow>& rows) {
  out << "suite,variant,model,a,b,r_squared\n";
  for (const auto& r : rows) {
    out << to_string(r.suite) << ',' << r.variant << ',' << to_string(r.fit.model) << ','
        << std::setprecision(10) << r.fit.a << ',' << r.fit.b << ',' << r.fit.r_squared
        << '\n';
  }
}

void write_policy_cdf(std::ostream& out, const std::vector<BenchRecord>& records) {
  std::map<std::pair<std::string, std::uint64_t>, std::vector<std::uint64_t>> groups;
  for (const auto& r : records) {
    if (r.suite == Suite::kPolicy) groups[{r.variant, r.parameter}].push_back(r.elapsed_ns);
  }
  out << "placement,size,percentile,elapsed_ns\n";
  for (auto& [key, xs] : groups) {
    std::sort(xs.begin(), xs.end());
    for (std::size_t p = 1; p <= 100; ++p) {
      // Nearest rank: ceil(p / 100 * n).
      const std::size_t rank = (p * xs.size() + 99) / 100;
      out << key.first << ',' << key.second << ',' << p << ',' << xs[rank - 1] << '\n';
    }
  }
}

}  // namespace adchain
