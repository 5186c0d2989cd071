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

// Acceptance gate. Each criterion prints one PASS/FAIL line; the exit code
// is nonzero when any selected criterion fails.
//
//   adchain_acceptance [--criterion N] --cli PATH --scenarios DIR --work DIR

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "adchain/admatch.hpp"
#include "adchain/bench.hpp"
#include "adchain/billing.hpp"
#include "adchain/error.hpp"
#include "adchain/merkle.hpp"
#include "adchain/nodes.hpp"
#include "adchain/policy.hpp"
#include "adchain/profile.hpp"
#include "adchain/scenario.hpp"
#include "admatch_oracle.hpp"
#include "policy_oracle.hpp"
#include "world.hpp"

namespace fs = std::filesystem;
using namespace adchain;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned thresholds.
constexpr std::size_t kMatcherCorpora = 20;
constexpr std::size_t kMatcherMaxAds = 50;
constexpr std::size_t kMatcherMaxInterests = 20;
constexpr double kScoreTolerance = 1e-9;
constexpr double kMatcherBudgetSeconds = 10.0;

constexpr std::size_t kPolicyTrees = 1000;
constexpr std::size_t kPolicyContexts = 10;
constexpr std::size_t kPolicyTimingTrials = 1000;
constexpr double kMinSpearman = 0.9;

constexpr std::size_t kMaxMerkleLeaves = 1024;
constexpr std::size_t kMerklePerturbations = 10000;

constexpr std::size_t kRoundTripAds = 1000;
constexpr double kMinExpRSquared = 0.8;

constexpr std::size_t kBillingEvents = 10000;

constexpr double kParityBudgetMinutes = 30.0;

struct Env {
  std::string cli;
  fs::path scenarios;
  fs::path work;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(digits);
  o << v;
  return o.str();
}

int run(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : 128;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ---- 1: matcher against the exhaustive oracle ------------------------------

Outcome matcher_oracle(const Env&) {
  const auto t0 = Clock::now();
  std::size_t pairs = 0;
  double worst = 0;
  for (std::size_t seed = 1; seed <= kMatcherCorpora; ++seed) {
    auto c = testing::random_corpus(1000 + seed, kMatcherMaxAds, kMatcherMaxInterests);
    const MatchResult got = assign_ads(c.ads, c.taxonomy);
    const auto want = testing::oracle_assign(c.ads, c.taxonomy);
    if (got.assignments != want.assignments || got.unassigned != want.unassigned) {
      return {false, "corpus " + std::to_string(seed) + ": assignments differ"};
    }
    for (std::size_t i = 0; i < c.ads.size(); ++i) {
      for (std::size_t j = 0; j < c.taxonomy.size(); ++j) {
        const double d = std::abs(got.scores.at({c.ads[i].ad_id, c.taxonomy[j].interest}) -
                                  want.matrix.cosine[i][j]);
        worst = std::max(worst, d);
        ++pairs;
      }
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << kMatcherCorpora << " corpora, " << pairs << " scores, max error " << worst << ", "
    << fixed(secs, 3) << " s";
  return {worst <= kScoreTolerance && secs < kMatcherBudgetSeconds, d.str()};
}

// ---- 2: policy traversal against the linear scan, delay trend --------------

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2 + 1;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i] / n;
    my += ry[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

Outcome policy_oracle(const Env&) {
  std::mt19937_64 g(2026);
  testing::RandomPolicyGen gen(8);
  std::size_t agree = 0, total = 0;
  for (std::size_t t = 0; t < kPolicyTrees; ++t) {
    const std::size_t n = 100 + g() % 901;
    std::vector<Rule> rules;
    for (std::size_t i = 0; i < n; ++i) rules.push_back(gen.rule(g));
    const std::size_t root = choose_root(Placement::kRandom, n, t, g);
    const PolicyTree tree = PolicyTree::build(rules, root);
    for (std::size_t c = 0; c < kPolicyContexts; ++c) {
      const RequestContext ctx = gen.context(g);
      ++total;
      if (tree.traverse(ctx).decision == testing::linear_scan(rules, root, ctx).decision) {
        ++agree;
      }
    }
  }

  std::vector<std::size_t> sizes;
  for (std::size_t n = 100; n <= 1000; n += 100) sizes.push_back(n);
  std::vector<BenchRecord> records;
  bench_policy(sizes, Placement::kRandom, kPolicyTimingTrials, records);
  const auto sums = summarize(records);
  std::vector<double> x, y;
  bool non_decreasing = true;
  for (const auto& s : sums) {
    if (!y.empty() && static_cast<double>(s.avg_milli_ns) < y.back()) non_decreasing = false;
    x.push_back(static_cast<double>(s.parameter));
    y.push_back(static_cast<double>(s.avg_milli_ns));
  }
  const double rho = spearman(x, y);
  std::ostringstream d;
  d << agree << "/" << total << " decisions agree; mean delay " << format_milli(sums.front().avg_milli_ns)
    << " ns at 100 to " << format_milli(sums.back().avg_milli_ns) << " ns at 1000, spearman "
    << fixed(rho) << (non_decreasing ? ", non-decreasing" : ", not strictly non-decreasing");
  return {agree == total && rho >= kMinSpearman && y.back() > y.front(), d.str()};
}

// ---- 3: Merkle soundness ---------------------------------------------------

Digest32 leaf_digest(std::size_t tree, std::size_t i) {
  return sha256(as_bytes("leaf/" + std::to_string(tree) + "/" + std::to_string(i)));
}

Outcome merkle_soundness(const Env&) {
  std::size_t proofs = 0;
  std::vector<MerkleTree> trees;
  for (std::size_t n = 1; n <= kMaxMerkleLeaves; ++n) {
    std::vector<Digest32> leaves;
    for (std::size_t i = 0; i < n; ++i) leaves.push_back(leaf_digest(n, i));
    MerkleTree t = MerkleTree::build(leaves);
    for (std::size_t i = 0; i < n; ++i) {
      if (!verify_membership(t.root(), t.leaves()[i], t.prove(i))) {
        return {false, "proof " + std::to_string(i) + " of " + std::to_string(n) + " rejected"};
      }
      ++proofs;
    }
    trees.push_back(std::move(t));
  }

  std::mt19937_64 g(31337);
  std::size_t rejected = 0;
  std::map<std::string, std::size_t> kinds;
  for (std::size_t k = 0; k < kMerklePerturbations; ++k) {
    const MerkleTree& t = trees[g() % trees.size()];
    const std::size_t i = g() % t.leaf_count();
    Digest32 root = t.root(), leaf = t.leaves()[i];
    MembershipProof proof = t.prove(i);
    auto flip = [&](Digest32& d) { d[g() % 32] ^= static_cast<std::uint8_t>(1u << (g() % 8)); };
    const int target = proof.siblings.empty() ? static_cast<int>(g() % 2) : static_cast<int>(g() % 5);
    switch (target) {
      case 0: flip(leaf); ++kinds["leaf"]; break;
      case 1: flip(root); ++kinds["root"]; break;
      case 2: case 3: flip(proof.siblings[g() % proof.siblings.size()].digest); ++kinds["sibling"]; break;
      default: {
        // One bit of the proof's position data: a side or the index.
        if (g() % 2) {
          auto& s = proof.siblings[g() % proof.siblings.size()].side;
          s = s == SiblingSide::kLeft ? SiblingSide::kRight : SiblingSide::kLeft;
          ++kinds["side"];
        } else {
          proof.leaf_index ^= std::size_t{1} << (g() % 64);
          ++kinds["index"];
        }
      }
    }
    if (!verify_membership(root, leaf, proof)) ++rejected;
  }
  std::ostringstream d;
  d << proofs << " proofs verify over 1.." << kMaxMerkleLeaves << " leaves; " << rejected << "/"
    << kMerklePerturbations << " perturbations rejected (";
  bool first = true;
  for (const auto& [kind, count] : kinds) {
    d << (first ? "" : ", ") << kind << " " << count;
    first = false;
  }
  d << ")";
  return {rejected == kMerklePerturbations, d.str()};
}

// ---- 4: hybrid round trips and decryption trend -----------------------------

Outcome crypto_round_trips(const Env&) {
  std::vector<BenchRecord> records;
  try {
    // Throws on the first round trip that is not bit-exact.
    bench_encdec({1024, 2048, 4096, 8192}, kRoundTripAds, records);
  } catch (const Error& e) {
    return {false, e.what()};
  }
  std::vector<double> x, y;
  bool increasing = true;
  std::ostringstream d;
  d << kRoundTripAds << " ads bit-exact at 4 key sizes; mean decrypt";
  for (const auto& s : summarize(records)) {
    if (s.variant != "decrypt") continue;
    const double mean = static_cast<double>(s.avg_milli_ns) / 1000.0;
    if (!y.empty() && mean <= y.back()) increasing = false;
    x.push_back(static_cast<double>(s.parameter));
    y.push_back(mean);
    d << " " << s.parameter << ":" << fixed(mean / 1e6, 3) << "ms";
  }
  const TrendFit fit = fit_trend(TrendModel::kExponential, x, y);
  d << "; exponential R^2 " << fixed(fit.r_squared);
  return {increasing && fit.r_squared >= kMinExpRSquared, d.str()};
}

// ---- 5: billing conservation ------------------------------------------------

Outcome billing_conservation(const Env&) {
  std::mt19937_64 g(555);
  const Shares shares{7, 10};
  WalletLedger ledger(shares, "bs");
  std::map<std::string, std::int64_t> mirror;
  const std::vector<std::string> advertisers = {"adv-a", "adv-b", "adv-c", "adv-d", "adv-e"};
  std::int64_t deposited = 0;
  for (const auto& a : advertisers) {
    const std::int64_t amt = static_cast<std::int64_t>(g() % 2000000);
    ledger.deposit(a, amt);
    mirror[a] += amt;
    deposited += amt;
  }
  for (std::uint64_t ad = 1; ad <= 40; ++ad) {
    ledger.set_price(ad, {advertisers[ad % advertisers.size()],
                          static_cast<std::int64_t>(1 + g() % 500),
                          static_cast<std::int64_t>(1 + g() % 5000)});
  }
  std::size_t committed = 0, queued_total = 0, bad_net = 0, negative = 0;
  auto apply = [&](const LedgerDelta& d) {
    if (!d.committed) return;
    ++committed;
    std::int64_t net = 0;
    for (const auto& [w, c] : d.changes) net += c;
    if (net != 0) ++bad_net;
    // Expected split: the developer's floor share, the rest to the billing
    // server, all paid by the advertiser.
    const PriceTag& tag = ledger.price(d.event.ad_id);
    const std::int64_t cost = d.event.kind == BillEvent::kClick ? tag.click : tag.presentation;
    const std::int64_t dev = cost * shares.num / shares.den;
    mirror[tag.advertiser_id] -= cost;
    mirror[d.event.developer_id] += dev;
    mirror["bs"] += cost - dev;
  };
  for (std::size_t k = 0; k < kBillingEvents; ++k) {
    BillingEvent ev{g() % 4 ? BillEvent::kPresentation : BillEvent::kClick, 1 + g() % 40,
                    "dev-" + std::to_string(g() % 7)};
    const LedgerDelta d = ledger.bill(ev);
    if (!d.committed) ++queued_total;
    apply(d);
    if (k % 500 == 499) {
      const std::string& a = advertisers[g() % advertisers.size()];
      const std::int64_t amt = static_cast<std::int64_t>(g() % 400000);
      ledger.deposit(a, amt);
      mirror[a] += amt;
      deposited += amt;
      for (const auto& r : ledger.retry_queued()) apply(r);
    }
    for (const auto& [w, b] : ledger.balances()) {
      if (b < 0) ++negative;
    }
  }
  std::map<std::string, std::int64_t> actual(ledger.balances().begin(), ledger.balances().end());
  std::erase_if(mirror, [&](const auto& kv) { return kv.second == 0 && !actual.count(kv.first); });
  const bool mirror_ok = mirror == actual;
  std::ostringstream d;
  d << kBillingEvents << " events, " << committed << " committed, " << queued_total
    << " queued on arrival, " << ledger.queued().size() << " still queued; " << bad_net
    << " nonzero nets, " << negative << " negative balances; total " << ledger.total() << " of "
    << deposited << (mirror_ok ? "; balances match the mirror" : "; balances differ from the mirror");
  return {bad_net == 0 && negative == 0 && ledger.total() == deposited && mirror_ok, d.str()};
}

// ---- 6: privacy boundary on the golden scenario -----------------------------

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
  return out;
}

// Plaintexts gathered straight from the scenario's own files.
std::set<std::string> golden_plaintexts(const fs::path& dir) {
  std::set<std::string> out;
  std::ifstream tax(dir / "taxonomy.tsv");
  for (std::string line; std::getline(tax, line);) {
    if (line.empty() || line[0] == '#') continue;
    auto cols = split_on(line, '\t');
    out.insert(cols.at(0));
    out.insert(cols.at(1));
  }
  std::ifstream apps(dir / "apps.tsv");
  for (std::string line; std::getline(apps, line);) {
    if (line.empty() || line[0] == '#') continue;
    auto cols = split_on(line, '\t');
    out.insert(cols.at(0));
    if (cols.size() > 2) {
      for (const auto& pair : split_on(cols[2], ',')) {
        for (const auto& part : split_on(pair, ':')) {
          if (!part.empty()) out.insert(part);
        }
      }
    }
  }
  std::ifstream sc(dir / "demo.scenario");
  for (std::string line; std::getline(sc, line);) {
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.size() == 2 && tok[0] == "user") out.insert(tok[1]);
    if (tok.size() == 6 && tok[0] == "install") out.insert(tok[3]);
  }
  return out;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

Outcome privacy_boundary(const Env& env) {
  const fs::path dir = env.scenarios / "demo";
  const std::set<std::string> plaintexts = golden_plaintexts(dir);
  // The scanner itself must see a planted plaintext.
  if (!contains("xx" + *plaintexts.begin() + "yy", *plaintexts.begin())) {
    return {false, "scanner self-check failed"};
  }
  const SimulationReport r = simulate(load_scenario(dir / "demo.scenario"));
  std::size_t scanned = 0, bytes = 0, leaks = 0;
  std::set<std::string> kinds;
  std::string first_leak;
  for (const auto& m : r.messages) {
    const bool cs_or_ch = m.from == "cs" || m.from == "ch" || m.to == "cs" || m.to == "ch";
    if (!cs_or_ch) continue;
    ++scanned;
    kinds.insert(m.kind);
    const std::string body(m.body.begin(), m.body.end());
    const std::string line = Bus::format(m);
    bytes += body.size() + line.size();
    for (const auto& p : plaintexts) {
      if (contains(body, p) || contains(line, p)) {
        if (leaks++ == 0) first_leak = p + " at tick " + std::to_string(m.tick);
      }
    }
  }
  // The run must actually carry profile, ad and tracking traffic.
  const bool covered = kinds.count("Upload") && kinds.count("Request") &&
                       kinds.count("Response") && kinds.count("Monitor");
  std::ostringstream d;
  d << scanned << " CS/CH messages (" << bytes << " bytes) against " << plaintexts.size()
    << " plaintexts: " << leaks << " hits" << (leaks ? " first " + first_leak : "")
    << (covered ? "" : "; traffic incomplete");
  return {leaks == 0 && covered && scanned > 0, d.str()};
}

// ---- 7: profile state machine ----------------------------------------------

Outcome profile_state_machine(const Env&) {
  AppInterestMap map;
  map.add("app.scores", "Sports", {{"sports/football", "Sports"}});
  map.add("app.trips", "Travel", {{"travel/flights", "Travel"}});
  map.add("app.broker", "Finance", {{"finance/investing", "Finance"}});
  ProfileThresholds th;
  th.t_est = 2;
  th.t_evo = 2;
  th.establishment_window = 24;
  th.evolution_window = 72;
  const ProfileEngine eng(map, th);
  auto use = [&](InterestProfile p, const std::string& app, std::int64_t hours, std::int64_t at) {
    return eng.record_usage(std::move(p), {app, map.find(app)->category, "dev"}, hours, at);
  };

  std::vector<std::string> seen;
  InterestProfile p;
  seen.push_back(std::string(to_string(eng.derive(p, 0).state)));
  p = use(p, "app.scores", 3, 0);
  p = use(p, "app.broker", 1, 5);  // below the establishment threshold
  seen.push_back(std::string(to_string(eng.derive(p, 10).state)));
  seen.push_back(std::string(to_string(eng.derive(p, 30).state)));
  p = use(p, "app.trips", 3, 40);
  seen.push_back(std::string(to_string(eng.derive(p, 50).state)));
  const InterestProfile final_view = eng.derive(p, 120);
  seen.push_back(std::string(to_string(final_view.state)));

  const std::vector<std::string> want = {"Empty", "Establishing", "Stable", "Evolving", "Stable"};
  const std::vector<StateChange> want_history = {{0, ProfileState::kEstablishing},
                                                 {24, ProfileState::kStable},
                                                 {40, ProfileState::kEvolving},
                                                 {112, ProfileState::kStable}};

  // Repeating activity that is already counted changes nothing.
  InterestProfile again = use(p, "app.scores", 3, 115);
  const InterestProfile replay = eng.derive(again, 120);
  const bool idempotent = replay.interests == final_view.interests &&
                          replay.state == final_view.state &&
                          replay.state_history == final_view.state_history &&
                          eng.derive(p, 120) == final_view &&
                          hash_profile(replay, DigestScheme::kSha256) ==
                              hash_profile(final_view, DigestScheme::kSha256);
  const std::set<Interest> want_interests = {{"sports/football", "Sports"},
                                             {"travel/flights", "Travel"}};
  const bool below_threshold_excluded = final_view.interests == want_interests;

  std::ostringstream d;
  for (std::size_t i = 0; i < seen.size(); ++i) d << (i ? " -> " : "") << seen[i];
  d << (final_view.state_history == want_history ? "; history exact" : "; history differs")
    << (idempotent ? "; repeat is a no-op" : "; repeat changed the profile")
    << (below_threshold_excluded ? "; sub-threshold app contributes nothing"
                                 : "; sub-threshold app leaked interests");
  return {seen == want && final_view.state_history == want_history && idempotent &&
              below_threshold_excluded,
          d.str()};
}

// ---- 8: session filter ------------------------------------------------------

Outcome session_filter(const Env&) {
  using testing::numbered_ad;
  std::vector<Ad> ads;
  for (std::uint64_t id = 1; id <= 4; ++id) ads.push_back(numbered_ad(id, 0));
  for (std::uint64_t id = 5; id <= 8; ++id) ads.push_back(numbered_ad(id, 1));
  // Ads 9 and 10 tie between interests 0 and 1.
  for (std::uint64_t id = 9; id <= 10; ++id) {
    Ad ad = numbered_ad(id, 0);
    ad.keywords.push_back("topic1a");
    ads.push_back(std::move(ad));
  }
  testing::World w(testing::numbered_taxonomy(3), ads, 4);
  w.setup_index();
  store_index(w.aps, w.cs, w.bus, w.rng);
  for (const Ad& ad : ads) w.bs.ledger.set_price(ad.ad_id, {ad.advertiser_id, 1, 5});
  w.bs.ledger.deposit("advertiser-0", 1000);
  w.bs.ledger.deposit("advertiser-1", 1000);
  MinerNode& m = w.add_miner("user-sessions");
  const Digest32 app = w.use_interests(m, {0});
  miner_profile_upload(m, w.cs, w.bus, 30);

  auto ids = [](const std::vector<Ad>& v) {
    std::vector<std::uint64_t> out;
    for (const auto& a : v) out.push_back(a.ad_id);
    return out;
  };
  const auto first = ids(ads_request(app, m, w.ch, w.cs, w.bus, 31));
  // The profile grows mid-session, so the second call has new ads to offer
  // next to ones already served.
  m.install({"app-1", "category-1", "dev-1"});
  m.record_usage("app-1", 2, 32);
  miner_profile_upload(m, w.cs, w.bus, 33);
  const auto second = ids(ads_request(app, m, w.ch, w.cs, w.bus, 34));
  const auto third = ids(ads_request(app, m, w.ch, w.cs, w.bus, 35));

  std::set<std::uint64_t> within;
  std::size_t dup = 0, served = 0;
  for (const auto* batch : {&first, &second, &third}) {
    for (auto id : *batch) {
      ++served;
      if (!within.insert(id).second) ++dup;
    }
  }
  close_session(app, m, w.ch, w.cs, w.bs, w.bus, 36);
  const auto fresh = ids(ads_request(app, m, w.ch, w.cs, w.bus, 37));
  std::size_t repeated = 0;
  for (auto id : fresh) repeated += within.count(id);

  std::ostringstream d;
  d << "same session served " << first.size() << "+" << second.size() << "+" << third.size()
    << " ads with " << dup << " duplicates; new session repeats " << repeated << " of "
    << fresh.size();
  return {dup == 0 && !second.empty() && third.empty() && repeated > 0, d.str()};
}

// ---- 9: deterministic run logs ----------------------------------------------

Outcome determinism(const Env& env) {
  fs::create_directories(env.work);
  const fs::path a = env.work / "run_a.log", b = env.work / "run_b.log";
  fs::remove(a);
  fs::remove(b);
  const std::string base = "\"" + env.cli + "\" simulate --seed 42 --log ";
  const int ra = run(base + "\"" + a.string() + "\" > \"" + (env.work / "run_a.out").string() + "\"");
  const int rb = run(base + "\"" + b.string() + "\" > \"" + (env.work / "run_b.out").string() + "\"");
  const std::string la = slurp(a), lb = slurp(b);
  std::ostringstream d;
  d << "exit codes " << ra << "/" << rb << ", logs " << la.size() << " and " << lb.size()
    << " bytes, " << (la == lb ? "identical" : "different");
  return {ra == 0 && rb == 0 && !la.empty() && la == lb, d.str()};
}

// ---- 10: full benchmark configuration ---------------------------------------

struct Group {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> trials;  // (trial, elapsed)
};

// Independent pass over the raw CSV: own parsing and the centred form of
// the sample variance.
std::map<std::string, std::string> recompute_summary(const fs::path& csv, std::string* error,
                                                     std::map<std::string, std::size_t>* rows) {
  std::ifstream in(csv);
  std::string line;
  std::map<std::string, Group> groups;
  std::vector<std::string> order;
  if (!std::getline(in, line) || line != "suite,variant,parameter,trial,aux,elapsed_ns") {
    *error = "bad header";
    return {};
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    auto f = split_on(line, ',');
    static const std::set<std::string> suites = {"keygen", "hash", "encdec", "policy"};
    if (f.size() != 6 || !suites.count(f[0]) || f[1].empty()) {
      *error = "malformed row " + std::to_string(lineno);
      return {};
    }
    for (std::size_t i : {2u, 3u, 4u, 5u}) {
      if (f[i].empty() || f[i].find_first_not_of("0123456789") != std::string::npos) {
        *error = "non-numeric field in row " + std::to_string(lineno);
        return {};
      }
    }
    const std::uint64_t elapsed = std::stoull(f[5]);
    if (elapsed == 0) {
      *error = "zero elapsed in row " + std::to_string(lineno);
      return {};
    }
    const std::string key = f[0] + "," + f[1] + "," + f[2];
    if (!groups.count(key)) order.push_back(key);
    groups[key].trials.emplace_back(std::stoull(f[3]), elapsed);
    ++(*rows)[f[0]];
  }
  std::map<std::string, std::string> out;
  for (const auto& key : order) {
    auto t = groups[key].trials;
    std::stable_sort(t.begin(), t.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    t.erase(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(t.size() * 5 / 100));
    const __int128 n = static_cast<__int128>(t.size());
    __int128 s = 0;
    std::uint64_t lo = UINT64_MAX, hi = 0;
    for (const auto& [trial, x] : t) {
      s += x;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    unsigned __int128 centred = 0;
    for (const auto& [trial, x] : t) {
      const __int128 dx = n * static_cast<__int128>(x) - s;
      centred += static_cast<unsigned __int128>(dx * dx);
    }
    std::uint64_t sd = 0;
    if (n > 1) {
      const unsigned __int128 den = static_cast<unsigned __int128>(n * n * (n - 1));
      const unsigned __int128 v = centred / den * 1000000 + centred % den * 1000000 / den;
      // Largest sd with sd^2 <= v.
      std::uint64_t a = 0, b = UINT64_C(1) << 63;
      while (a < b) {
        const std::uint64_t mid = a + (b - a + 1) / 2;
        if (static_cast<unsigned __int128>(mid) * mid <= v) a = mid;
        else b = mid - 1;
      }
      sd = a;
    }
    const auto avg = static_cast<std::uint64_t>(s * 1000 / n);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%llu,%llu,%llu,%llu.%03llu,%llu.%03llu",
                  static_cast<unsigned long long>(t.size()), static_cast<unsigned long long>(lo),
                  static_cast<unsigned long long>(hi), static_cast<unsigned long long>(avg / 1000),
                  static_cast<unsigned long long>(avg % 1000),
                  static_cast<unsigned long long>(sd / 1000),
                  static_cast<unsigned long long>(sd % 1000));
    out[key] = buf;
  }
  return out;
}

Outcome parity_run(const Env& env) {
  const fs::path dir = env.work / "parity";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto t0 = Clock::now();
  const int rc = run("\"" + env.cli + "\" bench parity --out-dir \"" + dir.string() +
                     "\" --budget-min " + fixed(kParityBudgetMinutes, 1) + " > \"" +
                     (dir / "stdout.txt").string() + "\" 2> \"" + (dir / "stderr.txt").string() +
                     "\"");
  const double minutes = seconds_since(t0) / 60.0;

  std::string error;
  std::map<std::string, std::size_t> rows;
  const auto recomputed = recompute_summary(dir / "records.csv", &error, &rows);
  std::size_t matched = 0, mismatched = 0;
  std::ifstream sum(dir / "summary.csv");
  std::string line;
  if (!std::getline(sum, line) || line != "suite,variant,parameter,n,min_ns,max_ns,avg_ns,stdev_ns") {
    if (error.empty()) error = "bad summary header";
  }
  std::set<std::string> summarized;
  while (std::getline(sum, line)) {
    auto f = split_on(line, ',');
    if (f.size() != 8) {
      ++mismatched;
      continue;
    }
    const std::string key = f[0] + "," + f[1] + "," + f[2];
    const std::string stats = f[3] + "," + f[4] + "," + f[5] + "," + f[6] + "," + f[7];
    summarized.insert(key);
    auto it = recomputed.find(key);
    (it != recomputed.end() && it->second == stats ? matched : mismatched)++;
  }
  if (summarized.size() != recomputed.size()) ++mismatched;

  const std::map<std::string, std::size_t> full = {
      {"hash", 5000}, {"policy", 20000}, {"encdec", 8000}, {"keygen", 40000}};
  bool complete = true;
  std::ostringstream d;
  d << "exit " << rc << " after " << fixed(minutes, 1) << " min (budget "
    << fixed(kParityBudgetMinutes, 0) << "); rows";
  for (const auto& [suite, want] : full) {
    const std::size_t got = rows.count(suite) ? rows.at(suite) : 0;
    complete = complete && got == want;
    d << " " << suite << " " << got << "/" << want;
  }
  d << "; " << matched << " summary rows recomputed exactly, " << mismatched << " mismatched";
  if (!error.empty()) d << "; CSV error: " << error;
  return {rc == 0 && minutes < kParityBudgetMinutes && complete && error.empty() &&
              mismatched == 0 && matched > 0,
          d.str()};
}

struct Criterion {
  const char* name;
  std::function<Outcome(const Env&)> check;
};

const std::vector<Criterion> kCriteria = {
    {"matcher oracle", matcher_oracle},
    {"policy oracle and delay trend", policy_oracle},
    {"merkle soundness", merkle_soundness},
    {"hybrid round trips", crypto_round_trips},
    {"billing conservation", billing_conservation},
    {"privacy boundary", privacy_boundary},
    {"profile state machine", profile_state_machine},
    {"session filter", session_filter},
    {"determinism", determinism},
    {"benchmark parity run", parity_run},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  Env env;
  std::string scenarios, work;
  app.add_option("--criterion", only, "run one criterion (1-10); all by default")
      ->check(CLI::Range(0, static_cast<int>(kCriteria.size())));
  app.add_option("--cli", env.cli, "path to the adchain binary")->required();
  app.add_option("--scenarios", scenarios, "scenario directory")->required();
  app.add_option("--work", work, "scratch directory")->required();
  CLI11_PARSE(app, argc, argv);
  env.scenarios = scenarios;
  env.work = work;

  bool all_pass = true;
  for (std::size_t i = 0; i < kCriteria.size(); ++i) {
    if (only != 0 && static_cast<std::size_t>(only) != i + 1) continue;
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = kCriteria[i].check(env);
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    all_pass = all_pass && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " ("
              << kCriteria[i].name << "): " << o.detail << " [" << fixed(seconds_since(t0), 1)
              << " s]" << std::endl;
  }
  return all_pass ? 0 : 1;
}
