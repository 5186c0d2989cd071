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

#include "adchain/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "adchain/admatch.hpp"
#include "adchain/corpus.hpp"
#include "adchain/error.hpp"
#include "adchain/nodes.hpp"
#include "adchain/random.hpp"

namespace adchain {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kParse, "scenario line " + std::to_string(line) + ": " + what);
}

std::int64_t to_int(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) parse_fail(line, "not an integer: " + s);
    return v;
  } catch (const std::logic_error&) {
    parse_fail(line, "not an integer: " + s);
  }
}

std::uint64_t to_uint(const std::string& s, std::size_t line) {
  const std::int64_t v = to_int(s, line);
  if (v < 0) parse_fail(line, "negative value: " + s);
  return static_cast<std::uint64_t>(v);
}

std::optional<std::uint64_t> ad_or_all(const std::string& s, std::size_t line) {
  if (s == "*") return std::nullopt;
  return to_uint(s, line);
}

const std::map<std::string, std::size_t> kEventArity = {
    {"install", 4}, {"usage", 3}, {"upload", 1}, {"request", 2},
    {"click", 3},   {"close", 2}, {"deposit", 2},
};

}  // namespace

Scenario parse_scenario(std::istream& in, const fs::path& base_dir) {
  Scenario sc;
  std::string raw;
  std::size_t lineno = 0;
  std::int64_t last_hour = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string& verb = tok[0];
    const std::size_t argc = tok.size() - 1;
    auto need = [&](std::size_t lo, std::size_t hi) {
      if (argc < lo || argc > hi) parse_fail(lineno, "wrong argument count for " + verb);
    };

    if (auto ev = kEventArity.find(verb); ev != kEventArity.end()) {
      need(ev->second + 1, ev->second + 1);
      ScenarioEvent e{lineno, verb, to_int(tok[1], lineno),
                      {tok.begin() + 2, tok.end()}};
      if (e.hour < last_hour) parse_fail(lineno, "event hour goes backwards");
      last_hour = e.hour;
      sc.events.push_back(std::move(e));
    } else if (verb == "seed") {
      need(1, 1);
      sc.seed = to_uint(tok[1], lineno);
    } else if (verb == "key_bits") {
      need(1, 1);
      sc.key_bits = static_cast<int>(to_int(tok[1], lineno));
      if (!is_supported_modulus(sc.key_bits)) parse_fail(lineno, "unsupported key size");
    } else if (verb == "scheme") {
      need(1, 1);
      try {
        sc.scheme = parse_digest_scheme(tok[1]);
      } catch (const Error&) {
        parse_fail(lineno, "unknown digest scheme " + tok[1]);
      }
    } else if (verb == "block_capacity" || verb == "storage_blocks" ||
               verb == "block_size_limit") {
      need(1, 1);
      const std::uint64_t v = to_uint(tok[1], lineno);
      if (v == 0) parse_fail(lineno, verb + " must be positive");
      (verb == "block_capacity"   ? sc.block_capacity
       : verb == "storage_blocks" ? sc.storage_blocks
                                  : sc.block_size_limit) = v;
    } else if (verb == "shares") {
      need(1, 1);
      const auto slash = tok[1].find('/');
      if (slash == std::string::npos) parse_fail(lineno, "expected NUM/DEN");
      sc.shares = {to_int(tok[1].substr(0, slash), lineno),
                   to_int(tok[1].substr(slash + 1), lineno)};
      try {
        sc.shares.validate();
      } catch (const Error& e) {
        parse_fail(lineno, e.what());
      }
    } else if (verb == "t_est" || verb == "t_evo" || verb == "establishment_window" ||
               verb == "evolution_window") {
      need(1, 1);
      const std::int64_t v = to_int(tok[1], lineno);
      if (v <= 0) parse_fail(lineno, verb + " must be positive");
      if (verb == "t_est") sc.thresholds.t_est = v;
      else if (verb == "t_evo") sc.thresholds.t_evo = v;
      else if (verb == "establishment_window") sc.thresholds.establishment_window = v;
      else sc.thresholds.evolution_window = v;
    } else if (verb == "taxonomy") {
      need(1, 1);
      sc.taxonomy = base_dir / tok[1];
    } else if (verb == "apps") {
      need(1, 1);
      sc.apps = base_dir / tok[1];
    } else if (verb == "ads") {
      need(1, 2);
      if (argc == 2) {
        if (tok[1] != "generate") parse_fail(lineno, "expected: ads generate N");
        sc.generated_ads = to_uint(tok[2], lineno);
        sc.ads.clear();
      } else {
        sc.ads = base_dir / tok[1];
        sc.generated_ads.reset();
      }
    } else if (verb == "policy") {
      need(2, 3);
      if (tok[1] != "cs" && tok[1] != "ch" && tok[1] != "miner") {
        parse_fail(lineno, "policy node must be cs, ch or miner");
      }
      Scenario::PolicyFile pf{base_dir / tok[2], 1};
      if (argc == 3) pf.root = to_uint(tok[3], lineno);
      if (pf.root == 0) parse_fail(lineno, "root position is 1-based");
      sc.policies[tok[1]] = pf;
    } else if (verb == "price") {
      need(3, 3);
      sc.prices.push_back({ad_or_all(tok[1], lineno), to_int(tok[2], lineno),
                           to_int(tok[3], lineno)});
      if (sc.prices.back().presentation < 0 || sc.prices.back().click < 0) {
        parse_fail(lineno, "negative price");
      }
    } else if (verb == "wallet") {
      need(2, 2);
      const std::int64_t amount = to_int(tok[2], lineno);
      if (amount < 0) parse_fail(lineno, "negative deposit");
      sc.wallets.emplace_back(tok[1], amount);
    } else if (verb == "quota") {
      need(2, 2);
      const std::int64_t req = to_int(tok[2], lineno);
      if (req <= 0) parse_fail(lineno, "quota must be positive");
      sc.quotas.emplace_back(ad_or_all(tok[1], lineno), req);
    } else if (verb == "user") {
      need(1, 1);
      if (std::find(sc.users.begin(), sc.users.end(), tok[1]) != sc.users.end()) {
        parse_fail(lineno, "duplicate user " + tok[1]);
      }
      sc.users.push_back(tok[1]);
    } else {
      parse_fail(lineno, "unknown directive " + verb);
    }
  }
  if (sc.taxonomy.empty()) throw Error(ErrorCode::kParse, "scenario has no taxonomy");
  if (sc.apps.empty()) throw Error(ErrorCode::kParse, "scenario has no apps file");
  if (sc.ads.empty() && !sc.generated_ads) {
    throw Error(ErrorCode::kParse, "scenario has no ads");
  }
  for (const auto& e : sc.events) {
    if (e.verb == "deposit") continue;
    if (std::find(sc.users.begin(), sc.users.end(), e.args[0]) == sc.users.end()) {
      parse_fail(e.line, "unknown user " + e.args[0]);
    }
  }
  return sc;
}

Scenario load_scenario(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open scenario " + path.string());
  return parse_scenario(in, path.parent_path());
}

bool SimulationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

namespace {

std::vector<std::string> needles_of(const Scenario& sc,
                                    const std::vector<InterestKeywords>& taxonomy,
                                    const AppInterestMap& apps) {
  std::set<std::string> out;
  for (const auto& ik : taxonomy) {
    out.insert(ik.interest.interest_id);
    out.insert(ik.interest.category);
  }
  for (const auto& [id, row] : apps.rows()) {
    out.insert(id);
    for (const auto& i : row.interests) {
      out.insert(i.interest_id);
      out.insert(i.category);
    }
  }
  for (const auto& e : sc.events) {
    if (e.verb == "install") out.insert(e.args[1]);
  }
  out.insert(sc.users.begin(), sc.users.end());
  return {out.begin(), out.end()};
}

KeyPair scenario_key(std::uint64_t seed, int bits, const std::string& name) {
  SeededByteSource s(seed, "key/" + name);
  return generate_keypair(bits, s());
}

bool scan_for(ByteView haystack, const std::vector<std::string>& needles,
              std::string* hit) {
  for (const auto& n : needles) {
    if (contains_bytes(haystack, as_bytes(n))) {
      *hit = n;
      return true;
    }
  }
  return false;
}

CheckResult privacy_check(const Bus& bus, const CloudStorageNode& cs,
                          const std::vector<std::string>& needles) {
  CheckResult c{"privacy-boundary", true, {}};
  std::size_t scanned = 0;
  std::string hit;
  for (const char* node : {"cs", "ch"}) {
    for (const Message* m : bus.observed_by(node)) {
      ++scanned;
      if (scan_for(m->body, needles, &hit) ||
          scan_for(as_bytes(Bus::format(*m)), needles, &hit)) {
        c.passed = false;
        c.detail = "'" + hit + "' seen by " + node + " at tick " + std::to_string(m->tick);
        return c;
      }
    }
  }
  for (std::uint64_t slot = 0; slot < cs.arena.next_pointer(); ++slot) {
    if (scan_for(cs.arena.record(slot), needles, &hit)) {
      c.passed = false;
      c.detail = "'" + hit + "' stored in slot " + std::to_string(slot);
      return c;
    }
  }
  c.detail = std::to_string(scanned) + " messages, " +
             std::to_string(cs.arena.next_pointer()) + " stored records, " +
             std::to_string(needles.size()) + " plaintexts";
  return c;
}

CheckResult conservation_check(const WalletLedger& ledger,
                               const std::vector<LedgerDelta>& committed,
                               std::int64_t deposited) {
  CheckResult c{"billing-conservation", true, {}};
  for (const auto& d : committed) {
    if (d.net() != 0) {
      c.passed = false;
      c.detail = "event on ad " + std::to_string(d.event.ad_id) + " nets " +
                 std::to_string(d.net());
      return c;
    }
  }
  for (const auto& [wallet, amount] : ledger.balances()) {
    if (amount < 0) {
      c.passed = false;
      c.detail = wallet + " is negative";
      return c;
    }
  }
  if (ledger.total() != deposited) {
    c.passed = false;
    c.detail = "ledger holds " + std::to_string(ledger.total()) + " of " +
               std::to_string(deposited) + " deposited";
    return c;
  }
  c.detail = std::to_string(committed.size()) + " committed events, total " +
             std::to_string(deposited);
  return c;
}

CheckResult flow_check(const std::vector<std::unique_ptr<MinerNode>>& miners,
                       const Bus& bus, std::size_t answered) {
  CheckResult c{"flow-completeness", true, {}};
  std::size_t responses = 0;
  for (const auto& m : miners) {
    for (const auto& tx : m->chain.transactions()) {
      if (tx.tx_type != TxType::kResponse) continue;
      ++responses;
      if (!m->chain.contains(tx.prev_t_id) ||
          m->chain.get(tx.prev_t_id).tx_type != TxType::kRequest) {
        c.passed = false;
        c.detail = m->name + ": response without its request";
        return c;
      }
    }
  }
  // Each answered request crosses miner -> ch -> cs and back.
  std::map<std::pair<std::string, std::string>, std::size_t> hops;
  for (const auto& msg : bus.log()) {
    if (msg.kind == "Request" || msg.kind == "Response") ++hops[{msg.from, msg.to}];
  }
  std::size_t to_cs = hops[{"ch", "cs"}];
  std::size_t back = 0;
  for (const auto& m : miners) back += hops[{"ch", m->name}];
  if (responses != answered || back != answered || to_cs < answered) {
    c.passed = false;
    c.detail = std::to_string(answered) + " answered requests, " +
               std::to_string(responses) + " responses on chain, " +
               std::to_string(back) + " relayed";
    return c;
  }
  c.detail = std::to_string(answered) + " request/response round trips";
  return c;
}

CheckResult chain_check(const std::vector<std::unique_ptr<MinerNode>>& miners) {
  CheckResult c{"chain-integrity", true, {}};
  std::size_t txs = 0, blocks = 0;
  for (const auto& m : miners) {
    for (const auto& tx : m->chain.transactions()) {
      ++txs;
      const auto path = m->chain.walk_to_genesis(tx.t_id);
      if (!verify_transaction(tx) ||
          m->chain.get(path.back()).tx_type != TxType::kGenesis) {
        c.passed = false;
        c.detail = m->name + ": transaction " + to_hex(tx.t_id).substr(0, 16);
        return c;
      }
    }
    for (const auto& b : m->blocks) {
      ++blocks;
      if (!verify_block(b)) {
        c.passed = false;
        c.detail = m->name + ": block " + to_hex(block_hash(b)).substr(0, 16);
        return c;
      }
    }
  }
  c.detail = std::to_string(txs) + " transactions, " + std::to_string(blocks) + " blocks";
  return c;
}

}  // namespace

std::vector<std::string> privacy_needles(const Scenario& scenario) {
  return needles_of(scenario, load_taxonomy(scenario.taxonomy.string()),
                    AppInterestMap::load(scenario.apps.string()));
}

SimulationReport simulate(const Scenario& sc, std::optional<std::uint64_t> seed_override) {
  const std::uint64_t seed = seed_override.value_or(sc.seed);
  const std::vector<InterestKeywords> taxonomy = load_taxonomy(sc.taxonomy.string());
  const AppInterestMap app_map = AppInterestMap::load(sc.apps.string());
  const std::vector<Ad> ads = sc.generated_ads
                                  ? generate_ads(*sc.generated_ads, taxonomy, seed)
                                  : load_ads(sc.ads.string(), seed);

  std::vector<std::string> miner_names;
  for (std::size_t i = 0; i < sc.users.size(); ++i) {
    miner_names.push_back("miner" + std::to_string(i + 1));
  }
  std::map<std::string, KeyPair> keys;
  std::map<std::string, Digest32> key_ids;
  std::vector<std::string> node_names = {"group", "aps", "cs", "ch", "bs"};
  node_names.insert(node_names.end(), miner_names.begin(), miner_names.end());
  for (const auto& n : node_names) {
    KeyPair k = scenario_key(seed, sc.key_bits, n);
    key_ids.emplace(n, k.public_key().key_id());
    keys.emplace(n, std::move(k));
  }
  RequesterResolver resolve = [&key_ids](std::string_view v) {
    if (v.starts_with("app:")) return identity_digest(v.substr(4));
    if (auto it = key_ids.find(std::string(v)); it != key_ids.end()) return it->second;
    return default_requester_resolver(v);
  };
  auto rules_for = [&](const std::string& node) -> std::pair<std::vector<Rule>, std::size_t> {
    auto it = sc.policies.find(node);
    if (it == sc.policies.end()) return {{Rule{{}, Action::kAllow, "open"}}, 1};
    return {load_policy_file(it->second.path.string(), resolve), it->second.root};
  };

  const auto [cs_rules, cs_root] = rules_for("cs");
  const auto [ch_rules, ch_root] = rules_for("ch");
  const auto [miner_rules, miner_root] = rules_for("miner");

  ApsNode aps(keys.at("aps"));
  CloudStorageNode cs(keys.at("cs"), sc.block_capacity, sc.storage_blocks, cs_rules,
                      cs_root);
  ClusterHeadNode ch(keys.at("ch"), ch_rules, ch_root);
  BillingServerNode bs(keys.at("bs"), sc.shares);
  SeededByteSource rng(seed, "simulation");
  Bus bus;
  SimulationReport report;

  // Global setup and index upload.
  aps.index = global_setup(ads, taxonomy, keys.at("group").public_key(), sc.scheme, rng);
  store_index(aps, cs, bus, rng);

  std::int64_t deposited = 0;
  for (const auto& [wallet, amount] : sc.wallets) {
    bs.ledger.deposit(wallet, amount);
    deposited += amount;
  }
  std::map<std::uint64_t, const Ad*> ad_by_id;
  for (const auto& ad : ads) ad_by_id[ad.ad_id] = &ad;
  auto each_ad = [&](const std::optional<std::uint64_t>& id, auto&& fn) {
    if (!id) {
      for (const auto& [ad_id, ad] : ad_by_id) fn(*ad);
      return;
    }
    auto it = ad_by_id.find(*id);
    if (it == ad_by_id.end()) {
      throw Error(ErrorCode::kUnknownAd, "scenario names unknown ad " + std::to_string(*id));
    }
    fn(*it->second);
  };
  for (const auto& p : sc.prices) {
    each_ad(p.ad_id, [&](const Ad& ad) {
      bs.ledger.set_price(ad.ad_id, {ad.advertiser_id, p.presentation, p.click});
    });
  }

  std::set<std::string> categories = app_map.categories();
  for (const auto& e : sc.events) {
    if (e.verb == "install") categories.insert(e.args[3]);
  }
  std::vector<std::unique_ptr<MinerNode>> miners;
  std::map<std::string, MinerNode*> by_user;
  for (std::size_t i = 0; i < sc.users.size(); ++i) {
    const std::string& user = sc.users[i];
    MinerConfig cfg{sc.block_size_limit, sc.scheme};
    miners.push_back(std::make_unique<MinerNode>(
        miner_names[i], user, keys.at(miner_names[i]), keys.at("group"),
        keys.at("cs").public_key(), keys.at("bs").public_key(),
        ProfileEngine(app_map, sc.thresholds, categories),
        SeededByteSource(seed, "miner/" + miner_names[i]), cfg));
    MinerNode& m = *miners.back();
    m.policy.publish({miner_rules, miner_root, 0});
    for (const auto& [ad_id, req] : sc.quotas) {
      each_ad(ad_id, [&](const Ad& ad) {
        if (!m.tracking.tracks(ad.ad_id)) m.tracking.track(ad.ad_id, req, 0);
      });
    }
    by_user[user] = &m;
  }

  // A refused Monitor still leaves the session closed and billed.
  auto expire = [&](MinerNode& m, std::int64_t at) {
    try {
      expire_sessions(m, ch, cs, bs, bus, at);
    } catch (const AccessDenied& denied) {
      report.notes.push_back("hour " + std::to_string(at) + ": " + m.name +
                             " tracking report refused by " + denied.hop());
    }
  };
  std::map<std::pair<std::string, std::string>, Digest32> installed;
  auto app_of = [&](const ScenarioEvent& e) {
    auto it = installed.find({e.args[0], e.args[1]});
    if (it == installed.end()) {
      throw Error(ErrorCode::kParse, "scenario line " + std::to_string(e.line) + ": " +
                                         e.args[1] + " is not installed for " + e.args[0]);
    }
    return it->second;
  };
  // Ads served per live session, in order, for the duplicate check and for
  // "click ... first".
  std::map<std::pair<std::string, SessionRegistry::SessionId>, std::vector<std::uint64_t>>
      served;
  std::size_t duplicates = 0, answered = 0;
  std::int64_t now = 0;

  for (const auto& e : sc.events) {
    now = e.hour;
    for (auto& m : miners) expire(*m, now);
    const std::string where = "line " + std::to_string(e.line) + ": ";
    try {
      if (e.verb == "deposit") {
        const std::int64_t amount = to_int(e.args[1], e.line);
        bs.ledger.deposit(e.args[0], amount);
        deposited += amount;
        auto retried = bs.ledger.retry_queued();
        bs.history.insert(bs.history.end(), retried.begin(), retried.end());
        continue;
      }
      MinerNode& m = *by_user.at(e.args[0]);
      if (e.verb == "install") {
        installed[{e.args[0], e.args[1]}] = m.install({e.args[1], e.args[3], e.args[2]});
      } else if (e.verb == "usage") {
        app_of(e);
        m.record_usage(e.args[1], to_int(e.args[2], e.line), now);
      } else if (e.verb == "upload") {
        miner_profile_upload(m, cs, bus, now);
      } else if (e.verb == "request") {
        const Digest32 app = app_of(e);
        std::vector<Ad> got = ads_request(app, m, ch, cs, bus, now);
        ++answered;
        const auto session = *m.sessions.live(m.user_digest, app, now);
        auto& seen = served[{m.name, session}];
        for (const auto& ad : got) {
          if (std::find(seen.begin(), seen.end(), ad.ad_id) != seen.end()) ++duplicates;
          seen.push_back(ad.ad_id);
        }
        report.notes.push_back(where + m.name + " received " + std::to_string(got.size()) +
                               " ad(s)");
      } else if (e.verb == "click") {
        const Digest32 app = app_of(e);
        std::uint64_t ad_id = 0;
        if (e.args[2] == "first") {
          auto session = m.sessions.live(m.user_digest, app, now);
          auto it = session ? served.find({m.name, *session}) : served.end();
          if (it == served.end() || it->second.empty()) {
            report.notes.push_back(where + "nothing served to click");
            continue;
          }
          ad_id = it->second.front();
        } else {
          ad_id = to_uint(e.args[2], e.line);
        }
        click(app, ad_id, m, bs, bus, now);
      } else if (e.verb == "close") {
        close_session(app_of(e), m, ch, cs, bs, bus, now);
      }
    } catch (const AccessDenied& denied) {
      report.notes.push_back(where + e.verb + " refused by " + denied.hop());
    } catch (const Error& err) {
      if (err.code() != ErrorCode::kEmptyProfile) throw;
      report.notes.push_back(where + e.verb + ": " + err.what());
    }
  }
  // Everything still open closes when the run ends.
  for (auto& m : miners) expire(*m, now + kSessionIdleHours);

  report.run_log = bus.run_log();
  report.messages.assign(bus.log().begin(), bus.log().end());
  report.queued_billing = bs.ledger.queued().size();
  if (report.queued_billing != 0) {
    report.notes.push_back("billing queue holds " + std::to_string(report.queued_billing) +
                           " unpaid event(s)");
  }

  std::vector<std::string> needles = needles_of(sc, taxonomy, app_map);
  report.checks.push_back(privacy_check(bus, cs, needles));
  std::vector<LedgerDelta> committed;
  for (const auto& d : bs.history) {
    if (d.committed) committed.push_back(d);
  }
  report.checks.push_back(conservation_check(bs.ledger, committed, deposited));
  report.checks.push_back(flow_check(miners, bus, answered));
  report.checks.push_back({"session-no-duplicate", duplicates == 0,
                           std::to_string(duplicates) + " repeated ad(s)"});
  report.checks.push_back(chain_check(miners));
  report.checks.push_back({"index-stored",
                           aps.acknowledged_pointer >= aps.index.record_count(),
                           std::to_string(aps.index.record_count()) + " index records"});

  std::ostringstream dump;
  for (const auto& m : miners) {
    for (const auto& tx : m->chain.transactions()) {
      write_dump_record(dump, DumpKind::kTransaction, canonical_encode(tx));
    }
    for (const auto& b : m->blocks) {
      write_dump_record(dump, DumpKind::kBlock, encode_block(b));
    }
  }
  report.chain_dump = std::move(dump).str();
  return report;
}

}  // namespace adchain
