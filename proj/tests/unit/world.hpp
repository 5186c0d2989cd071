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

// Small fully wired network for flow tests.

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "adchain/nodes.hpp"

namespace adchain::testing {

inline std::vector<Rule> allow_all() { return {Rule{{}, Action::kAllow, "open"}}; }

inline std::vector<Rule> deny_all() { return {Rule{{}, Action::kDeny, "closed"}}; }

// Interest "interest-<i>" has keywords topic<i>a, topic<i>b.
inline std::vector<InterestKeywords> numbered_taxonomy(int n) {
  std::vector<InterestKeywords> t;
  for (int i = 0; i < n; ++i) {
    const std::string s = std::to_string(i);
    t.push_back({{"interest-" + s, "category-" + std::to_string(i % 3)},
                 {"topic" + s + "a", "topic" + s + "b"}});
  }
  return t;
}

inline Ad numbered_ad(std::uint64_t id, int interest, std::size_t size = 12 * 1024) {
  return Ad{id, "advertiser-" + std::to_string(id % 2),
            {"topic" + std::to_string(interest) + "a"},
            synth_ad_payload(id, size, 5)};
}

struct World {
  explicit World(std::vector<InterestKeywords> taxonomy_in, std::vector<Ad> ads_in,
                 std::size_t block_capacity = 4, std::size_t max_blocks = 4096,
                 std::vector<Rule> cs_rules = allow_all(),
                 std::vector<Rule> ch_rules = allow_all())
      : taxonomy(std::move(taxonomy_in)),
        ads(std::move(ads_in)),
        group(generate_keypair(1024, 11)),
        aps(generate_keypair(1024, 12)),
        cs(generate_keypair(1024, 13), block_capacity, max_blocks, cs_rules),
        ch(generate_keypair(1024, 14), ch_rules),
        bs(generate_keypair(1024, 15), Shares{}),
        rng(3, "world") {
    for (const auto& ik : taxonomy) categories.insert(ik.interest.category);
  }

  void setup_index() {
    aps.index = global_setup(ads, taxonomy, group.public_key(), DigestScheme::kSha256, rng);
  }

  // App "app-<i>" maps to interest i.
  AppInterestMap app_map() const {
    AppInterestMap m;
    for (std::size_t i = 0; i < taxonomy.size(); ++i) {
      m.add("app-" + std::to_string(i), taxonomy[i].interest.category,
            {taxonomy[i].interest});
    }
    return m;
  }

  MinerNode& add_miner(const std::string& user, std::vector<Rule> rules = allow_all()) {
    ProfileThresholds th;
    th.t_est = 1;
    miners.push_back(std::make_unique<MinerNode>(
        "miner" + std::to_string(miners.size() + 1), user,
        generate_keypair(1024, 100 + miners.size()), group, cs.key.public_key(),
        bs.key.public_key(), ProfileEngine(app_map(), th), SeededByteSource(9, user)));
    MinerNode& m = *miners.back();
    if (!rules.empty()) m.policy.publish({rules, 1, 0});
    return m;
  }

  // Installs app-<i> for each listed interest and uses it for 2 hours at t=0.
  Digest32 use_interests(MinerNode& m, const std::vector<int>& interests) {
    Digest32 last{};
    for (int i : interests) {
      const std::string id = "app-" + std::to_string(i);
      last = m.install({id, taxonomy[i].interest.category, "dev-" + std::to_string(i)});
      m.record_usage(id, 2, 0);
    }
    return last;
  }

  std::vector<InterestKeywords> taxonomy;
  std::vector<Ad> ads;
  std::set<std::string> categories;
  KeyPair group;
  ApsNode aps;
  CloudStorageNode cs;
  ClusterHeadNode ch;
  BillingServerNode bs;
  SeededByteSource rng;
  Bus bus;
  std::vector<std::unique_ptr<MinerNode>> miners;
};

}  // namespace adchain::testing
