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

// Reference evaluator for spine-shaped policy trees that never builds a
// tree: the root rule is checked first, then the rules on its left side
// (when it matched) or on its right side (when it did not) are scanned in
// list order until the first match.

#pragma once

#include <optional>
#include <random>
#include <vector>

#include "adchain/policy.hpp"

namespace adchain::testing {

struct ScanResult {
  Decision decision = Decision::kDeny;
  std::optional<std::size_t> matched;
  std::size_t visited = 0;
};

inline bool oracle_matches(const Rule& r, const RequestContext& c) {
  auto in = [](const auto& list, const auto& v) {
    if (list.empty()) return true;
    for (const auto& x : list) {
      if (x == v) return true;
    }
    return false;
  };
  return in(r.match.requesters, c.requester_id) &&
         in(r.match.tx_types, c.transaction_type) &&
         in(r.match.resources, c.resource);
}

inline ScanResult linear_scan(const std::vector<Rule>& rules, std::size_t root_pos,
                              const RequestContext& ctx) {
  ScanResult out;
  auto apply = [&](std::size_t i) {
    if (rules[i].action == Action::kRouteNext) return;
    out.decision = rules[i].action == Action::kAllow ? Decision::kAllow
                                                     : Decision::kDeny;
    out.matched = i;
  };
  const std::size_t root = root_pos - 1;
  out.visited = 1;
  std::size_t begin, end;
  if (oracle_matches(rules[root], ctx)) {
    apply(root);
    begin = 0;
    end = root;
  } else {
    begin = root + 1;
    end = rules.size();
  }
  for (std::size_t i = begin; i < end; ++i) {
    ++out.visited;
    if (oracle_matches(rules[i], ctx)) {
      apply(i);
      break;
    }
  }
  return out;
}

// Small value domains so random contexts hit rules often.
struct RandomPolicyGen {
  std::vector<Digest32> requesters;
  std::vector<std::string> resources{"ad-block", "profile-store", "storage"};

  explicit RandomPolicyGen(std::size_t n_requesters = 6) {
    for (std::size_t i = 0; i < n_requesters; ++i) {
      Digest32 d{};
      d[0] = static_cast<std::uint8_t>(i + 1);
      requesters.push_back(d);
    }
  }

  Rule rule(std::mt19937_64& g) const {
    Rule r;
    if (g() % 3) r.match.requesters.push_back(requesters[g() % requesters.size()]);
    if (g() % 4 == 0) r.match.requesters.push_back(requesters[g() % requesters.size()]);
    if (g() % 2) r.match.tx_types.push_back(kAllTxTypes[g() % 4]);
    if (g() % 2) r.match.resources.push_back(resources[g() % resources.size()]);
    switch (g() % 5) {
      case 0: case 1: r.action = Action::kAllow; break;
      case 2: case 3: r.action = Action::kDeny; break;
      default: r.action = Action::kRouteNext; break;
    }
    return r;
  }

  RequestContext context(std::mt19937_64& g) const {
    RequestContext c;
    c.requester_id = requesters[g() % requesters.size()];
    c.transaction_type = kAllTxTypes[g() % 4];
    c.resource = resources[g() % resources.size()];
    return c;
  }
};

}  // namespace adchain::testing
