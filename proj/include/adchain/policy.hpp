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

// Binary policy trees of (match, action) rules.
//
// Traversal starts at the root. When a node's match accepts the request its
// action runs and the walk moves to the left child; otherwise it moves to the
// right child. It stops when the chosen child is absent. The decision is the
// last Allow/Deny action executed on the walk; RouteNext only continues. A
// walk that executes no Allow/Deny is denied.
//
// PolicyTree::build() produces the spine shape used for benchmarking: rule p is the
// root, rules 1..p-1 hang off its left child and rules p+1..n off its right
// child, each group linked through right pointers in list order.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "adchain/bytes.hpp"
#include "adchain/ledger.hpp"

namespace adchain {

enum class Action : std::uint8_t { kAllow, kDeny, kRouteNext };
enum class Decision : std::uint8_t { kAllow, kDeny };

std::string_view to_string(Action action);
std::string_view to_string(Decision decision);

struct RequestContext {
  Digest32 requester_id{};
  TxType transaction_type = TxType::kRequest;
  std::string resource;
};

// Conjunction across fields; each non-empty list is a whitelist. An empty
// list accepts any value.
struct MatchPredicate {
  std::vector<Digest32> requesters;
  std::vector<TxType> tx_types;
  std::vector<std::string> resources;

  bool matches(const RequestContext& ctx) const;
  friend bool operator==(const MatchPredicate&, const MatchPredicate&) = default;
};

struct Rule {
  MatchPredicate match;
  Action action = Action::kDeny;
  // Operation label carried with the action, e.g. "ads-quota".
  std::string tag;

  friend bool operator==(const Rule&, const Rule&) = default;
};

struct TraversalResult {
  Decision decision = Decision::kDeny;
  // Position in the rule list (0-based) of the rule that decided.
  std::optional<std::size_t> matched_rule_index;
  std::size_t path_length = 0;
  std::uint64_t version = 0;
};

// Immutable tree stored as a flat node arena.
class PolicyTree {
 public:
  static constexpr std::int32_t kNone = -1;

  struct Node {
    std::uint32_t rule;
    std::int32_t left = kNone;
    std::int32_t right = kNone;
  };

  // root_position is 1-based. Throws Error(kInvalidArgument) for an empty
  // rule list or an out-of-range root.
  static PolicyTree build(std::vector<Rule> rules, std::size_t root_position,
                          std::uint64_t version = 0);

  TraversalResult traverse(const RequestContext& ctx) const;

  const std::vector<Rule>& rules() const { return rules_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::int32_t root() const { return root_; }
  std::size_t root_position() const { return root_position_; }
  std::uint64_t version() const { return version_; }
  std::size_t size() const { return rules_.size(); }

  // Nodes reachable from the root's left child.
  std::size_t left_subtree_size() const;
  // Longest root-to-leaf path, counted in nodes.
  std::size_t height() const;

 private:
  std::vector<Rule> rules_;
  std::vector<Node> nodes_;
  std::int32_t root_ = kNone;
  std::size_t root_position_ = 0;
  std::uint64_t version_ = 0;
};

// Multi-version policy. Readers take an immutable snapshot without locking;
// edits go to a draft that becomes visible only when published.
class PolicyDocument {
 public:
  struct Draft {
    std::vector<Rule> rules;
    std::size_t root_position = 1;
    std::uint64_t base_version = 0;

    // Insert before 0-based `index`. The root keeps pointing at the same
    // rule.
    void insert(std::size_t index, Rule rule);
    void remove(std::size_t index);
  };

  struct PublishResult {
    std::uint64_t version;
    // The draft was based on an older version; it still replaced the
    // current one (last writer wins).
    bool conflict;
  };

  PolicyDocument() = default;
  // Publishes version 1.
  PolicyDocument(std::vector<Rule> rules, std::size_t root_position);

  // Null until the first publish.
  std::shared_ptr<const PolicyTree> read() const;
  std::uint64_t version() const;
  Draft modify() const;
  // Throws Error(kInvalidArgument) for an empty draft.
  PublishResult publish(const Draft& draft);

  // Denies with path_length 0 while unpublished.
  TraversalResult traverse(const RequestContext& ctx) const;

 private:
  std::shared_ptr<const PolicyTree> current_;
  mutable std::mutex write_mu_;
};

enum class Placement { kRandom, kSequential };

Placement parse_placement(std::string_view name);
std::string_view to_string(Placement placement);

// 1-based root position for the given trial. Sequential cycles 1..n.
std::size_t choose_root(Placement placement, std::size_t rule_count,
                        std::size_t trial, std::mt19937_64& rng);

// Resolves a requester value from a policy file into a digest.
using RequesterResolver = std::function<Digest32(std::string_view)>;

// 64 hex digits are taken verbatim; anything else is SHA-256 of the text.
Digest32 default_requester_resolver(std::string_view value);

// One rule per line: index TAB field=value[,field=value] TAB ALLOW|DENY|ROUTE
// [TAB tag]. Fields are requester, type and resource; repeating a field
// widens its whitelist and `*` accepts anything. Blank lines and lines
// starting with '#' are skipped. Rules are returned ordered by index.
std::vector<Rule> parse_policy(std::istream& in,
                               const RequesterResolver& resolve =
                                   default_requester_resolver);
std::vector<Rule> load_policy_file(const std::string& path,
                                   const RequesterResolver& resolve =
                                       default_requester_resolver);

}  // namespace adchain
