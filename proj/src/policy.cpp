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

#include "adchain/policy.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <sstream>

#include "adchain/cryptokit.hpp"
#include "adchain/error.hpp"

namespace adchain {

std::string_view to_string(Action action) {
  switch (action) {
    case Action::kAllow: return "ALLOW";
    case Action::kDeny: return "DENY";
    case Action::kRouteNext: return "ROUTE";
  }
  return "?";
}

std::string_view to_string(Decision decision) {
  return decision == Decision::kAllow ? "ALLOW" : "DENY";
}

bool MatchPredicate::matches(const RequestContext& ctx) const {
  if (!requesters.empty() &&
      std::find(requesters.begin(), requesters.end(), ctx.requester_id) ==
          requesters.end()) {
    return false;
  }
  if (!tx_types.empty() &&
      std::find(tx_types.begin(), tx_types.end(), ctx.transaction_type) ==
          tx_types.end()) {
    return false;
  }
  if (!resources.empty() &&
      std::find(resources.begin(), resources.end(), ctx.resource) ==
          resources.end()) {
    return false;
  }
  return true;
}

PolicyTree PolicyTree::build(std::vector<Rule> rules, std::size_t root_position,
                             std::uint64_t version) {
  const std::size_t n = rules.size();
  if (n == 0) {
    throw Error(ErrorCode::kInvalidArgument, "policy has no rules");
  }
  if (root_position < 1 || root_position > n) {
    throw Error(ErrorCode::kInvalidArgument,
                "root position " + std::to_string(root_position) +
                    " outside 1.." + std::to_string(n));
  }
  if (n > static_cast<std::size_t>(INT32_MAX)) {
    throw Error(ErrorCode::kInvalidArgument, "policy too large");
  }
  PolicyTree tree;
  tree.rules_ = std::move(rules);
  tree.version_ = version;
  tree.root_position_ = root_position;
  tree.nodes_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    tree.nodes_[i].rule = static_cast<std::uint32_t>(i);
  }
  const auto r = static_cast<std::int32_t>(root_position - 1);
  const auto last = static_cast<std::int32_t>(n - 1);
  tree.root_ = r;
  if (r > 0) tree.nodes_[r].left = 0;
  for (std::int32_t i = 0; i + 1 < r; ++i) tree.nodes_[i].right = i + 1;
  if (r < last) tree.nodes_[r].right = r + 1;
  for (std::int32_t i = r + 1; i < last; ++i) tree.nodes_[i].right = i + 1;
  return tree;
}

TraversalResult PolicyTree::traverse(const RequestContext& ctx) const {
  TraversalResult res;
  res.version = version_;
  std::int32_t s = root_;
  while (s != kNone) {
    ++res.path_length;
    const Node& node = nodes_[static_cast<std::size_t>(s)];
    const Rule& rule = rules_[node.rule];
    if (rule.match.matches(ctx)) {
      if (rule.action != Action::kRouteNext) {
        res.decision =
            rule.action == Action::kAllow ? Decision::kAllow : Decision::kDeny;
        res.matched_rule_index = node.rule;
      }
      s = node.left;
    } else {
      s = node.right;
    }
  }
  return res;
}

std::size_t PolicyTree::left_subtree_size() const {
  std::size_t count = 0;
  std::vector<std::int32_t> stack;
  if (root_ != kNone && nodes_[root_].left != kNone) {
    stack.push_back(nodes_[root_].left);
  }
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    ++count;
    if (node.left != kNone) stack.push_back(node.left);
    if (node.right != kNone) stack.push_back(node.right);
  }
  return count;
}

std::size_t PolicyTree::height() const {
  std::size_t best = 0;
  std::vector<std::pair<std::int32_t, std::size_t>> stack;
  if (root_ != kNone) stack.push_back({root_, 1});
  while (!stack.empty()) {
    auto [idx, depth] = stack.back();
    stack.pop_back();
    best = std::max(best, depth);
    const Node& node = nodes_[idx];
    if (node.left != kNone) stack.push_back({node.left, depth + 1});
    if (node.right != kNone) stack.push_back({node.right, depth + 1});
  }
  return best;
}

void PolicyDocument::Draft::insert(std::size_t index, Rule rule) {
  if (index > rules.size()) {
    throw Error(ErrorCode::kIndexOutOfRange, "insert position past the end");
  }
  rules.insert(rules.begin() + static_cast<std::ptrdiff_t>(index), std::move(rule));
  if (rules.size() == 1) {
    root_position = 1;
  } else if (index < root_position) {
    ++root_position;
  }
}

void PolicyDocument::Draft::remove(std::size_t index) {
  if (index >= rules.size()) {
    throw Error(ErrorCode::kIndexOutOfRange, "no rule at that position");
  }
  rules.erase(rules.begin() + static_cast<std::ptrdiff_t>(index));
  if (index + 1 < root_position) --root_position;
  root_position = std::clamp<std::size_t>(root_position, 1,
                                          std::max<std::size_t>(rules.size(), 1));
}

PolicyDocument::PolicyDocument(std::vector<Rule> rules, std::size_t root_position) {
  Draft d;
  d.rules = std::move(rules);
  d.root_position = root_position;
  publish(d);
}

std::shared_ptr<const PolicyTree> PolicyDocument::read() const {
  return std::atomic_load(&current_);
}

std::uint64_t PolicyDocument::version() const {
  auto snap = read();
  return snap ? snap->version() : 0;
}

PolicyDocument::Draft PolicyDocument::modify() const {
  Draft d;
  if (auto snap = read()) {
    d.rules = snap->rules();
    d.root_position = snap->root_position();
    d.base_version = snap->version();
  }
  return d;
}

PolicyDocument::PublishResult PolicyDocument::publish(const Draft& draft) {
  std::lock_guard lock(write_mu_);
  auto cur = read();
  const std::uint64_t current_version = cur ? cur->version() : 0;
  auto next = std::make_shared<const PolicyTree>(
      PolicyTree::build(draft.rules, draft.root_position, current_version + 1));
  std::atomic_store(&current_, std::shared_ptr<const PolicyTree>(std::move(next)));
  return {current_version + 1, draft.base_version != current_version};
}

TraversalResult PolicyDocument::traverse(const RequestContext& ctx) const {
  auto snap = read();
  if (!snap) return {};
  return snap->traverse(ctx);
}

Placement parse_placement(std::string_view name) {
  if (name == "random") return Placement::kRandom;
  if (name == "sequential") return Placement::kSequential;
  throw Error(ErrorCode::kInvalidArgument,
              "placement must be random or sequential, got '" + std::string(name) + "'");
}

std::string_view to_string(Placement placement) {
  return placement == Placement::kRandom ? "random" : "sequential";
}

std::size_t choose_root(Placement placement, std::size_t rule_count,
                        std::size_t trial, std::mt19937_64& rng) {
  if (rule_count == 0) {
    throw Error(ErrorCode::kInvalidArgument, "policy has no rules");
  }
  if (placement == Placement::kSequential) return trial % rule_count + 1;
  return std::uniform_int_distribution<std::size_t>(1, rule_count)(rng);
}

Digest32 default_requester_resolver(std::string_view value) {
  if (value.size() == 64 &&
      std::all_of(value.begin(), value.end(), [](char c) {
        return std::isxdigit(static_cast<unsigned char>(c)) != 0;
      })) {
    return to_digest32(from_hex(value));
  }
  return sha256(as_bytes(value));
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

Action parse_action(const std::string& s, std::size_t line) {
  if (s == "ALLOW") return Action::kAllow;
  if (s == "DENY") return Action::kDeny;
  if (s == "ROUTE") return Action::kRouteNext;
  throw Error(ErrorCode::kParse,
              "line " + std::to_string(line) + ": unknown action '" + s + "'");
}

}  // namespace

std::vector<Rule> parse_policy(std::istream& in, const RequesterResolver& resolve) {
  std::map<long long, Rule> by_index;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() < 3 || cols.size() > 4) {
      throw Error(ErrorCode::kParse,
                  "line " + std::to_string(lineno) + ": expected 3 or 4 columns");
    }
    long long index = 0;
    try {
      std::size_t used = 0;
      index = std::stoll(cols[0], &used);
      if (used != cols[0].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParse,
                  "line " + std::to_string(lineno) + ": bad rule index");
    }
    Rule rule;
    rule.action = parse_action(cols[2], lineno);
    if (cols.size() == 4) rule.tag = cols[3];
    bool any_req = false, any_type = false, any_res = false;
    for (const auto& cond : split(cols[1], ',')) {
      auto eq = cond.find('=');
      if (eq == std::string::npos) {
        throw Error(ErrorCode::kParse, "line " + std::to_string(lineno) +
                                           ": condition without '='");
      }
      std::string field = cond.substr(0, eq);
      std::string value = cond.substr(eq + 1);
      const bool wildcard = value == "*";
      if (field == "requester") {
        any_req |= wildcard;
        if (!wildcard) rule.match.requesters.push_back(resolve(value));
      } else if (field == "type") {
        any_type |= wildcard;
        if (!wildcard) rule.match.tx_types.push_back(parse_tx_type(value));
      } else if (field == "resource") {
        any_res |= wildcard;
        if (!wildcard) rule.match.resources.push_back(value);
      } else {
        throw Error(ErrorCode::kParse, "line " + std::to_string(lineno) +
                                           ": unknown field '" + field + "'");
      }
    }
    if (any_req) rule.match.requesters.clear();
    if (any_type) rule.match.tx_types.clear();
    if (any_res) rule.match.resources.clear();
    if (!by_index.emplace(index, std::move(rule)).second) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(lineno) +
                                         ": duplicate rule index");
    }
  }
  std::vector<Rule> rules;
  rules.reserve(by_index.size());
  for (auto& [idx, rule] : by_index) rules.push_back(std::move(rule));
  return rules;
}

std::vector<Rule> load_policy_file(const std::string& path,
                                   const RequesterResolver& resolve) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open policy file " + path);
  return parse_policy(in, resolve);
}

}  // namespace adchain
