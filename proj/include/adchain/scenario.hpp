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

// Scenario files and the end-to-end simulation driver.
//
// A scenario is line based; '#' starts a comment. Settings:
//
//   seed N                  key_bits N             scheme sha256
//   block_capacity N        storage_blocks N       block_size_limit N
//   shares NUM/DEN          t_est H                t_evo H
//   taxonomy PATH           apps PATH
//   ads PATH | ads generate N
//   policy cs|ch|miner PATH [ROOT]
//   price AD|* PRESENTATION CLICK
//   wallet ID AMOUNT        quota AD|* REQUIRED
//   user USER_ID
//
// Timed events run in file order; hours must not decrease:
//
//   install H USER APP DEVELOPER CATEGORY
//   usage H USER APP HOURS
//   upload H USER
//   request H USER APP
//   click H USER APP AD|first
//   close H USER APP
//   deposit H WALLET AMOUNT
//
// Paths are relative to the scenario file. In policy files, requester values
// "aps", "cs", "ch", "bs" and "minerN" name node keys and "app:ID" names an
// app; anything else goes through default_requester_resolver.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adchain/billing.hpp"
#include "adchain/bus.hpp"
#include "adchain/cryptokit.hpp"
#include "adchain/profile.hpp"

namespace adchain {

struct ScenarioEvent {
  std::size_t line = 0;
  std::string verb;
  std::int64_t hour = 0;
  std::vector<std::string> args;
};

struct Scenario {
  std::uint64_t seed = 42;
  int key_bits = 2048;
  DigestScheme scheme = DigestScheme::kSha256;
  std::size_t block_capacity = 64;
  std::size_t storage_blocks = 4096;
  std::size_t block_size_limit = 64;
  Shares shares;
  ProfileThresholds thresholds;
  std::filesystem::path taxonomy;
  std::filesystem::path apps;
  std::filesystem::path ads;
  std::optional<std::size_t> generated_ads;

  struct PolicyFile {
    std::filesystem::path path;
    std::size_t root = 1;
  };
  std::map<std::string, PolicyFile> policies;

  struct Price {
    std::optional<std::uint64_t> ad_id;
    std::int64_t presentation = 0;
    std::int64_t click = 0;
  };
  std::vector<Price> prices;
  std::vector<std::pair<std::string, std::int64_t>> wallets;
  std::vector<std::pair<std::optional<std::uint64_t>, std::int64_t>> quotas;
  std::vector<std::string> users;
  std::vector<ScenarioEvent> events;
};

// Throws Error(kParse) naming the offending line.
Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& path);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SimulationReport {
  std::string run_log;
  // Every delivered message, in send order.
  std::vector<Message> messages;
  std::vector<CheckResult> checks;
  std::vector<std::string> notes;
  std::size_t queued_billing = 0;
  // Dump records (transactions and blocks of every Miner) for `inspect`.
  std::string chain_dump;

  bool ok() const;
};

// Runs the scenario with `seed` replacing the file's seed when given.
// Throws Error for malformed input; invariant failures are reported in the
// checks instead.
SimulationReport simulate(const Scenario& scenario,
                          std::optional<std::uint64_t> seed = std::nullopt);

// Plaintext needles for the privacy scan: interest ids and categories, user
// ids and app ids.
std::vector<std::string> privacy_needles(const Scenario& scenario);

}  // namespace adchain
