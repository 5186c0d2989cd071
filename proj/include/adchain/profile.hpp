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

// On-device interest profiling from app usage.
//
// Time is integer simulated hours. derive() is a pure replay of the
// activity log:
//
//   * The establishment window opens at the first logged usage and lasts
//     establishment_window hours. An app qualifies when its cumulative
//     usage inside the window reaches t_est. Without an explicit t_est the
//     threshold is window / n (at least 1 hour), n being the distinct mapped
//     apps used in the window; the comparison is exact, usage * n >= window.
//   * Once the window closes the profile is Stable and the qualified set is
//     fixed. A novel app whose usage since the window closed reaches t_evo
//     joins the set and puts the profile in Evolving for evolution_window
//     hours, after which it is Stable again. t_evo defaults to the
//     establishment threshold.
//
// Apps missing from the AppInterestMap are ignored entirely.

#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "adchain/bytes.hpp"
#include "adchain/cryptokit.hpp"

namespace adchain {

struct AppRef {
  std::string app_id;
  std::string category;
  std::string developer_id;
};

struct Interest {
  std::string interest_id;
  std::string category;

  friend auto operator<=>(const Interest&, const Interest&) = default;
};

struct Demographic {
  std::string option;
  std::string value;

  friend auto operator<=>(const Demographic&, const Demographic&) = default;
};

enum class ProfileState : std::uint8_t { kEmpty, kEstablishing, kStable, kEvolving };

std::string_view to_string(ProfileState state);

struct UsageEvent {
  std::string app_id;
  std::int64_t duration;
  std::int64_t timestamp;

  friend bool operator==(const UsageEvent&, const UsageEvent&) = default;
};

struct StateChange {
  std::int64_t at;
  ProfileState state;

  friend bool operator==(const StateChange&, const StateChange&) = default;
};

struct ProfileThresholds {
  // Unset means "derive from the window" as described above.
  std::optional<std::int64_t> t_est;
  std::optional<std::int64_t> t_evo;
  std::int64_t establishment_window = 24;
  std::int64_t evolution_window = 72;

  // Throws Error(kInvalidArgument) unless every set value is positive.
  void validate() const;
};

// app_id -> (marketplace category, interests). The interest set may be
// empty for apps that do not contribute.
class AppInterestMap {
 public:
  struct Row {
    std::string category;
    std::set<Interest> interests;
  };

  void add(std::string app_id, std::string category, std::set<Interest> interests);
  const Row* find(const std::string& app_id) const;
  const std::map<std::string, Row>& rows() const { return rows_; }
  std::set<std::string> categories() const;

  // app_id TAB category TAB interest_id:interest_category[,...]
  // Throws Error(kParse).
  static AppInterestMap parse(std::istream& in);
  static AppInterestMap load(const std::string& path);

 private:
  std::map<std::string, Row> rows_;
};

struct InterestProfile {
  std::set<Interest> interests;
  std::set<Demographic> demographics;
  ProfileState state = ProfileState::kEmpty;
  std::vector<UsageEvent> activity_log;

  // Filled by derive().
  std::set<std::string> qualified_apps;
  std::vector<StateChange> state_history;

  friend bool operator==(const InterestProfile&, const InterestProfile&) = default;
};

// Appends to the activity log. Throws Error(kInvalidArgument) for a
// non-positive duration or empty app id, Error(kTaxonomy) when the app's
// category is not in `categories`.
InterestProfile record_usage(InterestProfile profile, const AppRef& app,
                             std::int64_t duration, std::int64_t now,
                             const std::set<std::string>& categories);

// Replays events with timestamp <= now. Total over valid input.
InterestProfile derive(InterestProfile profile, const AppInterestMap& map,
                       const ProfileThresholds& thresholds, std::int64_t now);

// One value per option; a second call replaces the earlier value.
InterestProfile set_demographic(InterestProfile profile, Demographic d);

// Canonical encoding of one interest: two length-prefixed fields.
Bytes encode_interest(const Interest& interest);

// One digest per interest in sorted interest order. Demographics stay on
// the device. Throws Error(kEmptyProfile) when there are no interests.
std::vector<Bytes> hash_profile(const InterestProfile& profile, DigestScheme scheme);

// Bundles the configuration a device needs to profile its user.
class ProfileEngine {
 public:
  ProfileEngine(AppInterestMap map, ProfileThresholds thresholds,
                std::set<std::string> categories = {});

  InterestProfile record_usage(InterestProfile profile, const AppRef& app,
                               std::int64_t duration, std::int64_t now) const;
  InterestProfile derive(InterestProfile profile, std::int64_t now) const;

  const AppInterestMap& map() const { return map_; }
  const ProfileThresholds& thresholds() const { return thresholds_; }
  const std::set<std::string>& categories() const { return categories_; }

 private:
  AppInterestMap map_;
  ProfileThresholds thresholds_;
  std::set<std::string> categories_;
};

}  // namespace adchain
