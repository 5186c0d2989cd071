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

#include "adchain/profile.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "adchain/error.hpp"

namespace adchain {

std::string_view to_string(ProfileState state) {
  switch (state) {
    case ProfileState::kEmpty: return "Empty";
    case ProfileState::kEstablishing: return "Establishing";
    case ProfileState::kStable: return "Stable";
    case ProfileState::kEvolving: return "Evolving";
  }
  return "?";
}

void ProfileThresholds::validate() const {
  auto positive = [](std::int64_t v, const char* name) {
    if (v <= 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(name) + " must be positive");
    }
  };
  if (t_est) positive(*t_est, "t_est");
  if (t_evo) positive(*t_evo, "t_evo");
  positive(establishment_window, "establishment_window");
  positive(evolution_window, "evolution_window");
}

void AppInterestMap::add(std::string app_id, std::string category,
                         std::set<Interest> interests) {
  if (app_id.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty app id");
  }
  rows_[std::move(app_id)] = Row{std::move(category), std::move(interests)};
}

const AppInterestMap::Row* AppInterestMap::find(const std::string& app_id) const {
  auto it = rows_.find(app_id);
  return it == rows_.end() ? nullptr : &it->second;
}

std::set<std::string> AppInterestMap::categories() const {
  std::set<std::string> out;
  for (const auto& [id, row] : rows_) out.insert(row.category);
  return out;
}

AppInterestMap AppInterestMap::parse(std::istream& in) {
  AppInterestMap map;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string app_id, category, interests;
    std::getline(ls, app_id, '\t');
    if (!std::getline(ls, category, '\t')) {
      throw Error(ErrorCode::kParse,
                  "apps line " + std::to_string(lineno) + ": missing category");
    }
    std::getline(ls, interests);
    std::set<Interest> set;
    std::istringstream is(interests);
    std::string item;
    while (std::getline(is, item, ',')) {
      if (item.empty()) continue;
      auto colon = item.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == item.size()) {
        throw Error(ErrorCode::kParse, "apps line " + std::to_string(lineno) +
                                           ": expected interest:category");
      }
      set.insert({item.substr(0, colon), item.substr(colon + 1)});
    }
    if (app_id.empty() || category.empty()) {
      throw Error(ErrorCode::kParse,
                  "apps line " + std::to_string(lineno) + ": empty field");
    }
    if (map.find(app_id) != nullptr) {
      throw Error(ErrorCode::kParse,
                  "apps line " + std::to_string(lineno) + ": duplicate app " + app_id);
    }
    map.add(app_id, category, std::move(set));
  }
  return map;
}

AppInterestMap AppInterestMap::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open apps file " + path);
  return parse(in);
}

InterestProfile record_usage(InterestProfile profile, const AppRef& app,
                             std::int64_t duration, std::int64_t now,
                             const std::set<std::string>& categories) {
  if (duration <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "usage duration must be positive");
  }
  if (app.app_id.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty app id");
  }
  if (categories.count(app.category) == 0) {
    throw Error(ErrorCode::kTaxonomy,
                "category '" + app.category + "' is not a marketplace category");
  }
  profile.activity_log.push_back({app.app_id, duration, now});
  return profile;
}

namespace {

std::set<Interest> union_of(const std::set<std::string>& apps,
                            const AppInterestMap& map) {
  std::set<Interest> out;
  for (const auto& app : apps) {
    const auto& s = map.find(app)->interests;
    out.insert(s.begin(), s.end());
  }
  return out;
}

}  // namespace

InterestProfile derive(InterestProfile profile, const AppInterestMap& map,
                       const ProfileThresholds& th, std::int64_t now) {
  th.validate();
  std::vector<const UsageEvent*> events;
  for (const auto& ev : profile.activity_log) {
    if (ev.timestamp <= now && map.find(ev.app_id) != nullptr) events.push_back(&ev);
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const UsageEvent* a, const UsageEvent* b) {
                     return a->timestamp < b->timestamp;
                   });

  profile.qualified_apps.clear();
  profile.state_history.clear();
  profile.interests.clear();
  if (events.empty()) {
    profile.state = ProfileState::kEmpty;
    return profile;
  }

  const std::int64_t t0 = events.front()->timestamp;
  const std::int64_t est_end = t0 + th.establishment_window;
  profile.state_history.push_back({t0, ProfileState::kEstablishing});

  std::map<std::string, std::int64_t> window_usage;
  std::size_t first_post = 0;
  for (; first_post < events.size() && events[first_post]->timestamp < est_end;
       ++first_post) {
    window_usage[events[first_post]->app_id] += events[first_post]->duration;
  }
  const auto n = static_cast<std::int64_t>(window_usage.size());
  auto meets_est = [&](std::int64_t usage) {
    if (th.t_est) return usage >= *th.t_est;
    return usage >= 1 && usage * n >= th.establishment_window;
  };
  auto meets_evo = [&](std::int64_t usage) {
    if (th.t_evo) return usage >= *th.t_evo;
    return meets_est(usage);
  };

  for (const auto& [app, usage] : window_usage) {
    if (meets_est(usage)) profile.qualified_apps.insert(app);
  }
  if (now < est_end) {
    profile.state = ProfileState::kEstablishing;
    profile.interests = union_of(profile.qualified_apps, map);
    return profile;
  }

  profile.state_history.push_back({est_end, ProfileState::kStable});
  std::map<std::string, std::int64_t> post_usage;
  bool evolving = false;
  std::int64_t evolving_until = 0;
  for (std::size_t i = first_post; i < events.size(); ++i) {
    const UsageEvent& ev = *events[i];
    if (evolving && ev.timestamp >= evolving_until) {
      profile.state_history.push_back({evolving_until, ProfileState::kStable});
      evolving = false;
    }
    if (profile.qualified_apps.count(ev.app_id)) continue;
    std::int64_t& used = post_usage[ev.app_id];
    used += ev.duration;
    if (meets_evo(used)) {
      profile.qualified_apps.insert(ev.app_id);
      if (!evolving) {
        profile.state_history.push_back({ev.timestamp, ProfileState::kEvolving});
        evolving = true;
        evolving_until = ev.timestamp + th.evolution_window;
      }
    }
  }
  if (evolving && now >= evolving_until) {
    profile.state_history.push_back({evolving_until, ProfileState::kStable});
    evolving = false;
  }
  profile.state = evolving ? ProfileState::kEvolving : ProfileState::kStable;
  profile.interests = union_of(profile.qualified_apps, map);
  return profile;
}

InterestProfile set_demographic(InterestProfile profile, Demographic d) {
  if (d.option.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "demographic option is empty");
  }
  std::erase_if(profile.demographics,
                [&](const Demographic& x) { return x.option == d.option; });
  profile.demographics.insert(std::move(d));
  return profile;
}

Bytes encode_interest(const Interest& interest) {
  ByteWriter w;
  w.field(interest.interest_id).field(interest.category);
  return std::move(w).bytes();
}

std::vector<Bytes> hash_profile(const InterestProfile& profile, DigestScheme scheme) {
  if (profile.interests.empty()) {
    throw Error(ErrorCode::kEmptyProfile, "profile has no interests to upload");
  }
  std::vector<Bytes> out;
  out.reserve(profile.interests.size());
  for (const auto& i : profile.interests) {
    out.push_back(digest(encode_interest(i), scheme));
  }
  return out;
}

ProfileEngine::ProfileEngine(AppInterestMap map, ProfileThresholds thresholds,
                             std::set<std::string> categories)
    : map_(std::move(map)),
      thresholds_(thresholds),
      categories_(categories.empty() ? map_.categories() : std::move(categories)) {
  thresholds_.validate();
}

InterestProfile ProfileEngine::record_usage(InterestProfile profile,
                                            const AppRef& app,
                                            std::int64_t duration,
                                            std::int64_t now) const {
  return adchain::record_usage(std::move(profile), app, duration, now, categories_);
}

InterestProfile ProfileEngine::derive(InterestProfile profile, std::int64_t now) const {
  return adchain::derive(std::move(profile), map_, thresholds_, now);
}

}  // namespace adchain
