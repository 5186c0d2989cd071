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

// Seeded synthetic corpora for setup, simulation and benchmarks.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "adchain/admatch.hpp"
#include "adchain/profile.hpp"

namespace adchain {

inline constexpr std::size_t kMinAdBytes = 12 * 1024;
inline constexpr std::size_t kMaxAdBytes = 20 * 1024;
inline constexpr std::size_t kMaxProfileInterests = 20;

// `categories` x `per_category` interests, each with four keywords: two of
// its own, one shared with its category and one shared across categories.
std::vector<InterestKeywords> synthetic_taxonomy(std::size_t categories = 12,
                                                 std::size_t per_category = 25);

// Ads with uniform payload sizes in [kMinAdBytes, kMaxAdBytes] and one to
// four keywords drawn from one or two interests of the taxonomy.
std::vector<Ad> generate_ads(std::size_t count, const std::vector<InterestKeywords>& taxonomy,
                             std::uint64_t seed);

// Profiles of 1..max_interests distinct interests, uniform in count.
std::vector<InterestProfile> generate_profiles(std::size_t count,
                                               const std::vector<InterestKeywords>& taxonomy,
                                               std::uint64_t seed,
                                               std::size_t max_interests = kMaxProfileInterests);

// Shuffles 0..count-1 and deals it into `groups` equal groups (the last one
// takes the remainder).
std::vector<std::vector<std::size_t>> split_groups(std::size_t count, std::size_t groups,
                                                   std::uint64_t seed);

// Writes the ads manifest format read by parse_ads().
void write_ads_manifest(std::ostream& out, const std::vector<Ad>& ads);
void write_taxonomy(std::ostream& out, const std::vector<InterestKeywords>& taxonomy);

}  // namespace adchain
