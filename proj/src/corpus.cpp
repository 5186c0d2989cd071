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

#include "adchain/corpus.hpp"

#include <algorithm>
#include <ostream>
#include <random>
#include <set>

#include "adchain/error.hpp"

namespace adchain {

std::vector<InterestKeywords> synthetic_taxonomy(std::size_t categories,
                                                 std::size_t per_category) {
  if (categories == 0 || per_category == 0) {
    throw Error(ErrorCode::kInvalidArgument, "empty synthetic taxonomy");
  }
  std::vector<InterestKeywords> out;
  for (std::size_t c = 0; c < categories; ++c) {
    const std::string cat = "category" + std::to_string(c);
    for (std::size_t i = 0; i < per_category; ++i) {
      const std::string id = cat + "/interest" + std::to_string(i);
      const std::string stem = "c" + std::to_string(c) + "i" + std::to_string(i);
      out.push_back({{id, cat},
                     {stem + "alpha", stem + "beta", cat + "common",
                      "shared" + std::to_string(i % 7)}});
    }
  }
  return out;
}

std::vector<Ad> generate_ads(std::size_t count, const std::vector<InterestKeywords>& taxonomy,
                             std::uint64_t seed) {
  if (taxonomy.empty()) throw Error(ErrorCode::kInvalidArgument, "empty taxonomy");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size(kMinAdBytes, kMaxAdBytes);
  std::uniform_int_distribution<std::size_t> pick(0, taxonomy.size() - 1);
  std::vector<Ad> ads;
  ads.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Ad ad;
    ad.ad_id = i + 1;
    ad.advertiser_id = "advertiser" + std::to_string(rng() % 20);
    const std::size_t n_interests = 1 + rng() % 2;
    std::set<std::string> kws;
    for (std::size_t k = 0; k < n_interests; ++k) {
      const auto& src = taxonomy[pick(rng)].keywords;
      const std::size_t take = 1 + rng() % 2;
      for (std::size_t t = 0; t < take; ++t) kws.insert(src[rng() % src.size()]);
    }
    ad.keywords.assign(kws.begin(), kws.end());
    ad.payload = synth_ad_payload(ad.ad_id, size(rng), seed);
    ads.push_back(std::move(ad));
  }
  return ads;
}

std::vector<InterestProfile> generate_profiles(std::size_t count,
                                               const std::vector<InterestKeywords>& taxonomy,
                                               std::uint64_t seed,
                                               std::size_t max_interests) {
  if (taxonomy.empty() || max_interests == 0) {
    throw Error(ErrorCode::kInvalidArgument, "cannot draw profile interests");
  }
  std::mt19937_64 rng(seed);
  const std::size_t cap = std::min(max_interests, taxonomy.size());
  std::uniform_int_distribution<std::size_t> n_dist(1, cap);
  std::vector<std::size_t> order(taxonomy.size());
  std::vector<InterestProfile> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::shuffle(order.begin(), order.end(), rng);
    InterestProfile p;
    const std::size_t n = n_dist(rng);
    for (std::size_t k = 0; k < n; ++k) p.interests.insert(taxonomy[order[k]].interest);
    p.state = ProfileState::kStable;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::vector<std::size_t>> split_groups(std::size_t count, std::size_t groups,
                                                   std::uint64_t seed) {
  if (groups == 0) throw Error(ErrorCode::kInvalidArgument, "zero groups");
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> out(groups);
  const std::size_t per = count / groups;
  for (std::size_t i = 0; i < count; ++i) {
    out[std::min(groups - 1, per == 0 ? groups - 1 : i / per)].push_back(order[i]);
  }
  return out;
}

void write_ads_manifest(std::ostream& out, const std::vector<Ad>& ads) {
  for (const auto& ad : ads) {
    out << ad.ad_id << '\t' << ad.advertiser_id << '\t' << ad.payload.size() << '\t';
    for (std::size_t i = 0; i < ad.keywords.size(); ++i) {
      out << (i ? "," : "") << ad.keywords[i];
    }
    out << '\n';
  }
}

void write_taxonomy(std::ostream& out, const std::vector<InterestKeywords>& taxonomy) {
  for (const auto& ik : taxonomy) {
    out << ik.interest.interest_id << '\t' << ik.interest.category << '\t';
    for (std::size_t i = 0; i < ik.keywords.size(); ++i) {
      out << (i ? "," : "") << ik.keywords[i];
    }
    out << '\n';
  }
}

}  // namespace adchain
