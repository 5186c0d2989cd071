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

// Ad to interest matching by tf-idf keyword similarity.
//
// Documents are the interests' keyword lists; queries are ad keyword lists.
// Keywords are lowercased and trimmed, with no stemming. tf is the raw count
// in the (multi)set, idf(t) = ln(N / df(t)) with N interest documents, and
// terms that occur in no document weigh nothing. The bounded score is the
// cosine of the two tf-idf vectors; raw_score() is the unnormalised sum
// over query terms of tf(t, doc) * idf(t).

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "adchain/bytes.hpp"
#include "adchain/profile.hpp"

namespace adchain {

struct Ad {
  std::uint64_t ad_id = 0;
  std::string advertiser_id;
  std::vector<std::string> keywords;
  Bytes payload;
};

struct InterestKeywords {
  Interest interest;
  std::vector<std::string> keywords;
};

// Scores closer than this to the best score count as ties.
inline constexpr double kTieTolerance = 1e-12;

struct MatchResult {
  std::map<Interest, std::vector<std::uint64_t>> assignments;
  // Every (ad, interest) pair that was scored.
  std::map<std::pair<std::uint64_t, Interest>, double> scores;
  // Ads sharing no keyword with any interest.
  std::vector<std::uint64_t> unassigned;
};

std::string normalize_keyword(std::string_view kw);

class TfIdfCorpus {
 public:
  // Throws Error(kInvalidArgument) for an empty corpus or a document with
  // no keywords.
  explicit TfIdfCorpus(const std::vector<InterestKeywords>& docs);

  std::size_t document_count() const { return docs_.size(); }
  std::size_t df(const std::string& term) const;
  double idf(const std::string& term) const;
  // True when any ad keyword occurs in some document.
  bool overlaps(const std::vector<std::string>& ad_keywords) const;

  // Bounded score against document `doc`.
  double score(const std::vector<std::string>& ad_keywords, std::size_t doc) const;
  double raw_score(const std::vector<std::string>& ad_keywords, std::size_t doc) const;
  // Same, against an arbitrary keyword list weighted by this corpus' idf.
  double score(const std::vector<std::string>& ad_keywords,
               const std::vector<std::string>& doc_keywords) const;
  double raw_score(const std::vector<std::string>& ad_keywords,
                   const std::vector<std::string>& doc_keywords) const;

 private:
  struct Doc {
    std::unordered_map<std::string, double> weights;
    std::unordered_map<std::string, std::size_t> tf;
    double norm = 0;
  };
  Doc make_doc(const std::vector<std::string>& keywords) const;
  double score(const std::vector<std::string>& ad_keywords, const Doc& d) const;
  double raw_score(const std::vector<std::string>& ad_keywords, const Doc& d) const;
  std::unordered_map<std::string, double> query_weights(
      const std::vector<std::string>& ad_keywords, double* norm) const;

  std::vector<Doc> docs_;
  std::unordered_map<std::string, std::size_t> df_;
};

// Bounded score in [0, 1]; an empty ad keyword list scores 0.
double tfidf_score(const std::vector<std::string>& ad_keywords,
                   const std::vector<std::string>& interest_keywords,
                   const std::vector<InterestKeywords>& corpus);
double tfidf_raw_score(const std::vector<std::string>& ad_keywords,
                       const std::vector<std::string>& interest_keywords,
                       const std::vector<InterestKeywords>& corpus);

// Each ad goes to every interest within kTieTolerance of its best score.
// An ad sharing no keyword with any interest is unassigned; one whose shared
// keywords all have zero idf ties across every interest.
// Throws Error(kInvalidArgument) for an empty taxonomy.
MatchResult assign_ads(const std::vector<Ad>& ads,
                       const std::vector<InterestKeywords>& taxonomy);

// Lowercased alphanumeric tokens of a category name.
std::set<std::string> category_tokens(std::string_view category);

// |A n B| / |A u B| over the categories' token sets (1.0 when both are
// empty). Throws Error(kUnknownCategory) for a category missing from the
// map.
double jaccard_category_match(const std::string& app_category,
                              const std::string& interest_category,
                              const std::map<std::string, std::set<std::string>>&
                                  category_map);

// interest_id TAB category TAB kw1,kw2,...
std::vector<InterestKeywords> parse_taxonomy(std::istream& in);
std::vector<InterestKeywords> load_taxonomy(const std::string& path);

// ad_id TAB advertiser_id TAB payload_size_bytes TAB kw1,kw2,...
// Payloads are seeded random bytes, reproducible per (seed, ad_id).
std::vector<Ad> parse_ads(std::istream& in, std::uint64_t seed);
std::vector<Ad> load_ads(const std::string& path, std::uint64_t seed);

Bytes synth_ad_payload(std::uint64_t ad_id, std::size_t size, std::uint64_t seed);

}  // namespace adchain
