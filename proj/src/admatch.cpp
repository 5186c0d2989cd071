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

#include "adchain/admatch.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "adchain/error.hpp"
#include "adchain/random.hpp"

namespace adchain {

std::string normalize_keyword(std::string_view kw) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!kw.empty() && is_space(kw.front())) kw.remove_prefix(1);
  while (!kw.empty() && is_space(kw.back())) kw.remove_suffix(1);
  std::string out(kw);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

namespace {

std::unordered_map<std::string, std::size_t> term_counts(
    const std::vector<std::string>& keywords) {
  std::unordered_map<std::string, std::size_t> tf;
  for (const auto& kw : keywords) {
    std::string t = normalize_keyword(kw);
    if (!t.empty()) ++tf[t];
  }
  return tf;
}

}  // namespace

TfIdfCorpus::TfIdfCorpus(const std::vector<InterestKeywords>& docs) {
  if (docs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "tf-idf corpus is empty");
  }
  docs_.resize(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    docs_[i].tf = term_counts(docs[i].keywords);
    if (docs_[i].tf.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "interest " + docs[i].interest.interest_id + " has no keywords");
    }
    for (const auto& [term, count] : docs_[i].tf) ++df_[term];
  }
  for (std::size_t i = 0; i < docs.size(); ++i) docs_[i] = make_doc(docs[i].keywords);
}

TfIdfCorpus::Doc TfIdfCorpus::make_doc(const std::vector<std::string>& keywords) const {
  Doc doc;
  doc.tf = term_counts(keywords);
  double sq = 0;
  for (const auto& [term, count] : doc.tf) {
    double w = static_cast<double>(count) * idf(term);
    doc.weights[term] = w;
    sq += w * w;
  }
  doc.norm = std::sqrt(sq);
  return doc;
}

std::size_t TfIdfCorpus::df(const std::string& term) const {
  auto it = df_.find(term);
  return it == df_.end() ? 0 : it->second;
}

bool TfIdfCorpus::overlaps(const std::vector<std::string>& ad_keywords) const {
  for (const auto& kw : ad_keywords) {
    if (df_.count(normalize_keyword(kw))) return true;
  }
  return false;
}

double TfIdfCorpus::idf(const std::string& term) const {
  std::size_t d = df(term);
  if (d == 0) return 0.0;
  return std::log(static_cast<double>(docs_.size()) / static_cast<double>(d));
}

std::unordered_map<std::string, double> TfIdfCorpus::query_weights(
    const std::vector<std::string>& ad_keywords, double* norm) const {
  std::unordered_map<std::string, double> w;
  double sq = 0;
  for (const auto& [term, count] : term_counts(ad_keywords)) {
    double x = static_cast<double>(count) * idf(term);
    if (x != 0) {
      w[term] = x;
      sq += x * x;
    }
  }
  *norm = std::sqrt(sq);
  return w;
}

double TfIdfCorpus::score(const std::vector<std::string>& ad_keywords,
                          std::size_t doc) const {
  return score(ad_keywords, docs_.at(doc));
}

double TfIdfCorpus::raw_score(const std::vector<std::string>& ad_keywords,
                              std::size_t doc) const {
  return raw_score(ad_keywords, docs_.at(doc));
}

double TfIdfCorpus::score(const std::vector<std::string>& ad_keywords,
                          const std::vector<std::string>& doc_keywords) const {
  return score(ad_keywords, make_doc(doc_keywords));
}

double TfIdfCorpus::raw_score(const std::vector<std::string>& ad_keywords,
                              const std::vector<std::string>& doc_keywords) const {
  return raw_score(ad_keywords, make_doc(doc_keywords));
}

double TfIdfCorpus::score(const std::vector<std::string>& ad_keywords,
                          const Doc& d) const {
  double qnorm = 0;
  auto q = query_weights(ad_keywords, &qnorm);
  if (qnorm == 0 || d.norm == 0) return 0.0;
  double dot = 0;
  for (const auto& [term, w] : q) {
    auto it = d.weights.find(term);
    if (it != d.weights.end()) dot += w * it->second;
  }
  return std::clamp(dot / (qnorm * d.norm), 0.0, 1.0);
}

double TfIdfCorpus::raw_score(const std::vector<std::string>& ad_keywords,
                              const Doc& d) const {
  double sum = 0;
  std::set<std::string> terms;
  for (const auto& kw : ad_keywords) terms.insert(normalize_keyword(kw));
  for (const auto& term : terms) {
    auto it = d.tf.find(term);
    if (it != d.tf.end()) sum += static_cast<double>(it->second) * idf(term);
  }
  return sum;
}

double tfidf_score(const std::vector<std::string>& ad_keywords,
                   const std::vector<std::string>& interest_keywords,
                   const std::vector<InterestKeywords>& corpus) {
  if (ad_keywords.empty()) return 0.0;
  TfIdfCorpus c(corpus);
  return c.score(ad_keywords, interest_keywords);
}

double tfidf_raw_score(const std::vector<std::string>& ad_keywords,
                       const std::vector<std::string>& interest_keywords,
                       const std::vector<InterestKeywords>& corpus) {
  if (ad_keywords.empty()) return 0.0;
  TfIdfCorpus c(corpus);
  return c.raw_score(ad_keywords, interest_keywords);
}

MatchResult assign_ads(const std::vector<Ad>& ads,
                       const std::vector<InterestKeywords>& taxonomy) {
  MatchResult result;
  if (ads.empty()) return result;
  TfIdfCorpus corpus(taxonomy);
  std::vector<double> row(taxonomy.size());
  for (const Ad& ad : ads) {
    double best = 0;
    for (std::size_t j = 0; j < taxonomy.size(); ++j) {
      row[j] = corpus.score(ad.keywords, j);
      result.scores[{ad.ad_id, taxonomy[j].interest}] = row[j];
      best = std::max(best, row[j]);
    }
    // A zero best score with shared terms means every shared term occurs in
    // every document, so all interests tie.
    if (best <= 0 && !corpus.overlaps(ad.keywords)) {
      result.unassigned.push_back(ad.ad_id);
      continue;
    }
    for (std::size_t j = 0; j < taxonomy.size(); ++j) {
      if (best - row[j] <= kTieTolerance) {
        result.assignments[taxonomy[j].interest].push_back(ad.ad_id);
      }
    }
  }
  return result;
}

std::set<std::string> category_tokens(std::string_view category) {
  std::set<std::string> out;
  std::string cur;
  for (char ch : category) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.insert(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.insert(std::move(cur));
  return out;
}

double jaccard_category_match(
    const std::string& app_category, const std::string& interest_category,
    const std::map<std::string, std::set<std::string>>& category_map) {
  auto lookup = [&](const std::string& c) -> const std::set<std::string>& {
    auto it = category_map.find(c);
    if (it == category_map.end()) {
      throw Error(ErrorCode::kUnknownCategory, "unknown category '" + c + "'");
    }
    return it->second;
  };
  const auto& a = lookup(app_category);
  const auto& b = lookup(interest_category);
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& t : a) inter += b.count(t);
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

std::vector<std::string> split_keywords(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::string k = normalize_keyword(item);
    if (!k.empty()) out.push_back(std::move(k));
  }
  return out;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  std::istringstream in(line);
  std::string col;
  while (std::getline(in, col, '\t')) cols.push_back(col);
  if (!line.empty() && line.back() == '\t') cols.emplace_back();
  return cols;
}

template <typename Fn>
void for_each_line(std::istream& in, Fn fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    fn(split_tabs(line), lineno);
  }
}

std::uint64_t parse_u64(const std::string& s, const char* what, std::size_t lineno) {
  try {
    std::size_t used = 0;
    if (!s.empty() && s[0] == '-') throw std::invalid_argument("negative");
    auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kParse,
                "line " + std::to_string(lineno) + ": bad " + what + " '" + s + "'");
  }
}

}  // namespace

std::vector<InterestKeywords> parse_taxonomy(std::istream& in) {
  std::vector<InterestKeywords> out;
  std::set<Interest> seen;
  for_each_line(in, [&](const std::vector<std::string>& cols, std::size_t lineno) {
    if (cols.size() != 3 || cols[0].empty() || cols[1].empty()) {
      throw Error(ErrorCode::kParse,
                  "taxonomy line " + std::to_string(lineno) + ": expected 3 columns");
    }
    InterestKeywords ik{{cols[0], cols[1]}, split_keywords(cols[2])};
    if (ik.keywords.empty()) {
      throw Error(ErrorCode::kParse,
                  "taxonomy line " + std::to_string(lineno) + ": no keywords");
    }
    if (!seen.insert(ik.interest).second) {
      throw Error(ErrorCode::kParse,
                  "taxonomy line " + std::to_string(lineno) + ": duplicate interest");
    }
    out.push_back(std::move(ik));
  });
  return out;
}

std::vector<InterestKeywords> load_taxonomy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open taxonomy file " + path);
  return parse_taxonomy(in);
}

Bytes synth_ad_payload(std::uint64_t ad_id, std::size_t size, std::uint64_t seed) {
  SeededByteSource rng(seed, "ad-payload/" + std::to_string(ad_id));
  return rng.bytes(size);
}

std::vector<Ad> parse_ads(std::istream& in, std::uint64_t seed) {
  std::vector<Ad> out;
  std::set<std::uint64_t> seen;
  for_each_line(in, [&](const std::vector<std::string>& cols, std::size_t lineno) {
    if (cols.size() != 4) {
      throw Error(ErrorCode::kParse,
                  "ads line " + std::to_string(lineno) + ": expected 4 columns");
    }
    Ad ad;
    ad.ad_id = parse_u64(cols[0], "ad id", lineno);
    ad.advertiser_id = cols[1];
    std::uint64_t size = parse_u64(cols[2], "payload size", lineno);
    if (size == 0 || size > (64u << 20)) {
      throw Error(ErrorCode::kParse,
                  "ads line " + std::to_string(lineno) + ": payload size out of range");
    }
    ad.keywords = split_keywords(cols[3]);
    if (!seen.insert(ad.ad_id).second) {
      throw Error(ErrorCode::kParse,
                  "ads line " + std::to_string(lineno) + ": duplicate ad id");
    }
    ad.payload = synth_ad_payload(ad.ad_id, size, seed);
    out.push_back(std::move(ad));
  });
  return out;
}

std::vector<Ad> load_ads(const std::string& path, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open ads file " + path);
  return parse_ads(in, seed);
}

}  // namespace adchain
