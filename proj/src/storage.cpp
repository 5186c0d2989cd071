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

#include "adchain/storage.hpp"

#include "adchain/error.hpp"
#include "adchain/profile.hpp"

namespace adchain {

std::size_t ProfilingAdsIndex::record_count() const {
  std::size_t n = 0;
  for (const auto& [d, envs] : entries) n += envs.size();
  return n;
}

Bytes encode_ad(const Ad& ad) {
  ByteWriter w;
  w.u64(ad.ad_id).field(ad.advertiser_id).field(ad.payload);
  return std::move(w).bytes();
}

Ad decode_ad(ByteView data) {
  ByteReader r(data);
  Ad ad;
  ad.ad_id = r.u64();
  ad.advertiser_id = r.field_string();
  ByteView p = r.field();
  ad.payload.assign(p.begin(), p.end());
  r.expect_done();
  return ad;
}

ProfilingAdsIndex global_setup(const std::vector<Ad>& ads,
                               const std::vector<InterestKeywords>& taxonomy,
                               const PublicKey& recipient, DigestScheme scheme,
                               ByteSource& rng) {
  MatchResult match = assign_ads(ads, taxonomy);
  if (match.assignments.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no ad could be assigned to an interest");
  }
  std::map<std::uint64_t, const Ad*> by_id;
  for (const auto& ad : ads) by_id[ad.ad_id] = &ad;

  ProfilingAdsIndex index;
  index.scheme = scheme;
  for (const auto& [interest, ids] : match.assignments) {
    auto& envs = index.entries[digest(encode_interest(interest), scheme)];
    for (auto id : ids) {
      envs.push_back(hybrid_encrypt(encode_ad(*by_id.at(id)), recipient, rng));
    }
  }
  return index;
}

Bytes encode_index_record(ByteView digest, const HybridEnvelope& env) {
  ByteWriter w;
  w.field(digest).field(encode_envelope(env));
  return std::move(w).bytes();
}

std::pair<Bytes, HybridEnvelope> decode_index_record(ByteView record) {
  ByteReader r(record);
  ByteView d = r.field();
  HybridEnvelope env = decode_envelope(r.field());
  r.expect_done();
  return {Bytes(d.begin(), d.end()), std::move(env)};
}

std::vector<Bytes> index_records(const ProfilingAdsIndex& index) {
  std::vector<Bytes> out;
  out.reserve(index.record_count());
  for (const auto& [d, envs] : index.entries) {
    for (const auto& env : envs) out.push_back(encode_index_record(d, env));
  }
  return out;
}

std::uint64_t blocking_factor(std::uint64_t records, std::uint64_t block_capacity) {
  if (block_capacity == 0) {
    throw Error(ErrorCode::kInvalidArgument, "block capacity is zero");
  }
  return records / block_capacity + (records % block_capacity != 0 ? 1 : 0);
}

Bytes encode_extent(const Extent& e) {
  ByteWriter w;
  w.u64(e.first_slot).u64(e.record_count).u64(e.block_count);
  return std::move(w).bytes();
}

Extent decode_extent(ByteView data) {
  ByteReader r(data);
  Extent e;
  e.first_slot = r.u64();
  e.record_count = r.u64();
  e.block_count = r.u64();
  r.expect_done();
  return e;
}

StorageArena::StorageArena(std::size_t block_capacity, std::size_t max_blocks)
    : capacity_(block_capacity), max_blocks_(max_blocks) {
  if (capacity_ == 0 || max_blocks_ == 0) {
    throw Error(ErrorCode::kInvalidArgument, "storage arena needs a positive size");
  }
}

std::uint64_t StorageArena::free_slots() const {
  return static_cast<std::uint64_t>(capacity_) * max_blocks_ - next_;
}

std::uint64_t StorageArena::append(Bytes record) {
  if (free_slots() == 0) throw Error(ErrorCode::kStorageFull, "storage arena is full");
  if (next_ % capacity_ == 0) {
    blocks_.emplace_back();
    blocks_.back().reserve(capacity_);
  }
  blocks_.back().push_back(std::move(record));
  return next_++;
}

const Bytes& StorageArena::record(std::uint64_t slot) const {
  if (slot >= next_) {
    throw Error(ErrorCode::kIndexOutOfRange, "slot " + std::to_string(slot) + " is free");
  }
  return blocks_[slot / capacity_][slot % capacity_];
}

std::vector<Bytes> StorageArena::read(const Extent& e) const {
  std::vector<Bytes> out;
  out.reserve(e.record_count);
  for (std::uint64_t i = 0; i < e.record_count; ++i) out.push_back(record(e.first_slot + i));
  return out;
}

Digest32 chunk_digest(const std::vector<Bytes>& records) {
  ByteWriter w;
  w.field("adchain/chunk").u32(static_cast<std::uint32_t>(records.size()));
  for (const auto& r : records) w.field(r);
  return sha256(w.bytes());
}

}  // namespace adchain
