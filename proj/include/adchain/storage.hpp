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

// The encrypted profiling-ads index and the block-structured store that
// holds it at the cloud side.

#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "adchain/admatch.hpp"
#include "adchain/bytes.hpp"
#include "adchain/cryptokit.hpp"
#include "adchain/random.hpp"

namespace adchain {

// Interest digest -> encrypted ads. Digests are over encode_interest().
struct ProfilingAdsIndex {
  DigestScheme scheme = DigestScheme::kSha256;
  std::map<Bytes, std::vector<HybridEnvelope>> entries;

  // One record per (digest, envelope) pair.
  std::size_t record_count() const;
};

// Plaintext carried inside each envelope: ad id, advertiser, payload.
Bytes encode_ad(const Ad& ad);
Ad decode_ad(ByteView data);

// Matches ads to interests, then hashes every interest that received ads
// and encrypts each of its ads for `recipient`. Throws
// Error(kInvalidArgument) when no ad can be assigned.
ProfilingAdsIndex global_setup(const std::vector<Ad>& ads,
                               const std::vector<InterestKeywords>& taxonomy,
                               const PublicKey& recipient, DigestScheme scheme,
                               ByteSource& rng);

// Storage records of the index in digest order.
Bytes encode_index_record(ByteView digest, const HybridEnvelope& env);
std::pair<Bytes, HybridEnvelope> decode_index_record(ByteView record);
std::vector<Bytes> index_records(const ProfilingAdsIndex& index);

// ceil(records / block_capacity). Throws Error(kInvalidArgument) for a zero
// capacity.
std::uint64_t blocking_factor(std::uint64_t records, std::uint64_t block_capacity);

struct Extent {
  std::uint64_t first_slot = 0;
  std::uint64_t record_count = 0;
  std::uint64_t block_count = 0;

  friend bool operator==(const Extent&, const Extent&) = default;
};

Bytes encode_extent(const Extent& e);
Extent decode_extent(ByteView data);

// Fixed-capacity blocks filled record by record. The next pointer is the
// first free slot; records of one extent may span block boundaries.
class StorageArena {
 public:
  // Throws Error(kInvalidArgument) for a zero capacity or block limit.
  StorageArena(std::size_t block_capacity, std::size_t max_blocks);

  std::size_t block_capacity() const { return capacity_; }
  std::size_t max_blocks() const { return max_blocks_; }
  std::uint64_t next_pointer() const { return next_; }
  std::size_t blocks_used() const { return blocks_.size(); }
  std::uint64_t free_slots() const;

  // Throws Error(kStorageFull) when the arena cannot take one more record.
  std::uint64_t append(Bytes record);
  const Bytes& record(std::uint64_t slot) const;
  std::vector<Bytes> read(const Extent& e) const;
  const std::vector<std::vector<Bytes>>& blocks() const { return blocks_; }

 private:
  std::size_t capacity_;
  std::size_t max_blocks_;
  std::uint64_t next_ = 0;
  std::vector<std::vector<Bytes>> blocks_;
};

// Digest covering one transfer chunk of records.
Digest32 chunk_digest(const std::vector<Bytes>& records);

}  // namespace adchain
