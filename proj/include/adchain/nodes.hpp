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

// The simulated parties and the flows between them.
//
// Each node owns its state and only learns what arrives in a Message body.
// Flows are driven synchronously: a flow function sends a message, hands the
// delivered copy to the receiving node and relays the reply, so the bus log
// is the complete record of who saw what.
//
// Message kinds:
//   aps -> cs      StoreRequest, Chunk           cs -> aps   StoreGrant,
//                                                             ChunkAck, ChunkReject
//   miner -> cs    Upload | Update (transaction) cs -> miner UploadAck
//   miner -> ch -> cs   Request (Ad-Block), Monitor (transaction)
//   cs -> ch -> miner   Response
//   miner -> bs    Billing (transaction)         bs -> miner BillingAck
//   any refusing hop    Refusal

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "adchain/billing.hpp"
#include "adchain/bus.hpp"
#include "adchain/ledger.hpp"
#include "adchain/policy.hpp"
#include "adchain/profile.hpp"
#include "adchain/storage.hpp"

namespace adchain {

// What leaves a device in place of a user or app id.
Digest32 identity_digest(std::string_view id);

// Id of the Miner's own app thread, which carries profile uploads.
inline constexpr std::string_view kSystemAppId = "adchain.system-app";

inline constexpr std::string_view kResourceAds = "ads";
inline constexpr std::string_view kResourceIndex = "index";
inline constexpr std::string_view kResourceProfile = "profile";
inline constexpr std::string_view kResourceTracking = "tracking";

struct ApsNode {
  explicit ApsNode(KeyPair k) : key(std::move(k)) {}

  std::string name{"aps"};
  KeyPair key;
  ProfilingAdsIndex index;
  // P_b as last acknowledged by the store.
  std::uint64_t acknowledged_pointer = 0;
};

struct StoredProfile {
  Digest32 owner_key_id{};
  Digest32 content{};
  Extent extent;
  std::set<Bytes> digests;
};

class CloudStorageNode {
 public:
  CloudStorageNode(KeyPair key, std::size_t block_capacity, std::size_t max_blocks,
                   const std::vector<Rule>& policy, std::size_t root_position = 1);

  std::string name{"cs"};
  KeyPair key;
  PolicyDocument policy;
  StorageArena arena;
  std::map<Bytes, std::vector<std::uint64_t>> index_slots;
  std::vector<Extent> index_extents;
  std::map<Digest32, StoredProfile> profiles;
  std::vector<Transaction> monitor_reports;

  // Handlers. Each throws on refusal; the flow turns that into a Refusal.
  Bytes on_store_request(const Message& m, const PublicKey& aps, ByteSource& rng);
  // Returns the ChunkAck body, or nullopt when the chunk must be resent.
  std::optional<Bytes> on_chunk(const Message& m, const PublicKey& aps, ByteSource& rng);
  Extent on_upload(const Message& m);
  Bytes on_request(const Message& m);
  void on_monitor(const Message& m);

  // Chunks rejected since the last grant.
  std::uint64_t rejected_chunks() const { return rejected_; }

 private:
  struct PendingStore {
    std::uint64_t first_slot = 0;
    std::uint64_t records = 0;
    std::uint64_t bfr = 0;
    std::uint64_t next_chunk = 0;
  };
  void admit(const Digest32& requester, TxType type, std::string_view resource);

  std::optional<PendingStore> pending_;
  std::uint64_t rejected_ = 0;
};

class ClusterHeadNode {
 public:
  ClusterHeadNode(KeyPair key, const std::vector<Rule>& policy,
                  std::size_t root_position = 1);

  std::string name{"ch"};
  KeyPair key;
  PolicyDocument policy;

  // Verifies and policy-checks a Request block or Monitor transaction.
  void screen(const Message& m);
};

class BillingServerNode {
 public:
  BillingServerNode(KeyPair key, Shares shares);

  std::string name{"bs"};
  KeyPair key;
  WalletLedger ledger;
  std::vector<LedgerDelta> history;

  // Returns the BillingAck body.
  Bytes on_billing(const Message& m);
};

struct MinerConfig {
  std::size_t block_size_limit = kDefaultBlockSizeLimit;
  DigestScheme scheme = DigestScheme::kSha256;
};

class MinerNode {
 public:
  MinerNode(std::string name, std::string user_id, KeyPair key, KeyPair group_key,
            PublicKey cs_public, PublicKey bs_public, ProfileEngine engine,
            SeededByteSource rng, MinerConfig config = {});

  std::string name;
  std::string user_id;
  Digest32 user_digest;
  KeyPair key;
  KeyPair group_key;
  PublicKey cs_public;
  PublicKey bs_public;
  PolicyDocument policy;
  ProfileEngine engine;
  InterestProfile profile;
  Chain chain;
  std::deque<Transaction> pool;
  std::vector<AdBlock> blocks;
  Digest32 last_block_hash{};
  std::map<Digest32, AppRef> apps;
  std::map<Digest32, Digest32> heads;
  Digest32 system_app;
  SessionRegistry sessions;
  std::map<SessionRegistry::SessionId, Digest32> session_app;
  std::map<SessionRegistry::SessionId, std::vector<std::uint64_t>> presentations;
  TrackingList tracking;
  std::optional<Digest32> uploaded_content;
  MinerConfig config;

  // Emits the Genesis transaction of a newly installed app.
  Digest32 install(const AppRef& app);
  void record_usage(const std::string& app_id, std::int64_t duration, std::int64_t now);
  const AppRef& app(const Digest32& app_digest) const;

  // Signs a transaction on top of the app's thread and records it.
  Transaction append(TxFields fields, const PublicKey* recipient);

  ByteSource& rng() { return rng_; }

 private:
  SeededByteSource rng_;
};

// Moves the APS index into the store chunk by chunk. Throws
// Error(kEmptyIndex) before any message for an empty index,
// AccessDenied("cs") when refused, Error(kStorageFull) when the arena is too
// small and Error(kDigestMismatch) when a chunk is rejected more than
// `max_retries` times.
Extent store_index(ApsNode& aps, CloudStorageNode& cs, Bus& bus, ByteSource& rng,
                   std::size_t max_retries = 3);

// Derives the profile at `now` and uploads its digests. Throws
// Error(kEmptyProfile) or AccessDenied("cs").
Extent miner_profile_upload(MinerNode& miner, CloudStorageNode& cs, Bus& bus,
                            std::int64_t now);

// Throws AccessDenied naming the refusing hop.
std::vector<Ad> ads_request(const Digest32& app_digest, MinerNode& miner,
                            ClusterHeadNode& ch, CloudStorageNode& cs, Bus& bus,
                            std::int64_t now);

// Bills a click on an ad served in the app's live session. Throws
// Error(kUnknownAd) for an ad not served there.
LedgerDelta click(const Digest32& app_digest, std::uint64_t ad_id, MinerNode& miner,
                  BillingServerNode& bs, Bus& bus, std::int64_t now);

struct SessionFlush {
  std::vector<LedgerDelta> deltas;
  bool monitor_sent = false;
};

// Closes the app's session: batched presentations go to billing and the
// tracking list goes to the store as a Monitor transaction.
SessionFlush close_session(const Digest32& app_digest, MinerNode& miner,
                           ClusterHeadNode& ch, CloudStorageNode& cs,
                           BillingServerNode& bs, Bus& bus, std::int64_t now);

// Same for every session idle for kSessionIdleHours at `now`.
SessionFlush expire_sessions(MinerNode& miner, ClusterHeadNode& ch,
                             CloudStorageNode& cs, BillingServerNode& bs, Bus& bus,
                             std::int64_t now);

}  // namespace adchain
