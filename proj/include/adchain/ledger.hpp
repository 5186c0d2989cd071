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

// Typed transactions chained by previous-transaction id, Ad-Block batching
// under a Merkle root, sessions, and the framed dump format.
//
// Canonical transaction encoding (all integers big-endian):
//
//   field  := u32 length || bytes
//   t_id, prev_t_id, user_digest, app_digest   as 32-byte fields
//   tx_type                                    as a 1-byte field
//   ad_ids, input, output                      as fields of u64 values
//   advertiser_id, payload                     as fields holding
//                                              u8 present || [field]
//   sender_public_key, signature               as fields
//
// emitted in the order t_id, prev_t_id, tx_type, user_digest, app_digest,
// ad_ids, advertiser_id, input, output, payload, sender_public_key,
// signature. The preimage hashed into t_id and signed is the same encoding
// without t_id and signature.

#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "adchain/bytes.hpp"
#include "adchain/cryptokit.hpp"

namespace adchain {

enum class TxType : std::uint8_t {
  kGenesis = 0,
  kRequest,
  kResponse,
  kBilling,
  kAccess,
  kUpload,
  kUpdate,
  kRemove,
  kMonitor,
};

inline constexpr std::array<TxType, 9> kAllTxTypes = {
    TxType::kGenesis, TxType::kRequest, TxType::kResponse,
    TxType::kBilling, TxType::kAccess,  TxType::kUpload,
    TxType::kUpdate,  TxType::kRemove,  TxType::kMonitor};

std::string_view to_string(TxType type);
// Case-insensitive. Throws Error(kParse).
TxType parse_tx_type(std::string_view name);

struct Transaction {
  Digest32 t_id{};
  Digest32 prev_t_id{};
  TxType tx_type = TxType::kGenesis;
  Digest32 user_digest{};
  Digest32 app_digest{};
  std::vector<std::uint64_t> ad_ids;
  std::optional<std::string> advertiser_id;
  // Ads already served in this session.
  std::vector<std::uint64_t> input;
  // Ads consumed by this Miner.
  std::vector<std::uint64_t> output;
  std::optional<HybridEnvelope> payload;
  Bytes sender_public_key;
  Bytes signature;

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

// Throws Error(kMissingField) when sender_public_key, user_digest or
// app_digest is empty.
Bytes canonical_encode(const Transaction& tx);
Bytes signing_preimage(const Transaction& tx);
// Throws Error(kParse) on malformed input.
Transaction decode_transaction(ByteView data);

Digest32 compute_t_id(const Transaction& tx);

// t_id matches the other fields and the signature verifies under
// sender_public_key.
bool verify_transaction(const Transaction& tx);

class Chain;

struct TxFields {
  TxType tx_type = TxType::kGenesis;
  Digest32 prev_t_id{};
  Digest32 user_digest{};
  Digest32 app_digest{};
  std::vector<std::uint64_t> ad_ids;
  std::optional<std::string> advertiser_id;
  std::vector<std::uint64_t> input;
  std::vector<std::uint64_t> output;
  // Sealed for `recipient` when present.
  std::optional<Bytes> payload;
};

// Seals the payload, computes t_id and signs. A Genesis must carry a zero
// prev_t_id; any other type must reference a transaction already in
// `chain`. Throws Error(kBrokenChain) otherwise.
Transaction make_transaction(const TxFields& fields, const KeyPair& sender,
                             const PublicKey* recipient, ByteSource& rng,
                             const Chain& chain);

// Append-only store of verified transactions keyed by t_id.
class Chain {
 public:
  // Throws kBrokenChain for a dangling prev_t_id, kSignatureInvalid for a
  // transaction that fails verify_transaction or collides with a stored
  // t_id. Re-adding an identical transaction is a no-op.
  void add(const Transaction& tx);

  bool contains(const Digest32& t_id) const { return index_.count(t_id) != 0; }
  const Transaction& get(const Digest32& t_id) const;
  std::size_t size() const { return order_.size(); }
  const std::vector<Transaction>& transactions() const { return order_; }

  // t_ids from `t_id` back to its Genesis, inclusive on both ends.
  std::vector<Digest32> walk_to_genesis(const Digest32& t_id) const;

 private:
  std::vector<Transaction> order_;
  std::unordered_map<Digest32, std::size_t, Digest32Hash> index_;
};

inline constexpr std::size_t kDefaultBlockSizeLimit = 64;

struct AdBlock {
  Transaction header;
  std::vector<Transaction> pending;
  Digest32 merkle_root{};
  Digest32 prev_block_hash{};
  std::size_t block_size_limit = kDefaultBlockSizeLimit;

  friend bool operator==(const AdBlock&, const AdBlock&) = default;
};

// Leaf digest for a transaction inside a block.
inline const Digest32& merkle_leaf(const Transaction& tx) { return tx.t_id; }

// Pops up to `limit` transactions from the front of `pool`. The first one
// popped becomes the header. Throws Error(kInvalidArgument) if `pool` is
// empty or `limit` is zero.
AdBlock assemble_block(std::deque<Transaction>& pool, std::size_t limit,
                       const Digest32& prev_block_hash);

// pending fits the limit and merkle_root recomputes exactly.
bool verify_block(const AdBlock& block);
Digest32 block_hash(const AdBlock& block);

Bytes encode_block(const AdBlock& block);
AdBlock decode_block(ByteView data);

// Framed dump: repeated [kind u8][length u32 BE][payload]. Transactions
// are canonical encodings, blocks use encode_block.
enum class DumpKind : std::uint8_t { kTransaction = 1, kBlock = 2 };

struct DumpRecord {
  DumpKind kind;
  Bytes bytes;
};

void write_dump_record(std::ostream& out, DumpKind kind, ByteView bytes);
// Throws Error(kParse) on a truncated or unknown frame.
std::vector<DumpRecord> read_dump(std::istream& in);

// One JSON object per transaction using the header field names
// (T_ID, PT_ID, ID_U, ID_APP, Ad_ID, AD_ID, input, output, Ad, PK+, Sign).
std::string inspect_json(const Transaction& tx);
std::string inspect_json(const AdBlock& block);

inline constexpr std::int64_t kSessionIdleHours = 24;

// Sessions per (user, app). A session closes on app exit or after
// kSessionIdleHours without activity; ads served inside it are not served
// again until it closes.
class SessionRegistry {
 public:
  using SessionId = std::uint64_t;

  // Returns the live session for (user, app), opening a new one if none is
  // live at `now`. Touches it.
  SessionId touch(const Digest32& user, const Digest32& app, std::int64_t now);
  std::optional<SessionId> live(const Digest32& user, const Digest32& app,
                                std::int64_t now) const;

  // Returns the ids closed by this call.
  std::vector<SessionId> close(const Digest32& user, const Digest32& app);
  std::vector<SessionId> expire_idle(std::int64_t now);

  const std::set<std::uint64_t>& served(SessionId id) const;
  void mark_served(SessionId id, const std::vector<std::uint64_t>& ad_ids);
  bool is_open(SessionId id) const;

 private:
  struct Session {
    Digest32 user;
    Digest32 app;
    std::int64_t last_active;
    bool open;
    std::set<std::uint64_t> served;
  };
  std::map<SessionId, Session> sessions_;
  std::map<std::pair<Digest32, Digest32>, SessionId> live_;
  SessionId next_ = 1;
};

}  // namespace adchain
