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

#include "adchain/ledger.hpp"

#include <algorithm>
#include <istream>
#include <json.hpp>
#include <ostream>

#include "adchain/error.hpp"
#include "adchain/merkle.hpp"

namespace adchain {
namespace {

void put_ids(ByteWriter& w, const std::vector<std::uint64_t>& ids) {
  ByteWriter inner;
  for (auto id : ids) inner.u64(id);
  w.field(inner.bytes());
}

std::vector<std::uint64_t> get_ids(ByteReader& r) {
  ByteView raw = r.field();
  if (raw.size() % 8 != 0) throw Error(ErrorCode::kParse, "ragged id list");
  ByteReader inner(raw);
  std::vector<std::uint64_t> out;
  out.reserve(raw.size() / 8);
  while (!inner.done()) out.push_back(inner.u64());
  return out;
}

void check_mandatory(const Transaction& tx) {
  if (tx.sender_public_key.empty()) {
    throw Error(ErrorCode::kMissingField, "sender_public_key is empty");
  }
  if (is_zero(tx.user_digest)) {
    throw Error(ErrorCode::kMissingField, "user_digest is unset");
  }
  if (is_zero(tx.app_digest)) {
    throw Error(ErrorCode::kMissingField, "app_digest is unset");
  }
}

// Everything between t_id and signature.
void put_body(ByteWriter& w, const Transaction& tx) {
  w.field(tx.prev_t_id);
  const std::uint8_t type = static_cast<std::uint8_t>(tx.tx_type);
  w.field(ByteView(&type, 1));
  w.field(tx.user_digest);
  w.field(tx.app_digest);
  put_ids(w, tx.ad_ids);
  {
    ByteWriter opt;
    opt.u8(tx.advertiser_id ? 1 : 0);
    if (tx.advertiser_id) opt.field(*tx.advertiser_id);
    w.field(opt.bytes());
  }
  put_ids(w, tx.input);
  put_ids(w, tx.output);
  {
    ByteWriter opt;
    opt.u8(tx.payload ? 1 : 0);
    if (tx.payload) opt.field(encode_envelope(*tx.payload));
    w.field(opt.bytes());
  }
  w.field(tx.sender_public_key);
}

std::uint8_t read_tag(ByteReader& r) {
  std::uint8_t tag = r.u8();
  if (tag > 1) throw Error(ErrorCode::kParse, "bad optional tag");
  return tag;
}

}  // namespace

std::string_view to_string(TxType type) {
  switch (type) {
    case TxType::kGenesis: return "Genesis";
    case TxType::kRequest: return "Request";
    case TxType::kResponse: return "Response";
    case TxType::kBilling: return "Billing";
    case TxType::kAccess: return "Access";
    case TxType::kUpload: return "Upload";
    case TxType::kUpdate: return "Update";
    case TxType::kRemove: return "Remove";
    case TxType::kMonitor: return "Monitor";
  }
  return "?";
}

TxType parse_tx_type(std::string_view name) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
  };
  const std::string want = lower(name);
  for (TxType t : kAllTxTypes) {
    if (lower(to_string(t)) == want) return t;
  }
  throw Error(ErrorCode::kParse, "unknown transaction type '" + want + "'");
}

Bytes signing_preimage(const Transaction& tx) {
  check_mandatory(tx);
  ByteWriter w;
  put_body(w, tx);
  return std::move(w).bytes();
}

Bytes canonical_encode(const Transaction& tx) {
  check_mandatory(tx);
  ByteWriter w;
  w.field(tx.t_id);
  put_body(w, tx);
  w.field(tx.signature);
  return std::move(w).bytes();
}

Transaction decode_transaction(ByteView data) {
  ByteReader r(data);
  Transaction tx;
  tx.t_id = r.digest_field();
  tx.prev_t_id = r.digest_field();
  ByteView type = r.field();
  if (type.size() != 1 || type[0] > static_cast<std::uint8_t>(TxType::kMonitor)) {
    throw Error(ErrorCode::kParse, "bad tx_type");
  }
  tx.tx_type = static_cast<TxType>(type[0]);
  tx.user_digest = r.digest_field();
  tx.app_digest = r.digest_field();
  tx.ad_ids = get_ids(r);
  {
    ByteReader opt(r.field());
    if (read_tag(opt)) tx.advertiser_id = opt.field_string();
    opt.expect_done();
  }
  tx.input = get_ids(r);
  tx.output = get_ids(r);
  {
    ByteReader opt(r.field());
    if (read_tag(opt)) tx.payload = decode_envelope(opt.field());
    opt.expect_done();
  }
  ByteView pk = r.field();
  tx.sender_public_key.assign(pk.begin(), pk.end());
  ByteView sig = r.field();
  tx.signature.assign(sig.begin(), sig.end());
  r.expect_done();
  return tx;
}

Digest32 compute_t_id(const Transaction& tx) {
  return sha256(signing_preimage(tx));
}

bool verify_transaction(const Transaction& tx) {
  try {
    Bytes pre = signing_preimage(tx);
    if (sha256(pre) != tx.t_id) return false;
    return verify_signature(pre, tx.signature,
                            PublicKey::from_der(tx.sender_public_key));
  } catch (const Error&) {
    return false;
  }
}

Transaction make_transaction(const TxFields& fields, const KeyPair& sender,
                             const PublicKey* recipient, ByteSource& rng,
                             const Chain& chain) {
  if (fields.tx_type == TxType::kGenesis) {
    if (!is_zero(fields.prev_t_id)) {
      throw Error(ErrorCode::kBrokenChain, "Genesis must have a zero prev_t_id");
    }
  } else if (!chain.contains(fields.prev_t_id)) {
    throw Error(ErrorCode::kBrokenChain,
                "prev_t_id " + to_hex(fields.prev_t_id).substr(0, 16) +
                    " is not on the chain");
  }
  Transaction tx;
  tx.prev_t_id = fields.prev_t_id;
  tx.tx_type = fields.tx_type;
  tx.user_digest = fields.user_digest;
  tx.app_digest = fields.app_digest;
  tx.ad_ids = fields.ad_ids;
  tx.advertiser_id = fields.advertiser_id;
  tx.input = fields.input;
  tx.output = fields.output;
  if (fields.payload) {
    if (recipient == nullptr) {
      throw Error(ErrorCode::kInvalidArgument, "payload needs a recipient key");
    }
    tx.payload = hybrid_encrypt(*fields.payload, *recipient, rng);
  }
  tx.sender_public_key = sender.public_key().der();
  Bytes pre = signing_preimage(tx);
  tx.t_id = sha256(pre);
  tx.signature = sign(pre, sender);
  return tx;
}

void Chain::add(const Transaction& tx) {
  if (contains(tx.t_id)) {
    if (get(tx.t_id) == tx) return;
    throw Error(ErrorCode::kSignatureInvalid,
                "different transaction under an existing t_id");
  }
  if (tx.tx_type == TxType::kGenesis) {
    if (!is_zero(tx.prev_t_id)) {
      throw Error(ErrorCode::kBrokenChain, "Genesis with non-zero prev_t_id");
    }
  } else if (!contains(tx.prev_t_id)) {
    throw Error(ErrorCode::kBrokenChain, "dangling prev_t_id");
  }
  if (!verify_transaction(tx)) {
    throw Error(ErrorCode::kSignatureInvalid,
                "transaction failed id or signature check");
  }
  index_.emplace(tx.t_id, order_.size());
  order_.push_back(tx);
}

const Transaction& Chain::get(const Digest32& t_id) const {
  auto it = index_.find(t_id);
  if (it == index_.end()) {
    throw Error(ErrorCode::kBrokenChain, "unknown transaction");
  }
  return order_[it->second];
}

std::vector<Digest32> Chain::walk_to_genesis(const Digest32& t_id) const {
  std::vector<Digest32> path;
  Digest32 cur = t_id;
  // Each hop lands on a strictly earlier insertion, so this terminates.
  for (;;) {
    const Transaction& tx = get(cur);
    path.push_back(cur);
    if (tx.tx_type == TxType::kGenesis) return path;
    if (path.size() > order_.size()) {
      throw Error(ErrorCode::kBrokenChain, "cycle in prev_t_id links");
    }
    cur = tx.prev_t_id;
  }
}

AdBlock assemble_block(std::deque<Transaction>& pool, std::size_t limit,
                       const Digest32& prev_block_hash) {
  if (pool.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no pending transactions");
  }
  if (limit == 0) {
    throw Error(ErrorCode::kInvalidArgument, "block size limit is zero");
  }
  AdBlock block;
  block.block_size_limit = limit;
  block.prev_block_hash = prev_block_hash;
  const std::size_t take = std::min(limit, pool.size());
  block.pending.assign(std::make_move_iterator(pool.begin()),
                       std::make_move_iterator(pool.begin() + take));
  pool.erase(pool.begin(), pool.begin() + take);
  block.header = block.pending.front();

  std::vector<Digest32> leaves;
  leaves.reserve(block.pending.size());
  for (const auto& tx : block.pending) leaves.push_back(merkle_leaf(tx));
  block.merkle_root = merkle_root(leaves);
  return block;
}

bool verify_block(const AdBlock& block) {
  if (block.pending.empty() || block.pending.size() > block.block_size_limit) {
    return false;
  }
  std::vector<Digest32> leaves;
  for (const auto& tx : block.pending) {
    if (compute_t_id(tx) != tx.t_id) return false;
    leaves.push_back(merkle_leaf(tx));
  }
  return merkle_root(leaves) == block.merkle_root;
}

Bytes encode_block(const AdBlock& block) {
  ByteWriter w;
  w.field(canonical_encode(block.header));
  w.u32(static_cast<std::uint32_t>(block.pending.size()));
  for (const auto& tx : block.pending) w.field(canonical_encode(tx));
  w.field(block.merkle_root);
  w.field(block.prev_block_hash);
  w.u64(block.block_size_limit);
  return std::move(w).bytes();
}

AdBlock decode_block(ByteView data) {
  ByteReader r(data);
  AdBlock block;
  block.header = decode_transaction(r.field());
  const std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    block.pending.push_back(decode_transaction(r.field()));
  }
  block.merkle_root = r.digest_field();
  block.prev_block_hash = r.digest_field();
  block.block_size_limit = r.u64();
  r.expect_done();
  return block;
}

Digest32 block_hash(const AdBlock& block) { return sha256(encode_block(block)); }

void write_dump_record(std::ostream& out, DumpKind kind, ByteView bytes) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(kind));
  w.field(bytes);
  const Bytes& b = w.bytes();
  out.write(reinterpret_cast<const char*>(b.data()),
            static_cast<std::streamsize>(b.size()));
}

std::vector<DumpRecord> read_dump(std::istream& in) {
  std::vector<DumpRecord> out;
  for (;;) {
    std::uint8_t head[5];
    in.read(reinterpret_cast<char*>(head), 5);
    if (in.gcount() == 0) break;
    if (in.gcount() != 5) throw Error(ErrorCode::kParse, "truncated frame header");
    if (head[0] != 1 && head[0] != 2) {
      throw Error(ErrorCode::kParse, "unknown record kind " + std::to_string(head[0]));
    }
    ByteReader hr(ByteView(head + 1, 4));
    DumpRecord rec{static_cast<DumpKind>(head[0]), Bytes(hr.u32())};
    in.read(reinterpret_cast<char*>(rec.bytes.data()),
            static_cast<std::streamsize>(rec.bytes.size()));
    if (static_cast<std::size_t>(in.gcount()) != rec.bytes.size()) {
      throw Error(ErrorCode::kParse, "truncated frame body");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

namespace {

nlohmann::ordered_json tx_json(const Transaction& tx) {
  nlohmann::ordered_json j;
  j["T_ID"] = to_hex(tx.t_id);
  j["PT_ID"] = to_hex(tx.prev_t_id);
  j["Type"] = std::string(to_string(tx.tx_type));
  j["ID_U"] = to_hex(tx.user_digest);
  j["ID_APP"] = to_hex(tx.app_digest);
  j["Ad_ID"] = tx.ad_ids;
  j["AD_ID"] = tx.advertiser_id ? nlohmann::ordered_json(*tx.advertiser_id)
                                : nlohmann::ordered_json(nullptr);
  j["input"] = tx.input;
  j["output"] = tx.output;
  if (tx.payload) {
    j["Ad"] = {{"recipient", to_hex(tx.payload->recipient_key_id)},
               {"wrapped_key_bytes", tx.payload->wrapped_key.size()},
               {"ciphertext_bytes", tx.payload->ciphertext.size()}};
  } else {
    j["Ad"] = nullptr;
  }
  j["PK+"] = to_hex(sha256(tx.sender_public_key));
  j["Sign"] = to_hex(tx.signature);
  j["verified"] = verify_transaction(tx);
  return j;
}

}  // namespace

std::string inspect_json(const Transaction& tx) { return tx_json(tx).dump(); }

std::string inspect_json(const AdBlock& block) {
  nlohmann::ordered_json j;
  j["block"] = to_hex(block_hash(block));
  j["prev_block"] = to_hex(block.prev_block_hash);
  j["merkle_root"] = to_hex(block.merkle_root);
  j["size_limit"] = block.block_size_limit;
  j["header"] = to_hex(block.header.t_id);
  auto ids = nlohmann::ordered_json::array();
  for (const auto& tx : block.pending) ids.push_back(to_hex(tx.t_id));
  j["pending"] = ids;
  j["merkle_ok"] = verify_block(block);
  return j.dump();
}

// SessionRegistry ------------------------------------------------------------

SessionRegistry::SessionId SessionRegistry::touch(const Digest32& user,
                                                  const Digest32& app,
                                                  std::int64_t now) {
  expire_idle(now);
  auto key = std::pair{user, app};
  auto it = live_.find(key);
  if (it != live_.end()) {
    sessions_.at(it->second).last_active = now;
    return it->second;
  }
  SessionId id = next_++;
  sessions_.emplace(id, Session{user, app, now, true, {}});
  live_.emplace(key, id);
  return id;
}

std::optional<SessionRegistry::SessionId> SessionRegistry::live(
    const Digest32& user, const Digest32& app, std::int64_t now) const {
  auto it = live_.find({user, app});
  if (it == live_.end()) return std::nullopt;
  if (now - sessions_.at(it->second).last_active >= kSessionIdleHours) {
    return std::nullopt;
  }
  return it->second;
}

std::vector<SessionRegistry::SessionId> SessionRegistry::close(
    const Digest32& user, const Digest32& app) {
  auto it = live_.find({user, app});
  if (it == live_.end()) return {};
  SessionId id = it->second;
  sessions_.at(id).open = false;
  live_.erase(it);
  return {id};
}

std::vector<SessionRegistry::SessionId> SessionRegistry::expire_idle(
    std::int64_t now) {
  std::vector<SessionId> closed;
  for (auto it = live_.begin(); it != live_.end();) {
    Session& s = sessions_.at(it->second);
    if (now - s.last_active >= kSessionIdleHours) {
      s.open = false;
      closed.push_back(it->second);
      it = live_.erase(it);
    } else {
      ++it;
    }
  }
  return closed;
}

const std::set<std::uint64_t>& SessionRegistry::served(SessionId id) const {
  auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    throw Error(ErrorCode::kInvalidArgument, "unknown session");
  }
  return it->second.served;
}

void SessionRegistry::mark_served(SessionId id,
                                  const std::vector<std::uint64_t>& ad_ids) {
  auto it = sessions_.find(id);
  if (it == sessions_.end() || !it->second.open) {
    throw Error(ErrorCode::kInvalidArgument, "session is not open");
  }
  it->second.served.insert(ad_ids.begin(), ad_ids.end());
}

bool SessionRegistry::is_open(SessionId id) const {
  auto it = sessions_.find(id);
  return it != sessions_.end() && it->second.open;
}

}  // namespace adchain
