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

#include "adchain/nodes.hpp"

#include <algorithm>

#include "adchain/error.hpp"

namespace adchain {

Digest32 identity_digest(std::string_view id) { return sha256(as_bytes(id)); }

namespace {

Digest32 key_id_of(ByteView der) { return sha256(der); }

Bytes refusal_body(std::string_view hop, std::string_view reason) {
  ByteWriter w;
  w.field(hop).field(reason);
  return std::move(w).bytes();
}

// Sends a Refusal along `path` (pairs of from/to) and rethrows.
[[noreturn]] void refuse(Bus& bus, const std::vector<std::pair<std::string, std::string>>& path,
                         std::string_view hop, const std::exception& e) {
  for (const auto& [from, to] : path) {
    bus.send(from, to, "Refusal", refusal_body(hop, e.what()));
  }
  throw;
}

void admit_with(const PolicyDocument& policy, std::string_view hop,
                const Digest32& requester, TxType type, std::string_view resource) {
  RequestContext ctx{requester, type, std::string(resource)};
  TraversalResult r = policy.traverse(ctx);
  if (r.decision != Decision::kAllow) {
    throw AccessDenied(std::string(hop), std::string(hop) + " policy denies " +
                                             std::string(to_string(type)) + " on " +
                                             std::string(resource));
  }
}

Transaction checked_transaction(ByteView body) {
  Transaction tx = decode_transaction(body);
  if (!verify_transaction(tx)) {
    throw Error(ErrorCode::kSignatureInvalid, "transaction does not verify");
  }
  return tx;
}

AdBlock checked_block(ByteView body) {
  AdBlock block = decode_block(body);
  if (!verify_block(block) || !verify_transaction(block.header) ||
      block.header.tx_type != TxType::kRequest) {
    throw Error(ErrorCode::kSignatureInvalid, "Ad-Block does not verify");
  }
  for (const auto& tx : block.pending) {
    if (!verify_transaction(tx)) {
      throw Error(ErrorCode::kSignatureInvalid, "pending transaction does not verify");
    }
  }
  return block;
}

Bytes encode_digest_list(DigestScheme scheme, const std::vector<Bytes>& digests) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(scheme)).u32(static_cast<std::uint32_t>(digests.size()));
  for (const auto& d : digests) w.field(d);
  return std::move(w).bytes();
}

Bytes encode_billing(const std::string& developer, BillEvent kind,
                     const std::vector<std::uint64_t>& ads) {
  ByteWriter w;
  w.field(developer).u8(static_cast<std::uint8_t>(kind)).u32(
      static_cast<std::uint32_t>(ads.size()));
  for (auto id : ads) w.u64(id);
  return std::move(w).bytes();
}

Bytes encode_tracking(const TrackingList& list) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(list.rows().size()));
  for (const auto& r : list.rows()) {
    w.u64(static_cast<std::uint64_t>(r.timestamp))
        .u64(r.ad_id)
        .u64(static_cast<std::uint64_t>(r.required_frequency))
        .u64(static_cast<std::uint64_t>(r.served_count))
        .u64(static_cast<std::uint64_t>(r.served_fraction));
  }
  return std::move(w).bytes();
}

}  // namespace

// ---- CS ----

CloudStorageNode::CloudStorageNode(KeyPair k, std::size_t block_capacity,
                                   std::size_t max_blocks, const std::vector<Rule>& rules,
                                   std::size_t root_position)
    : key(std::move(k)), arena(block_capacity, max_blocks) {
  if (!rules.empty()) {
    PolicyDocument::Draft d{rules, root_position, 0};
    policy.publish(d);
  }
}

void CloudStorageNode::admit(const Digest32& requester, TxType type,
                             std::string_view resource) {
  admit_with(policy, "cs", requester, type, resource);
}

Bytes CloudStorageNode::on_store_request(const Message& m, const PublicKey& aps,
                                         ByteSource& rng) {
  admit(aps.key_id(), TxType::kUpload, kResourceIndex);
  ByteReader r(m.body);
  const std::uint64_t records = r.u64();
  r.expect_done();
  if (records == 0) throw Error(ErrorCode::kEmptyIndex, "nothing to store");
  if (arena.free_slots() < records) {
    throw Error(ErrorCode::kStorageFull, "store cannot hold " + std::to_string(records) +
                                             " records");
  }
  const std::uint64_t b = arena.block_capacity();
  pending_ = PendingStore{arena.next_pointer(), records, blocking_factor(records, b), 0};
  rejected_ = 0;

  ByteWriter w;
  w.u64(b);
  Bytes ptr = ByteWriter().u64(arena.next_pointer()).bytes();
  w.field(encode_envelope(hybrid_encrypt(ptr, aps, rng)));
  return std::move(w).bytes();
}

std::optional<Bytes> CloudStorageNode::on_chunk(const Message& m, const PublicKey& aps,
                                                ByteSource& rng) {
  if (!pending_) throw Error(ErrorCode::kInvalidArgument, "no storage grant open");
  std::vector<Bytes> records;
  std::uint64_t index = 0;
  try {
    ByteReader r(m.body);
    const std::uint64_t bfr = r.u64();
    index = r.u64();
    const Digest32 claimed = r.digest_field();
    const std::uint32_t n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
      ByteView rec = r.field();
      records.emplace_back(rec.begin(), rec.end());
    }
    r.expect_done();
    if (bfr != pending_->bfr || index != pending_->next_chunk ||
        chunk_digest(records) != claimed) {
      throw Error(ErrorCode::kDigestMismatch, "chunk digest mismatch");
    }
  } catch (const Error&) {
    ++rejected_;
    return std::nullopt;
  }
  for (auto& rec : records) {
    auto [digest, env] = decode_index_record(rec);
    index_slots[digest].push_back(arena.append(std::move(rec)));
  }
  ++pending_->next_chunk;
  if (pending_->next_chunk == pending_->bfr) {
    const std::uint64_t b = arena.block_capacity();
    const std::uint64_t last = pending_->first_slot + pending_->records - 1;
    index_extents.push_back({pending_->first_slot, pending_->records,
                             last / b - pending_->first_slot / b + 1});
    pending_.reset();
  }
  ByteWriter w;
  w.u64(index);
  Bytes ptr = ByteWriter().u64(arena.next_pointer()).bytes();
  w.field(encode_envelope(hybrid_encrypt(ptr, aps, rng)));
  return std::move(w).bytes();
}

Extent CloudStorageNode::on_upload(const Message& m) {
  Transaction tx = checked_transaction(m.body);
  if (tx.tx_type != TxType::kUpload && tx.tx_type != TxType::kUpdate) {
    throw Error(ErrorCode::kInvalidArgument, "not a profile upload");
  }
  const Digest32 owner = key_id_of(tx.sender_public_key);
  admit(owner, tx.tx_type, kResourceProfile);
  if (!tx.payload) throw Error(ErrorCode::kMissingField, "upload without payload");
  Bytes content = hybrid_decrypt(*tx.payload, key);

  ByteReader r(content);
  r.u8();
  const std::uint32_t n = r.u32();
  std::set<Bytes> digests;
  std::vector<Bytes> ordered;
  for (std::uint32_t i = 0; i < n; ++i) {
    ByteView d = r.field();
    ordered.emplace_back(d.begin(), d.end());
    digests.insert(ordered.back());
  }
  r.expect_done();
  if (ordered.empty()) throw Error(ErrorCode::kEmptyProfile, "empty profile upload");

  const Digest32 content_id = sha256(content);
  auto it = profiles.find(tx.user_digest);
  if (it != profiles.end() && it->second.owner_key_id == owner &&
      it->second.content == content_id) {
    return it->second.extent;
  }
  if (arena.free_slots() < ordered.size()) {
    throw Error(ErrorCode::kStorageFull, "store cannot hold the profile");
  }
  Extent e{arena.next_pointer(), ordered.size(), 0};
  for (auto& d : ordered) arena.append(std::move(d));
  const std::uint64_t b = arena.block_capacity();
  e.block_count = (e.first_slot + e.record_count - 1) / b - e.first_slot / b + 1;
  profiles[tx.user_digest] = StoredProfile{owner, content_id, e, std::move(digests)};
  return e;
}

Bytes CloudStorageNode::on_request(const Message& m) {
  AdBlock block = checked_block(m.body);
  const Transaction& req = block.header;
  const Digest32 requester = key_id_of(req.sender_public_key);
  admit(requester, TxType::kRequest, kResourceAds);

  ByteWriter content;
  content.field(req.t_id);
  std::vector<std::pair<const Bytes*, const std::vector<std::uint64_t>*>> hits;
  auto it = profiles.find(req.user_digest);
  if (it != profiles.end() && it->second.owner_key_id == requester) {
    for (const auto& d : it->second.digests) {
      auto slots = index_slots.find(d);
      if (slots != index_slots.end()) hits.emplace_back(&slots->first, &slots->second);
    }
  }
  content.u32(static_cast<std::uint32_t>(hits.size()));
  for (const auto& [digest, slots] : hits) {
    content.field(*digest).u32(static_cast<std::uint32_t>(slots->size()));
    for (auto slot : *slots) {
      auto [d, env] = decode_index_record(arena.record(slot));
      Bytes enc = encode_envelope(env);
      content.field(enc).field(sha256(enc));
    }
  }
  Bytes body = std::move(content).bytes();
  ByteWriter w;
  w.field(body).field(sign(body, key));
  return std::move(w).bytes();
}

void CloudStorageNode::on_monitor(const Message& m) {
  Transaction tx = checked_transaction(m.body);
  if (tx.tx_type != TxType::kMonitor) {
    throw Error(ErrorCode::kInvalidArgument, "not a Monitor transaction");
  }
  admit(key_id_of(tx.sender_public_key), TxType::kMonitor, kResourceTracking);
  monitor_reports.push_back(std::move(tx));
}

// ---- CH ----

ClusterHeadNode::ClusterHeadNode(KeyPair k, const std::vector<Rule>& rules,
                                 std::size_t root_position)
    : key(std::move(k)) {
  if (!rules.empty()) {
    PolicyDocument::Draft d{rules, root_position, 0};
    policy.publish(d);
  }
}

void ClusterHeadNode::screen(const Message& m) {
  if (m.kind == "Request") {
    AdBlock block = checked_block(m.body);
    admit_with(policy, "ch", key_id_of(block.header.sender_public_key), TxType::kRequest,
               kResourceAds);
  } else if (m.kind == "Monitor") {
    Transaction tx = checked_transaction(m.body);
    admit_with(policy, "ch", key_id_of(tx.sender_public_key), TxType::kMonitor,
               kResourceTracking);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "cluster head does not relay " + m.kind);
  }
}

// ---- BS ----

BillingServerNode::BillingServerNode(KeyPair k, Shares shares)
    : key(std::move(k)), ledger(shares) {}

Bytes BillingServerNode::on_billing(const Message& m) {
  Transaction tx = checked_transaction(m.body);
  if (tx.tx_type != TxType::kBilling || !tx.payload) {
    throw Error(ErrorCode::kInvalidArgument, "not a Billing transaction");
  }
  Bytes body = hybrid_decrypt(*tx.payload, key);
  ByteReader r(body);
  const std::string developer = r.field_string();
  const auto kind = static_cast<BillEvent>(r.u8());
  const std::uint32_t n = r.u32();
  std::uint32_t committed = 0, queued = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    LedgerDelta d = ledger.bill({kind, r.u64(), developer});
    (d.committed ? committed : queued)++;
    history.push_back(std::move(d));
  }
  r.expect_done();
  ByteWriter w;
  w.u32(committed).u32(queued);
  return std::move(w).bytes();
}

// ---- Miner ----

MinerNode::MinerNode(std::string n, std::string user, KeyPair k, KeyPair group,
                     PublicKey cs_pub, PublicKey bs_pub, ProfileEngine eng,
                     SeededByteSource rng, MinerConfig cfg)
    : name(std::move(n)),
      user_id(std::move(user)),
      user_digest(identity_digest(user_id)),
      key(std::move(k)),
      group_key(std::move(group)),
      cs_public(std::move(cs_pub)),
      bs_public(std::move(bs_pub)),
      engine(std::move(eng)),
      config(cfg),
      rng_(std::move(rng)) {
  system_app = identity_digest(kSystemAppId);
  TxFields f;
  f.tx_type = TxType::kGenesis;
  f.user_digest = user_digest;
  f.app_digest = system_app;
  Transaction g = make_transaction(f, key, nullptr, rng_, chain);
  chain.add(g);
  heads[system_app] = g.t_id;
  pool.push_back(std::move(g));
}

Digest32 MinerNode::install(const AppRef& a) {
  if (a.app_id.empty()) throw Error(ErrorCode::kInvalidArgument, "empty app id");
  const Digest32 d = identity_digest(a.app_id);
  if (apps.count(d)) return d;
  apps[d] = a;
  TxFields f;
  f.tx_type = TxType::kGenesis;
  f.user_digest = user_digest;
  f.app_digest = d;
  Transaction g = make_transaction(f, key, nullptr, rng_, chain);
  chain.add(g);
  heads[d] = g.t_id;
  pool.push_back(std::move(g));
  return d;
}

const AppRef& MinerNode::app(const Digest32& app_digest) const {
  auto it = apps.find(app_digest);
  if (it == apps.end()) throw Error(ErrorCode::kInvalidArgument, "app is not installed");
  return it->second;
}

void MinerNode::record_usage(const std::string& app_id, std::int64_t duration,
                             std::int64_t now) {
  profile = engine.record_usage(std::move(profile), app(identity_digest(app_id)),
                                duration, now);
}

Transaction MinerNode::append(TxFields f, const PublicKey* recipient) {
  f.user_digest = user_digest;
  if (is_zero(f.prev_t_id)) f.prev_t_id = heads.at(f.app_digest);
  Transaction tx = make_transaction(f, key, recipient, rng_, chain);
  chain.add(tx);
  heads[f.app_digest] = tx.t_id;
  return tx;
}

// ---- flows ----

Extent store_index(ApsNode& aps, CloudStorageNode& cs, Bus& bus, ByteSource& rng,
                   std::size_t max_retries) {
  std::vector<Bytes> records = index_records(aps.index);
  if (records.empty()) throw Error(ErrorCode::kEmptyIndex, "profiling-ads index is empty");
  const PublicKey& aps_pub = aps.key.public_key();

  const Message& req = bus.send(aps.name, cs.name, "StoreRequest",
                                ByteWriter().u64(records.size()).bytes());
  Bytes grant;
  try {
    grant = cs.on_store_request(req, aps_pub, rng);
  } catch (const std::exception& e) {
    refuse(bus, {{cs.name, aps.name}}, "cs", e);
  }
  const Message& g = bus.send(cs.name, aps.name, "StoreGrant", std::move(grant));
  ByteReader gr(g.body);
  const std::uint64_t b = gr.u64();
  auto read_pointer = [&](ByteView env) {
    const Bytes plain = hybrid_decrypt(decode_envelope(env), aps.key);
    ByteReader pr(plain);
    const std::uint64_t p = pr.u64();
    pr.expect_done();
    return p;
  };
  const std::uint64_t first = read_pointer(gr.field());
  gr.expect_done();
  aps.acknowledged_pointer = first;

  const std::uint64_t bfr = blocking_factor(records.size(), b);
  for (std::uint64_t c = 0; c < bfr; ++c) {
    const std::size_t lo = c * b;
    const std::size_t hi = std::min<std::size_t>(records.size(), lo + b);
    std::vector<Bytes> chunk(records.begin() + lo, records.begin() + hi);
    ByteWriter w;
    w.u64(bfr).u64(c).field(chunk_digest(chunk)).u32(static_cast<std::uint32_t>(chunk.size()));
    for (const auto& r : chunk) w.field(r);
    const Bytes body = std::move(w).bytes();

    for (std::size_t attempt = 0;; ++attempt) {
      const Message& msg = bus.send(aps.name, cs.name, "Chunk", body);
      std::optional<Bytes> ack = cs.on_chunk(msg, aps_pub, rng);
      if (ack) {
        const Message& a = bus.send(cs.name, aps.name, "ChunkAck", std::move(*ack));
        ByteReader ar(a.body);
        ar.u64();
        aps.acknowledged_pointer = read_pointer(ar.field());
        break;
      }
      bus.send(cs.name, aps.name, "ChunkReject", ByteWriter().u64(c).bytes());
      if (attempt >= max_retries) {
        throw Error(ErrorCode::kDigestMismatch,
                    "chunk " + std::to_string(c) + " rejected after retries");
      }
    }
  }
  const std::uint64_t last = first + records.size() - 1;
  return Extent{first, records.size(), last / b - first / b + 1};
}

Extent miner_profile_upload(MinerNode& miner, CloudStorageNode& cs, Bus& bus,
                            std::int64_t now) {
  miner.profile = miner.engine.derive(std::move(miner.profile), now);
  Bytes content =
      encode_digest_list(miner.config.scheme, hash_profile(miner.profile, miner.config.scheme));
  const Digest32 content_id = sha256(content);

  TxFields f;
  f.tx_type = miner.uploaded_content ? TxType::kUpdate : TxType::kUpload;
  f.app_digest = miner.system_app;
  f.payload = std::move(content);
  Transaction tx = miner.append(std::move(f), &miner.cs_public);

  const Message& m = bus.send(miner.name, cs.name, std::string(to_string(tx.tx_type)),
                              tx.t_id, canonical_encode(tx));
  Extent e;
  try {
    e = cs.on_upload(m);
  } catch (const std::exception& ex) {
    refuse(bus, {{cs.name, miner.name}}, "cs", ex);
  }
  bus.send(cs.name, miner.name, "UploadAck", encode_extent(e));
  miner.uploaded_content = content_id;
  return e;
}

std::vector<Ad> ads_request(const Digest32& app_digest, MinerNode& miner,
                            ClusterHeadNode& ch, CloudStorageNode& cs, Bus& bus,
                            std::int64_t now) {
  miner.app(app_digest);
  admit_with(miner.policy, "miner", app_digest, TxType::kRequest, kResourceAds);

  const auto session = miner.sessions.touch(miner.user_digest, app_digest, now);
  miner.session_app[session] = app_digest;
  const std::set<std::uint64_t> served = miner.sessions.served(session);

  TxFields f;
  f.tx_type = TxType::kRequest;
  f.app_digest = app_digest;
  f.input.assign(served.begin(), served.end());
  Transaction req = miner.append(std::move(f), nullptr);
  miner.pool.push_front(req);
  AdBlock block = assemble_block(miner.pool, miner.config.block_size_limit,
                                 miner.last_block_hash);
  miner.last_block_hash = block_hash(block);
  miner.blocks.push_back(block);

  const Message& to_ch = bus.send(miner.name, ch.name, "Request", req.t_id,
                                  encode_block(block));
  try {
    ch.screen(to_ch);
  } catch (const std::exception& e) {
    refuse(bus, {{ch.name, miner.name}}, "ch", e);
  }
  const Message& to_cs = bus.send(ch.name, cs.name, "Request", req.t_id, to_ch.body);
  Bytes reply;
  try {
    reply = cs.on_request(to_cs);
  } catch (const std::exception& e) {
    refuse(bus, {{cs.name, ch.name}, {ch.name, miner.name}}, "cs", e);
  }
  const Message& back = bus.send(cs.name, ch.name, "Response", req.t_id, std::move(reply));
  const Message& resp = bus.send(ch.name, miner.name, "Response", req.t_id, back.body);

  ByteReader outer(resp.body);
  ByteView content = outer.field();
  ByteView signature = outer.field();
  outer.expect_done();
  if (!verify_signature(content, signature, miner.cs_public)) {
    throw Error(ErrorCode::kSignatureInvalid, "response is not signed by the store");
  }
  ByteReader r(content);
  if (r.digest_field() != req.t_id) {
    throw Error(ErrorCode::kInvalidArgument, "response answers another request");
  }
  std::map<std::uint64_t, Ad> found;
  const std::uint32_t entries = r.u32();
  for (std::uint32_t i = 0; i < entries; ++i) {
    r.field();
    const std::uint32_t n = r.u32();
    for (std::uint32_t j = 0; j < n; ++j) {
      ByteView enc = r.field();
      if (r.digest_field() != sha256(enc)) {
        throw Error(ErrorCode::kDigestMismatch, "ad envelope digest mismatch");
      }
      Ad ad = decode_ad(hybrid_decrypt(decode_envelope(enc), miner.group_key));
      found.emplace(ad.ad_id, std::move(ad));
    }
  }
  r.expect_done();

  std::vector<Ad> out;
  std::vector<std::uint64_t> ids;
  for (auto& [id, ad] : found) {
    if (served.count(id)) continue;
    ids.push_back(id);
    out.push_back(std::move(ad));
  }
  miner.sessions.mark_served(session, ids);
  auto& batch = miner.presentations[session];
  batch.insert(batch.end(), ids.begin(), ids.end());
  for (auto id : ids) {
    if (miner.tracking.tracks(id)) miner.tracking = update_quota(std::move(miner.tracking), id, now);
  }

  TxFields rf;
  rf.tx_type = TxType::kResponse;
  rf.prev_t_id = req.t_id;
  rf.app_digest = app_digest;
  rf.ad_ids = ids;
  rf.input.assign(served.begin(), served.end());
  rf.output = ids;
  miner.pool.push_back(miner.append(std::move(rf), nullptr));
  return out;
}

namespace {

std::vector<LedgerDelta> send_billing(MinerNode& miner, const Digest32& app_digest,
                                      BillEvent kind, const std::vector<std::uint64_t>& ads,
                                      BillingServerNode& bs, Bus& bus) {
  const AppRef& a = miner.app(app_digest);
  TxFields f;
  f.tx_type = TxType::kBilling;
  f.app_digest = app_digest;
  f.ad_ids = ads;
  f.payload = encode_billing(a.developer_id, kind, ads);
  Transaction tx = miner.append(std::move(f), &miner.bs_public);
  const Message& m =
      bus.send(miner.name, bs.name, "Billing", tx.t_id, canonical_encode(tx));
  const std::size_t before = bs.history.size();
  Bytes ack = bs.on_billing(m);
  bus.send(bs.name, miner.name, "BillingAck", std::move(ack));
  return {bs.history.begin() + static_cast<std::ptrdiff_t>(before), bs.history.end()};
}

SessionFlush flush(const std::vector<SessionRegistry::SessionId>& ids, MinerNode& miner,
                   ClusterHeadNode& ch, CloudStorageNode& cs, BillingServerNode& bs,
                   Bus& bus) {
  SessionFlush out;
  std::set<Digest32> touched;
  for (auto id : ids) {
    auto app_it = miner.session_app.find(id);
    if (app_it == miner.session_app.end()) continue;
    const Digest32 app = app_it->second;
    touched.insert(app);
    auto batch = miner.presentations.find(id);
    if (batch != miner.presentations.end() && !batch->second.empty()) {
      auto d = send_billing(miner, app, BillEvent::kPresentation, batch->second, bs, bus);
      out.deltas.insert(out.deltas.end(), d.begin(), d.end());
    }
    miner.presentations.erase(id);
    miner.session_app.erase(app_it);
  }
  if (miner.tracking.rows().empty()) return out;
  for (const auto& app : touched) {
    TxFields f;
    f.tx_type = TxType::kMonitor;
    f.app_digest = app;
    f.ad_ids = miner.tracking.unfulfilled();
    f.payload = encode_tracking(miner.tracking);
    Transaction tx = miner.append(std::move(f), &miner.cs_public);
    const Message& to_ch =
        bus.send(miner.name, ch.name, "Monitor", tx.t_id, canonical_encode(tx));
    try {
      ch.screen(to_ch);
    } catch (const std::exception& e) {
      refuse(bus, {{ch.name, miner.name}}, "ch", e);
    }
    const Message& to_cs = bus.send(ch.name, cs.name, "Monitor", tx.t_id, to_ch.body);
    try {
      cs.on_monitor(to_cs);
    } catch (const std::exception& e) {
      refuse(bus, {{cs.name, ch.name}, {ch.name, miner.name}}, "cs", e);
    }
    out.monitor_sent = true;
  }
  return out;
}

}  // namespace

LedgerDelta click(const Digest32& app_digest, std::uint64_t ad_id, MinerNode& miner,
                  BillingServerNode& bs, Bus& bus, std::int64_t now) {
  auto session = miner.sessions.live(miner.user_digest, app_digest, now);
  if (!session || miner.sessions.served(*session).count(ad_id) == 0) {
    throw Error(ErrorCode::kUnknownAd,
                "ad " + std::to_string(ad_id) + " was not served in this session");
  }
  miner.sessions.touch(miner.user_digest, app_digest, now);
  return send_billing(miner, app_digest, BillEvent::kClick, {ad_id}, bs, bus).front();
}

SessionFlush close_session(const Digest32& app_digest, MinerNode& miner,
                           ClusterHeadNode& ch, CloudStorageNode& cs,
                           BillingServerNode& bs, Bus& bus, std::int64_t) {
  return flush(miner.sessions.close(miner.user_digest, app_digest), miner, ch, cs, bs, bus);
}

SessionFlush expire_sessions(MinerNode& miner, ClusterHeadNode& ch, CloudStorageNode& cs,
                             BillingServerNode& bs, Bus& bus, std::int64_t now) {
  return flush(miner.sessions.expire_idle(now), miner, ch, cs, bs, bus);
}

}  // namespace adchain
