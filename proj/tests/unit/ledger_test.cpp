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

#include <doctest.h>
#include <openssl/sha.h>

#include <random>
#include <sstream>

#include "adchain/error.hpp"
#include "adchain/ledger.hpp"
#include "adchain/merkle.hpp"

using namespace adchain;

namespace {

Digest32 leaf_of(std::uint32_t i) {
  Digest32 d{};
  std::string s = "leaf-" + std::to_string(i);
  SHA256(reinterpret_cast<const unsigned char*>(s.data()), s.size(), d.data());
  return d;
}

// Independent reference: recursive halving over the padded level.
Digest32 oracle_root(std::vector<Digest32> level) {
  if (level.size() == 1) return level[0];
  if (level.size() % 2) level.push_back(level.back());
  std::vector<Digest32> up;
  for (std::size_t i = 0; i < level.size(); i += 2) {
    unsigned char buf[64];
    std::copy(level[i].begin(), level[i].end(), buf);
    std::copy(level[i + 1].begin(), level[i + 1].end(), buf + 32);
    Digest32 p;
    SHA256(buf, 64, p.data());
    up.push_back(p);
  }
  return oracle_root(up);
}

Digest32 random_digest(std::mt19937_64& g) {
  Digest32 d;
  for (auto& b : d) b = static_cast<std::uint8_t>(g());
  d[0] |= 1;  // never all zero
  return d;
}

std::vector<std::uint64_t> random_ids(std::mt19937_64& g) {
  std::vector<std::uint64_t> v(g() % 6);
  for (auto& x : v) x = g() % 5000;
  return v;
}

Transaction random_tx(std::mt19937_64& g) {
  Transaction tx;
  tx.t_id = random_digest(g);
  if (g() % 4) tx.prev_t_id = random_digest(g);
  tx.tx_type = kAllTxTypes[g() % kAllTxTypes.size()];
  tx.user_digest = random_digest(g);
  tx.app_digest = random_digest(g);
  tx.ad_ids = random_ids(g);
  if (g() % 2) tx.advertiser_id = "adv-" + std::to_string(g() % 100);
  tx.input = random_ids(g);
  tx.output = random_ids(g);
  if (g() % 2) {
    HybridEnvelope env;
    env.wrapped_key = Bytes(g() % 64 + 1, static_cast<std::uint8_t>(g()));
    env.ciphertext = Bytes(g() % 200 + 28, static_cast<std::uint8_t>(g()));
    env.recipient_key_id = random_digest(g);
    tx.payload = env;
  }
  tx.sender_public_key = Bytes(g() % 40 + 1, static_cast<std::uint8_t>(g()));
  tx.signature = Bytes(g() % 80, static_cast<std::uint8_t>(g()));
  return tx;
}

struct Fixture {
  KeyPair miner = generate_keypair(1024, 21);
  KeyPair ch = generate_keypair(1024, 22);
  SeededByteSource rng{5, "ledger-test"};
  Chain chain;
  Digest32 user = sha256(as_bytes("user-1"));
  Digest32 app = sha256(as_bytes("app-1"));

  Transaction next(TxType type, const Digest32& prev,
                   std::optional<Bytes> payload = std::nullopt) {
    TxFields f;
    f.tx_type = type;
    f.prev_t_id = prev;
    f.user_digest = user;
    f.app_digest = app;
    f.ad_ids = {1, 2, 3};
    f.payload = std::move(payload);
    Transaction tx = make_transaction(f, miner, &ch.public_key(), rng, chain);
    chain.add(tx);
    return tx;
  }
};

}  // namespace

TEST_CASE("merkle root equals the pairwise oracle") {
  for (std::uint32_t n = 1; n <= 70; ++n) {
    std::vector<Digest32> leaves;
    for (std::uint32_t i = 0; i < n; ++i) leaves.push_back(leaf_of(i));
    CAPTURE(n);
    CHECK(merkle_root(leaves) == oracle_root(leaves));
  }
}

TEST_CASE("single leaf is its own root") {
  auto tree = MerkleTree::build({leaf_of(0)});
  CHECK(tree.root() == leaf_of(0));
  CHECK(tree.prove(0).siblings.empty());
  CHECK(verify_membership(tree.root(), leaf_of(0), tree.prove(0)));
}

TEST_CASE("eight leaves give three-step proofs") {
  std::vector<Digest32> leaves;
  for (std::uint32_t i = 0; i < 8; ++i) leaves.push_back(leaf_of(i));
  auto tree = MerkleTree::build(leaves);
  CHECK(tree.height() == 4);
  for (std::size_t i = 0; i < 8; ++i) {
    auto p = tree.prove(i);
    CHECK(p.siblings.size() == 3);
    CHECK(verify_membership(tree.root(), leaves[i], p));
  }
}

TEST_CASE("capacity at height n is 2^(n-1)") {
  for (std::size_t n = 1; n <= 9; ++n) {
    std::vector<Digest32> leaves(std::size_t{1} << (n - 1), leaf_of(1));
    CHECK(MerkleTree::build(leaves).height() == n);
    leaves.push_back(leaf_of(2));
    CHECK(MerkleTree::build(leaves).height() == n + 1);
  }
}

TEST_CASE("proofs verify and perturbations fail") {
  std::mt19937_64 g(3);
  for (std::uint32_t n : {1u, 2u, 3u, 5u, 7u, 16u, 33u, 100u}) {
    std::vector<Digest32> leaves;
    for (std::uint32_t i = 0; i < n; ++i) leaves.push_back(leaf_of(i * 7 + n));
    auto tree = MerkleTree::build(leaves);
    for (std::size_t i = 0; i < n; ++i) {
      auto proof = tree.prove(i);
      REQUIRE(verify_membership(tree.root(), leaves[i], proof));
      Digest32 bad_leaf = leaves[i];
      bad_leaf[g() % 32] ^= static_cast<std::uint8_t>(1u << (g() % 8));
      CHECK_FALSE(verify_membership(tree.root(), bad_leaf, proof));
      Digest32 bad_root = tree.root();
      bad_root[g() % 32] ^= 0x10;
      CHECK_FALSE(verify_membership(bad_root, leaves[i], proof));
      if (!proof.siblings.empty()) {
        auto p2 = proof;
        p2.siblings[g() % p2.siblings.size()].digest[g() % 32] ^= 0x01;
        CHECK_FALSE(verify_membership(tree.root(), leaves[i], p2));
        auto p3 = proof;
        auto& side = p3.siblings[g() % p3.siblings.size()].side;
        side = side == SiblingSide::kLeft ? SiblingSide::kRight : SiblingSide::kLeft;
        CHECK_FALSE(verify_membership(tree.root(), leaves[i], p3));
      }
      auto p4 = proof;
      p4.leaf_index ^= std::size_t{1} << (g() % 16);
      CHECK_FALSE(verify_membership(tree.root(), leaves[i], p4));
    }
  }
}

TEST_CASE("prove rejects out of range") {
  auto tree = MerkleTree::build({leaf_of(0), leaf_of(1)});
  CHECK_THROWS_AS(tree.prove(2), Error);
  CHECK_THROWS_AS(MerkleTree::build({}), Error);
}

TEST_CASE("canonical encoding round trips 1000 random transactions") {
  std::mt19937_64 g(42);
  for (int i = 0; i < 1000; ++i) {
    Transaction tx = random_tx(g);
    Bytes enc = canonical_encode(tx);
    CHECK(canonical_encode(tx) == enc);
    CHECK(decode_transaction(enc) == tx);
  }
}

TEST_CASE("encoding is injective over tx_type and optional presence") {
  std::mt19937_64 g(9);
  Transaction tx = random_tx(g);
  tx.advertiser_id.reset();
  std::set<Bytes> seen;
  for (TxType t : kAllTxTypes) {
    tx.tx_type = t;
    seen.insert(canonical_encode(tx));
  }
  CHECK(seen.size() == kAllTxTypes.size());

  Transaction a = tx, b = tx;
  b.advertiser_id = "";
  CHECK(canonical_encode(a) != canonical_encode(b));
  // Moving an id between lists must change the encoding.
  a.ad_ids = {7};
  a.input = {};
  b = a;
  b.ad_ids = {};
  b.input = {7};
  CHECK(canonical_encode(a) != canonical_encode(b));
}

TEST_CASE("missing mandatory fields are rejected") {
  std::mt19937_64 g(1);
  Transaction tx = random_tx(g);
  auto missing = [](Transaction t) {
    try {
      canonical_encode(t);
    } catch (const Error& e) {
      return e.code() == ErrorCode::kMissingField;
    }
    return false;
  };
  Transaction t1 = tx;
  t1.sender_public_key.clear();
  CHECK(missing(t1));
  Transaction t2 = tx;
  t2.user_digest = {};
  CHECK(missing(t2));
  Transaction t3 = tx;
  t3.app_digest = {};
  CHECK(missing(t3));
}

TEST_CASE("decoder rejects garbage") {
  std::mt19937_64 g(2);
  Bytes enc = canonical_encode(random_tx(g));
  CHECK_THROWS_AS(decode_transaction(ByteView(enc).first(enc.size() - 1)), Error);
  Bytes extra = enc;
  extra.push_back(0);
  CHECK_THROWS_AS(decode_transaction(extra), Error);
}

TEST_CASE("genesis and chain walk") {
  Fixture fx;
  Transaction genesis = fx.next(TxType::kGenesis, Digest32{});
  CHECK(is_zero(genesis.prev_t_id));
  CHECK(verify_transaction(genesis));

  Digest32 prev = genesis.t_id;
  for (int i = 0; i < 4; ++i) {
    prev = fx.next(i % 2 ? TxType::kResponse : TxType::kRequest, prev,
                   to_bytes("body " + std::to_string(i)))
               .t_id;
  }
  auto path = fx.chain.walk_to_genesis(prev);
  CHECK(path.size() == 5);  // 4 hops
  CHECK(path.back() == genesis.t_id);
}

TEST_CASE("broken chain references are refused") {
  Fixture fx;
  Digest32 nowhere = sha256(as_bytes("nowhere"));
  TxFields f;
  f.tx_type = TxType::kRequest;
  f.prev_t_id = nowhere;
  f.user_digest = fx.user;
  f.app_digest = fx.app;
  CHECK_THROWS_AS(make_transaction(f, fx.miner, nullptr, fx.rng, fx.chain), Error);
  f.tx_type = TxType::kGenesis;
  CHECK_THROWS_AS(make_transaction(f, fx.miner, nullptr, fx.rng, fx.chain), Error);
}

TEST_CASE("payload is sealed for the recipient") {
  Fixture fx;
  Transaction genesis = fx.next(TxType::kGenesis, Digest32{});
  Transaction req = fx.next(TxType::kRequest, genesis.t_id, to_bytes("secret"));
  REQUIRE(req.payload);
  CHECK(hybrid_decrypt(*req.payload, fx.ch) == to_bytes("secret"));
  CHECK_FALSE(contains_bytes(canonical_encode(req), as_bytes("secret")));
}

TEST_CASE("any single-field mutation breaks t_id binding") {
  Fixture fx;
  Transaction genesis = fx.next(TxType::kGenesis, Digest32{});
  Transaction tx = fx.next(TxType::kRequest, genesis.t_id, to_bytes("payload"));
  REQUIRE(verify_transaction(tx));

  std::vector<std::function<void(Transaction&)>> mutations = {
      [](Transaction& t) { t.prev_t_id[3] ^= 1; },
      [](Transaction& t) { t.tx_type = TxType::kBilling; },
      [](Transaction& t) { t.user_digest[0] ^= 0x80; },
      [](Transaction& t) { t.app_digest[31] ^= 1; },
      [](Transaction& t) { t.ad_ids.push_back(9); },
      [](Transaction& t) { t.advertiser_id = "adv"; },
      [](Transaction& t) { t.input.push_back(1); },
      [](Transaction& t) { t.output.push_back(1); },
      [](Transaction& t) { t.payload->ciphertext[5] ^= 1; },
      [](Transaction& t) { t.payload.reset(); },
      [](Transaction& t) { t.sender_public_key.back() ^= 1; },
  };
  for (std::size_t i = 0; i < mutations.size(); ++i) {
    CAPTURE(i);
    Transaction t = tx;
    mutations[i](t);
    CHECK(compute_t_id(t) != tx.t_id);
    CHECK_FALSE(verify_transaction(t));
    CHECK_THROWS_AS(Chain(fx.chain).add(t), Error);
  }
  Transaction t = tx;
  t.signature[10] ^= 1;
  CHECK_FALSE(verify_transaction(t));
}

TEST_CASE("assemble_block is FIFO and recomputes its root") {
  Fixture fx;
  Transaction genesis = fx.next(TxType::kGenesis, Digest32{});
  std::deque<Transaction> pool;
  Digest32 prev = genesis.t_id;
  for (int i = 0; i < 15; ++i) {
    Transaction tx = fx.next(TxType::kRequest, prev);
    prev = tx.t_id;
    pool.push_back(tx);
  }
  std::deque<Transaction> small(pool.begin(), pool.begin() + 3);
  AdBlock b3 = assemble_block(small, 10, Digest32{});
  CHECK(b3.pending.size() == 3);
  CHECK(small.empty());

  std::vector<Digest32> expected_first;
  for (int i = 0; i < 10; ++i) expected_first.push_back(pool[i].t_id);
  Digest32 fifth_remaining = pool[10].t_id;

  AdBlock b = assemble_block(pool, 10, block_hash(b3));
  CHECK(b.pending.size() == 10);
  CHECK(pool.size() == 5);
  CHECK(pool.front().t_id == fifth_remaining);
  CHECK(b.header == b.pending.front());
  CHECK(b.prev_block_hash == block_hash(b3));
  CHECK(b.merkle_root == oracle_root(expected_first));
  CHECK(verify_block(b));
  CHECK(decode_block(encode_block(b)) == b);

  AdBlock bad = b;
  bad.pending[4].ad_ids.push_back(77);
  CHECK_FALSE(verify_block(bad));
  bad = b;
  bad.block_size_limit = 5;
  CHECK_FALSE(verify_block(bad));

  std::deque<Transaction> empty;
  CHECK_THROWS_AS(assemble_block(empty, 10, Digest32{}), Error);
}

TEST_CASE("dump frames round trip") {
  Fixture fx;
  Transaction genesis = fx.next(TxType::kGenesis, Digest32{});
  std::deque<Transaction> pool{genesis};
  AdBlock block = assemble_block(pool, 4, Digest32{});
  std::stringstream ss;
  write_dump_record(ss, DumpKind::kTransaction, canonical_encode(genesis));
  write_dump_record(ss, DumpKind::kBlock, encode_block(block));
  auto recs = read_dump(ss);
  REQUIRE(recs.size() == 2);
  CHECK(decode_transaction(recs[0].bytes) == genesis);
  CHECK(decode_block(recs[1].bytes) == block);

  std::string json = inspect_json(genesis);
  CHECK(json.find("\"T_ID\":\"" + to_hex(genesis.t_id) + "\"") != std::string::npos);
  CHECK(json.find("\"PT_ID\"") != std::string::npos);
  CHECK(json.find("\"verified\":true") != std::string::npos);

  std::stringstream trunc(ss.str().substr(0, 3));
  CHECK_THROWS_AS(read_dump(trunc), Error);
}

TEST_CASE("sessions close on exit and after 24 idle hours") {
  SessionRegistry reg;
  Digest32 u = sha256(as_bytes("u")), a = sha256(as_bytes("a"));
  auto s1 = reg.touch(u, a, 0);
  CHECK(reg.touch(u, a, 23) == s1);
  reg.mark_served(s1, {1, 2});
  CHECK(reg.served(s1).size() == 2);
  // 24 idle hours after the last touch at 23.
  CHECK(reg.live(u, a, 46) == s1);
  CHECK_FALSE(reg.live(u, a, 47));
  auto closed = reg.expire_idle(47);
  CHECK(closed == std::vector<SessionRegistry::SessionId>{s1});
  auto s2 = reg.touch(u, a, 47);
  CHECK(s2 != s1);
  CHECK(reg.served(s2).empty());
  CHECK(reg.close(u, a) == std::vector<SessionRegistry::SessionId>{s2});
  CHECK_FALSE(reg.is_open(s2));
  CHECK_THROWS_AS(reg.mark_served(s2, {3}), Error);
}
