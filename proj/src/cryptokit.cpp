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

#include "adchain/cryptokit.hpp"

#include <openssl/bn.h>
#include <openssl/core_names.h>
#include <openssl/err.h>
#include <openssl/evp.h>
#include <openssl/param_build.h>
#include <openssl/rand.h>
#include <openssl/rsa.h>
#include <openssl/x509.h>

#include <algorithm>
#include <memory>

#include "adchain/error.hpp"

namespace adchain {
namespace {

[[noreturn]] void crypto_fail(std::string_view what,
                              ErrorCode code = ErrorCode::kCrypto) {
  unsigned long e = ERR_get_error();
  std::string msg(what);
  if (e != 0) {
    char buf[256];
    ERR_error_string_n(e, buf, sizeof buf);
    msg += ": ";
    msg += buf;
  }
  ERR_clear_error();
  throw Error(code, msg);
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};

using BnPtr = std::unique_ptr<BIGNUM, Deleter<BIGNUM, BN_free>>;
using BnCtxPtr = std::unique_ptr<BN_CTX, Deleter<BN_CTX, BN_CTX_free>>;
using PkeyCtxPtr =
    std::unique_ptr<EVP_PKEY_CTX, Deleter<EVP_PKEY_CTX, EVP_PKEY_CTX_free>>;
using CipherCtxPtr =
    std::unique_ptr<EVP_CIPHER_CTX, Deleter<EVP_CIPHER_CTX, EVP_CIPHER_CTX_free>>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, Deleter<EVP_MD_CTX, EVP_MD_CTX_free>>;
using ParamBldPtr =
    std::unique_ptr<OSSL_PARAM_BLD, Deleter<OSSL_PARAM_BLD, OSSL_PARAM_BLD_free>>;
using ParamPtr = std::unique_ptr<OSSL_PARAM, Deleter<OSSL_PARAM, OSSL_PARAM_free>>;
using Pkcs8Ptr = std::unique_ptr<PKCS8_PRIV_KEY_INFO,
                                 Deleter<PKCS8_PRIV_KEY_INFO,
                                         PKCS8_PRIV_KEY_INFO_free>>;

EvpKeyHandle own(EVP_PKEY* key) {
  return EvpKeyHandle(key, [](void* p) { EVP_PKEY_free(static_cast<EVP_PKEY*>(p)); });
}

const EVP_MD* md_for(DigestScheme scheme) {
  switch (scheme) {
    case DigestScheme::kSha1: return EVP_sha1();
    case DigestScheme::kSha224: return EVP_sha224();
    case DigestScheme::kSha256: return EVP_sha256();
    case DigestScheme::kSha384: return EVP_sha384();
    case DigestScheme::kSha512: return EVP_sha512();
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown digest scheme");
}

struct WrapParams {
  DigestScheme oaep_hash;
  std::size_t content_key_bytes;
  const EVP_CIPHER* cipher;
};

WrapParams wrap_params(int modulus_bits) {
  if (modulus_bits < 1024) {
    return {DigestScheme::kSha1, 16, EVP_aes_128_gcm()};
  }
  return {DigestScheme::kSha256, 32, EVP_aes_256_gcm()};
}

constexpr std::size_t kIvBytes = 12;
constexpr std::size_t kTagBytes = 16;

Bytes public_der(EVP_PKEY* key) {
  int len = i2d_PUBKEY(key, nullptr);
  if (len <= 0) crypto_fail("i2d_PUBKEY");
  Bytes out(static_cast<std::size_t>(len));
  unsigned char* p = out.data();
  i2d_PUBKEY(key, &p);
  return out;
}

Bytes private_der(EVP_PKEY* key) {
  Pkcs8Ptr info(EVP_PKEY2PKCS8(key));
  if (!info) crypto_fail("EVP_PKEY2PKCS8");
  int len = i2d_PKCS8_PRIV_KEY_INFO(info.get(), nullptr);
  if (len <= 0) crypto_fail("i2d_PKCS8_PRIV_KEY_INFO");
  Bytes out(static_cast<std::size_t>(len));
  unsigned char* p = out.data();
  i2d_PKCS8_PRIV_KEY_INFO(info.get(), &p);
  return out;
}

BnPtr random_prime(int bits, ByteSource& rng, const BIGNUM* e, BN_CTX* ctx) {
  const std::size_t nbytes = static_cast<std::size_t>((bits + 7) / 8);
  Bytes buf = rng.bytes(nbytes);
  BnPtr p(BN_bin2bn(buf.data(), static_cast<int>(buf.size()), nullptr));
  if (!p) crypto_fail("BN_bin2bn");
  BN_mask_bits(p.get(), bits);
  BN_set_bit(p.get(), bits - 1);
  BN_set_bit(p.get(), bits - 2);
  BN_set_bit(p.get(), 0);

  BnPtr pm1(BN_new());
  BnPtr g(BN_new());
  for (;;) {
    if (BN_num_bits(p.get()) != bits) {
      // Walked off the top; restart from fresh randomness.
      return random_prime(bits, rng, e, ctx);
    }
    BN_copy(pm1.get(), p.get());
    BN_sub_word(pm1.get(), 1);
    BN_gcd(g.get(), pm1.get(), e, ctx);
    if (BN_is_one(g.get())) {
      int r = BN_check_prime(p.get(), ctx, nullptr);
      if (r < 0) crypto_fail("BN_check_prime");
      if (r == 1) return p;
    }
    BN_add_word(p.get(), 2);
  }
}

EVP_PKEY* seeded_rsa(int bits, std::uint64_t seed) {
  SeededByteSource rng(seed, "rsa-keygen/" + std::to_string(bits));
  BnCtxPtr ctx(BN_CTX_new());
  BnPtr e(BN_new());
  BN_set_word(e.get(), RSA_F4);

  const int pbits = bits - bits / 2;
  const int qbits = bits / 2;
  for (;;) {
    BnPtr p = random_prime(pbits, rng, e.get(), ctx.get());
    BnPtr q = random_prime(qbits, rng, e.get(), ctx.get());
    if (BN_cmp(p.get(), q.get()) == 0) continue;
    if (BN_cmp(p.get(), q.get()) < 0) std::swap(p, q);

    BnPtr n(BN_new());
    BN_mul(n.get(), p.get(), q.get(), ctx.get());
    if (BN_num_bits(n.get()) != bits) continue;

    BnPtr pm1(BN_dup(p.get()));
    BnPtr qm1(BN_dup(q.get()));
    BN_sub_word(pm1.get(), 1);
    BN_sub_word(qm1.get(), 1);
    BnPtr g(BN_new());
    BN_gcd(g.get(), pm1.get(), qm1.get(), ctx.get());
    BnPtr lambda(BN_new());
    BnPtr rem(BN_new());
    BnPtr prod(BN_new());
    BN_mul(prod.get(), pm1.get(), qm1.get(), ctx.get());
    BN_div(lambda.get(), rem.get(), prod.get(), g.get(), ctx.get());

    BnPtr d(BN_mod_inverse(nullptr, e.get(), lambda.get(), ctx.get()));
    if (!d) continue;
    BnPtr dp(BN_new());
    BnPtr dq(BN_new());
    BN_mod(dp.get(), d.get(), pm1.get(), ctx.get());
    BN_mod(dq.get(), d.get(), qm1.get(), ctx.get());
    BnPtr qinv(BN_mod_inverse(nullptr, q.get(), p.get(), ctx.get()));
    if (!qinv) continue;

    ParamBldPtr bld(OSSL_PARAM_BLD_new());
    OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_RSA_N, n.get());
    OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_RSA_E, e.get());
    OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_RSA_D, d.get());
    OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_RSA_FACTOR1, p.get());
    OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_RSA_FACTOR2, q.get());
    OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_RSA_EXPONENT1, dp.get());
    OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_RSA_EXPONENT2, dq.get());
    OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_RSA_COEFFICIENT1,
                           qinv.get());
    ParamPtr params(OSSL_PARAM_BLD_to_param(bld.get()));
    if (!params) crypto_fail("OSSL_PARAM_BLD_to_param");

    PkeyCtxPtr pctx(EVP_PKEY_CTX_new_from_name(nullptr, "RSA", nullptr));
    EVP_PKEY* key = nullptr;
    if (!pctx || EVP_PKEY_fromdata_init(pctx.get()) <= 0 ||
        EVP_PKEY_fromdata(pctx.get(), &key, EVP_PKEY_KEYPAIR, params.get()) <=
            0) {
      crypto_fail("EVP_PKEY_fromdata");
    }
    return key;
  }
}

EVP_PKEY* native_rsa(int bits) {
  PkeyCtxPtr ctx(EVP_PKEY_CTX_new_id(EVP_PKEY_RSA, nullptr));
  EVP_PKEY* key = nullptr;
  if (!ctx || EVP_PKEY_keygen_init(ctx.get()) <= 0 ||
      EVP_PKEY_CTX_set_rsa_keygen_bits(ctx.get(), bits) <= 0 ||
      EVP_PKEY_keygen(ctx.get(), &key) <= 0) {
    crypto_fail("RSA key generation");
  }
  return key;
}

Bytes mgf1(ByteView seed, std::size_t length, DigestScheme hash) {
  Bytes out;
  out.reserve(length + digest_length(hash));
  for (std::uint32_t counter = 0; out.size() < length; ++counter) {
    ByteWriter w;
    w.raw(seed).u32(counter);
    Bytes block = digest(w.bytes(), hash);
    out.insert(out.end(), block.begin(), block.end());
  }
  out.resize(length);
  return out;
}

Bytes aes_gcm_encrypt(const EVP_CIPHER* cipher, ByteView key, ByteView iv,
                      ByteView aad, ByteView plaintext) {
  CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
  int len = 0;
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), cipher, nullptr, nullptr, nullptr) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN,
                          static_cast<int>(iv.size()), nullptr) != 1 ||
      EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), iv.data()) != 1 ||
      EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(),
                        static_cast<int>(aad.size())) != 1) {
    crypto_fail("AES-GCM encrypt init");
  }
  Bytes out;
  out.reserve(iv.size() + plaintext.size() + kTagBytes);
  out.insert(out.end(), iv.begin(), iv.end());
  out.resize(iv.size() + plaintext.size());
  if (EVP_EncryptUpdate(ctx.get(), out.data() + iv.size(), &len,
                        plaintext.data(),
                        static_cast<int>(plaintext.size())) != 1) {
    crypto_fail("AES-GCM encrypt");
  }
  int fin = 0;
  if (EVP_EncryptFinal_ex(ctx.get(), out.data() + iv.size() + len, &fin) != 1) {
    crypto_fail("AES-GCM final");
  }
  std::uint8_t tag[kTagBytes];
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagBytes, tag) != 1) {
    crypto_fail("AES-GCM tag");
  }
  out.insert(out.end(), tag, tag + kTagBytes);
  return out;
}

Bytes aes_gcm_decrypt(const EVP_CIPHER* cipher, ByteView key, ByteView aad,
                      ByteView sealed) {
  if (sealed.size() < kIvBytes + kTagBytes) {
    throw Error(ErrorCode::kAuthenticationFailed, "ciphertext too short");
  }
  auto iv = sealed.first(kIvBytes);
  auto body = sealed.subspan(kIvBytes, sealed.size() - kIvBytes - kTagBytes);
  auto tag = sealed.last(kTagBytes);

  CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
  int len = 0;
  if (!ctx || EVP_DecryptInit_ex(ctx.get(), cipher, nullptr, nullptr, nullptr) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kIvBytes, nullptr) != 1 ||
      EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), iv.data()) != 1 ||
      EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(),
                        static_cast<int>(aad.size())) != 1) {
    crypto_fail("AES-GCM decrypt init");
  }
  Bytes out(body.size());
  if (EVP_DecryptUpdate(ctx.get(), out.data(), &len, body.data(),
                        static_cast<int>(body.size())) != 1) {
    crypto_fail("AES-GCM decrypt");
  }
  Bytes tag_copy(tag.begin(), tag.end());
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagBytes,
                          tag_copy.data()) != 1) {
    crypto_fail("AES-GCM set tag");
  }
  int fin = 0;
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + len, &fin) != 1) {
    ERR_clear_error();
    throw Error(ErrorCode::kAuthenticationFailed,
                "envelope failed authentication");
  }
  return out;
}

}  // namespace

std::size_t digest_length(DigestScheme scheme) {
  switch (scheme) {
    case DigestScheme::kSha1: return 20;
    case DigestScheme::kSha224: return 28;
    case DigestScheme::kSha256: return 32;
    case DigestScheme::kSha384: return 48;
    case DigestScheme::kSha512: return 64;
  }
  return 0;
}

std::string_view to_string(DigestScheme scheme) {
  switch (scheme) {
    case DigestScheme::kSha1: return "SHA-1";
    case DigestScheme::kSha224: return "SHA-224";
    case DigestScheme::kSha256: return "SHA-256";
    case DigestScheme::kSha384: return "SHA-384";
    case DigestScheme::kSha512: return "SHA-512";
  }
  return "?";
}

DigestScheme parse_digest_scheme(std::string_view name) {
  std::string n;
  for (char c : name) {
    if (c != '-' && c != '_') n.push_back(static_cast<char>(std::tolower(c)));
  }
  if (n == "sha1") return DigestScheme::kSha1;
  if (n == "sha224") return DigestScheme::kSha224;
  if (n == "sha256") return DigestScheme::kSha256;
  if (n == "sha384") return DigestScheme::kSha384;
  if (n == "sha512") return DigestScheme::kSha512;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown digest scheme '" + std::string(name) + "'");
}

Bytes digest(ByteView data, DigestScheme scheme) {
  Bytes out(EVP_MAX_MD_SIZE);
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, md_for(scheme),
                 nullptr) != 1) {
    crypto_fail("EVP_Digest");
  }
  out.resize(len);
  return out;
}

Digest32 sha256(ByteView data) {
  Digest32 out;
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(),
                 nullptr) != 1) {
    crypto_fail("EVP_Digest");
  }
  return out;
}

bool is_supported_modulus(int bits) {
  return std::find(kSupportedModulusBits.begin(), kSupportedModulusBits.end(),
                   bits) != kSupportedModulusBits.end();
}

PublicKey PublicKey::from_der(ByteView der) {
  const unsigned char* p = der.data();
  EVP_PKEY* key = d2i_PUBKEY(nullptr, &p, static_cast<long>(der.size()));
  if (key == nullptr) crypto_fail("invalid public key encoding", ErrorCode::kParse);
  PublicKey pk;
  pk.handle_ = own(key);
  pk.der_.assign(der.begin(), der.end());
  pk.bits_ = EVP_PKEY_get_bits(key);
  pk.key_id_ = sha256(pk.der_);
  return pk;
}

KeyPair wrap_generated_key(void* raw) {
  auto* key = static_cast<EVP_PKEY*>(raw);
  KeyPair kp;
  kp.handle_ = own(key);
  kp.private_der_ = private_der(key);
  kp.public_ = PublicKey::from_der(public_der(key));
  return kp;
}

KeyPair KeyPair::from_private_der(ByteView der) {
  const unsigned char* p = der.data();
  Pkcs8Ptr info(d2i_PKCS8_PRIV_KEY_INFO(nullptr, &p, static_cast<long>(der.size())));
  if (!info) crypto_fail("invalid private key encoding", ErrorCode::kParse);
  EVP_PKEY* key = EVP_PKCS82PKEY(info.get());
  if (key == nullptr) crypto_fail("EVP_PKCS82PKEY", ErrorCode::kParse);
  return wrap_generated_key(key);
}

KeyPair generate_keypair(int modulus_bits, std::optional<std::uint64_t> rng_seed) {
  if (!is_supported_modulus(modulus_bits)) {
    throw Error(ErrorCode::kUnsupportedKeySize,
                "unsupported modulus size " + std::to_string(modulus_bits));
  }
  EVP_PKEY* key = rng_seed ? seeded_rsa(modulus_bits, *rng_seed)
                           : native_rsa(modulus_bits);
  return wrap_generated_key(key);
}

Bytes encode_envelope(const HybridEnvelope& env) {
  ByteWriter w;
  w.field(env.wrapped_key).field(env.ciphertext).field(env.recipient_key_id);
  return std::move(w).bytes();
}

HybridEnvelope decode_envelope(ByteView data) {
  ByteReader r(data);
  HybridEnvelope env;
  auto wk = r.field();
  env.wrapped_key.assign(wk.begin(), wk.end());
  auto ct = r.field();
  env.ciphertext.assign(ct.begin(), ct.end());
  env.recipient_key_id = r.digest_field();
  r.expect_done();
  return env;
}

Bytes oaep_encode(ByteView message, std::size_t k, DigestScheme hash,
                  ByteView seed) {
  const std::size_t hlen = digest_length(hash);
  if (seed.size() != hlen) {
    throw Error(ErrorCode::kInvalidArgument, "OAEP seed must be hLen bytes");
  }
  if (k < 2 * hlen + 2 || message.size() > k - 2 * hlen - 2) {
    throw Error(ErrorCode::kInvalidArgument, "message too long for OAEP");
  }
  Bytes db = digest({}, hash);  // lHash of the empty label
  db.resize(k - message.size() - hlen - 2, 0);
  db.push_back(0x01);
  db.insert(db.end(), message.begin(), message.end());

  Bytes db_mask = mgf1(seed, db.size(), hash);
  for (std::size_t i = 0; i < db.size(); ++i) db[i] ^= db_mask[i];
  Bytes seed_mask = mgf1(db, hlen, hash);

  Bytes em;
  em.reserve(k);
  em.push_back(0x00);
  for (std::size_t i = 0; i < hlen; ++i) em.push_back(seed[i] ^ seed_mask[i]);
  em.insert(em.end(), db.begin(), db.end());
  return em;
}

HybridEnvelope hybrid_encrypt(ByteView payload, const PublicKey& recipient,
                              ByteSource& rng) {
  if (payload.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty payload");
  }
  const WrapParams wp = wrap_params(recipient.modulus_bits());
  const std::size_t k = static_cast<std::size_t>(recipient.modulus_bits() + 7) / 8;

  Bytes content_key = rng.bytes(wp.content_key_bytes);
  Bytes iv = rng.bytes(kIvBytes);
  Bytes seed = rng.bytes(digest_length(wp.oaep_hash));

  HybridEnvelope env;
  env.recipient_key_id = recipient.key_id();
  env.ciphertext = aes_gcm_encrypt(wp.cipher, content_key, iv,
                                   env.recipient_key_id, payload);

  Bytes em = oaep_encode(content_key, k, wp.oaep_hash, seed);
  PkeyCtxPtr ctx(EVP_PKEY_CTX_new(static_cast<EVP_PKEY*>(recipient.evp()), nullptr));
  std::size_t outlen = 0;
  if (!ctx || EVP_PKEY_encrypt_init(ctx.get()) <= 0 ||
      EVP_PKEY_CTX_set_rsa_padding(ctx.get(), RSA_NO_PADDING) <= 0 ||
      EVP_PKEY_encrypt(ctx.get(), nullptr, &outlen, em.data(), em.size()) <= 0) {
    crypto_fail("RSA encrypt init");
  }
  env.wrapped_key.resize(outlen);
  if (EVP_PKEY_encrypt(ctx.get(), env.wrapped_key.data(), &outlen, em.data(),
                       em.size()) <= 0) {
    crypto_fail("RSA encrypt");
  }
  env.wrapped_key.resize(outlen);
  return env;
}

HybridEnvelope hybrid_encrypt(ByteView payload, const PublicKey& recipient) {
  SystemByteSource rng;
  return hybrid_encrypt(payload, recipient, rng);
}

Bytes hybrid_decrypt(const HybridEnvelope& env, const KeyPair& recipient) {
  if (env.recipient_key_id != recipient.public_key().key_id()) {
    throw Error(ErrorCode::kWrongRecipient,
                "envelope is addressed to a different key");
  }
  const WrapParams wp = wrap_params(recipient.modulus_bits());
  PkeyCtxPtr ctx(EVP_PKEY_CTX_new(static_cast<EVP_PKEY*>(recipient.evp()), nullptr));
  const EVP_MD* md = md_for(wp.oaep_hash);
  if (!ctx || EVP_PKEY_decrypt_init(ctx.get()) <= 0 ||
      EVP_PKEY_CTX_set_rsa_padding(ctx.get(), RSA_PKCS1_OAEP_PADDING) <= 0 ||
      EVP_PKEY_CTX_set_rsa_oaep_md(ctx.get(), md) <= 0 ||
      EVP_PKEY_CTX_set_rsa_mgf1_md(ctx.get(), md) <= 0) {
    crypto_fail("RSA decrypt init");
  }
  Bytes content_key(env.wrapped_key.size());
  std::size_t outlen = content_key.size();
  if (EVP_PKEY_decrypt(ctx.get(), content_key.data(), &outlen,
                       env.wrapped_key.data(), env.wrapped_key.size()) <= 0 ||
      outlen != wp.content_key_bytes) {
    ERR_clear_error();
    throw Error(ErrorCode::kKeyUnwrapFailed, "wrapped key did not decrypt");
  }
  content_key.resize(outlen);
  return aes_gcm_decrypt(wp.cipher, content_key, env.recipient_key_id,
                         env.ciphertext);
}

Bytes sign(ByteView message, const KeyPair& signer) {
  MdCtxPtr ctx(EVP_MD_CTX_new());
  std::size_t len = 0;
  if (!ctx ||
      EVP_DigestSignInit(ctx.get(), nullptr, EVP_sha256(), nullptr,
                         static_cast<EVP_PKEY*>(signer.evp())) != 1 ||
      EVP_DigestSign(ctx.get(), nullptr, &len, message.data(), message.size()) != 1) {
    crypto_fail("sign init");
  }
  Bytes sig(len);
  if (EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(),
                     message.size()) != 1) {
    crypto_fail("sign");
  }
  sig.resize(len);
  return sig;
}

bool verify_signature(ByteView message, ByteView signature,
                      const PublicKey& signer) {
  MdCtxPtr ctx(EVP_MD_CTX_new());
  if (!ctx || EVP_DigestVerifyInit(ctx.get(), nullptr, EVP_sha256(), nullptr,
                                   static_cast<EVP_PKEY*>(signer.evp())) != 1) {
    crypto_fail("verify init");
  }
  int r = EVP_DigestVerify(ctx.get(), signature.data(), signature.size(),
                           message.data(), message.size());
  ERR_clear_error();
  return r == 1;
}

SignedMessage sign_and_seal(ByteView payload, const KeyPair& sender,
                            const PublicKey& recipient, ByteSource& rng) {
  SignedMessage msg;
  msg.payload_ciphertext = hybrid_encrypt(payload, recipient, rng);
  msg.signature = sign(payload, sender);
  msg.sender_public_key = sender.public_key().der();
  return msg;
}

Bytes open_and_verify(const SignedMessage& msg, const KeyPair& recipient) {
  Bytes payload = hybrid_decrypt(msg.payload_ciphertext, recipient);
  PublicKey sender = PublicKey::from_der(msg.sender_public_key);
  if (!verify_signature(payload, msg.signature, sender)) {
    throw Error(ErrorCode::kSignatureInvalid,
                "signature does not match the recovered payload");
  }
  return payload;
}

// SeededByteSource -----------------------------------------------------------

SeededByteSource::SeededByteSource(std::uint64_t seed, std::string_view label)
    : SeededByteSource([&] {
        ByteWriter w;
        w.field(std::string_view("adchain/drbg")).u64(seed).field(label);
        return sha256(w.bytes());
      }()) {}

SeededByteSource::SeededByteSource(const Digest32& key) : key_(key) {
  auto* ctx = EVP_CIPHER_CTX_new();
  std::uint8_t iv[16] = {};
  if (ctx == nullptr ||
      EVP_EncryptInit_ex(ctx, EVP_aes_256_ctr(), nullptr, key_.data(), iv) != 1) {
    EVP_CIPHER_CTX_free(ctx);
    crypto_fail("AES-CTR init");
  }
  ctx_ = ctx;
}

SeededByteSource::~SeededByteSource() {
  EVP_CIPHER_CTX_free(static_cast<EVP_CIPHER_CTX*>(ctx_));
}

SeededByteSource::SeededByteSource(SeededByteSource&& other) noexcept
    : key_(other.key_), ctx_(std::exchange(other.ctx_, nullptr)) {}

SeededByteSource& SeededByteSource::operator=(SeededByteSource&& other) noexcept {
  if (this != &other) {
    EVP_CIPHER_CTX_free(static_cast<EVP_CIPHER_CTX*>(ctx_));
    key_ = other.key_;
    ctx_ = std::exchange(other.ctx_, nullptr);
  }
  return *this;
}

void SeededByteSource::fill(std::span<std::uint8_t> out) {
  std::fill(out.begin(), out.end(), 0);
  int len = 0;
  if (EVP_EncryptUpdate(static_cast<EVP_CIPHER_CTX*>(ctx_), out.data(), &len,
                        out.data(), static_cast<int>(out.size())) != 1) {
    crypto_fail("AES-CTR");
  }
}

SeededByteSource SeededByteSource::fork(std::string_view label) const {
  ByteWriter w;
  w.raw(key_).field(label);
  return SeededByteSource(sha256(w.bytes()));
}

void SystemByteSource::fill(std::span<std::uint8_t> out) {
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    crypto_fail("RAND_bytes");
  }
}

}  // namespace adchain
