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

// Asymmetric keys, digests, hybrid envelopes and signed messages.
//
// Keys are RSA. Public keys travel as DER SubjectPublicKeyInfo, private keys
// as DER PKCS#8. A hybrid envelope wraps a fresh AES-GCM key with RSA-OAEP:
//
//   modulus >= 1024 bits: OAEP(SHA-256, MGF1-SHA-256), AES-256-GCM
//   modulus == 512 bits:  OAEP(SHA-1,   MGF1-SHA-1),   AES-128-GCM
//
// (a 64-byte modulus cannot carry OAEP-SHA-256 at all). The GCM layer
// authenticates the recipient key id as associated data. Signatures are
// RSASSA-PKCS1-v1_5 over SHA-256, which is deterministic.

#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "adchain/bytes.hpp"
#include "adchain/random.hpp"

namespace adchain {

enum class DigestScheme { kSha1, kSha224, kSha256, kSha384, kSha512 };

inline constexpr std::array<DigestScheme, 5> kAllDigestSchemes = {
    DigestScheme::kSha1, DigestScheme::kSha224, DigestScheme::kSha256,
    DigestScheme::kSha384, DigestScheme::kSha512};

std::size_t digest_length(DigestScheme scheme);
std::string_view to_string(DigestScheme scheme);
DigestScheme parse_digest_scheme(std::string_view name);

Bytes digest(ByteView data, DigestScheme scheme);
Digest32 sha256(ByteView data);

inline constexpr std::array<int, 5> kSupportedModulusBits = {512, 1024, 2048,
                                                             4096, 8192};
bool is_supported_modulus(int bits);

// Owning handle to an OpenSSL EVP_PKEY.
using EvpKeyHandle = std::shared_ptr<void>;

class PublicKey {
 public:
  static PublicKey from_der(ByteView der);

  const Bytes& der() const { return der_; }
  int modulus_bits() const { return bits_; }
  // SHA-256 of the DER encoding.
  const Digest32& key_id() const { return key_id_; }
  void* evp() const { return handle_.get(); }

  friend bool operator==(const PublicKey& a, const PublicKey& b) {
    return a.der_ == b.der_;
  }

 private:
  PublicKey() = default;
  friend class KeyPair;

  Bytes der_;
  int bits_ = 0;
  Digest32 key_id_{};
  EvpKeyHandle handle_;
};

class KeyPair {
 public:
  // Loads a PKCS#8 private key and derives the public half.
  static KeyPair from_private_der(ByteView der);

  const PublicKey& public_key() const { return public_; }
  const Bytes& private_key() const { return private_der_; }
  int modulus_bits() const { return public_.modulus_bits(); }
  void* evp() const { return handle_.get(); }

 private:
  KeyPair() = default;
  friend KeyPair wrap_generated_key(void* pkey);

  PublicKey public_;
  Bytes private_der_;
  EvpKeyHandle handle_;
};

// Without a seed, keys come from OpenSSL's native generator. With a seed,
// primes are searched from a SeededByteSource stream so the same seed always
// yields the same key (tests and reproducible simulations only).
KeyPair generate_keypair(int modulus_bits,
                         std::optional<std::uint64_t> rng_seed = std::nullopt);

struct HybridEnvelope {
  Bytes wrapped_key;
  // 12-byte IV || AES-GCM ciphertext || 16-byte tag.
  Bytes ciphertext;
  Digest32 recipient_key_id{};

  friend bool operator==(const HybridEnvelope&,
                         const HybridEnvelope&) = default;
};

Bytes encode_envelope(const HybridEnvelope& env);
HybridEnvelope decode_envelope(ByteView data);

// `rng` supplies the content key, IV and OAEP seed.
HybridEnvelope hybrid_encrypt(ByteView payload, const PublicKey& recipient,
                              ByteSource& rng);
HybridEnvelope hybrid_encrypt(ByteView payload, const PublicKey& recipient);

// Throws Error with kWrongRecipient (key id differs), kKeyUnwrapFailed (OAEP
// rejected the wrapped key) or kAuthenticationFailed (GCM tag mismatch).
Bytes hybrid_decrypt(const HybridEnvelope& env, const KeyPair& recipient);

Bytes sign(ByteView message, const KeyPair& signer);
bool verify_signature(ByteView message, ByteView signature,
                      const PublicKey& signer);

struct SignedMessage {
  HybridEnvelope payload_ciphertext;
  Bytes signature;
  Bytes sender_public_key;
};

SignedMessage sign_and_seal(ByteView payload, const KeyPair& sender,
                            const PublicKey& recipient, ByteSource& rng);

// Decrypts and checks the sender's signature over the recovered payload.
// Throws kSignatureInvalid when it does not verify.
Bytes open_and_verify(const SignedMessage& msg, const KeyPair& recipient);

// EME-OAEP encoding (RFC 8017) with a caller-supplied seed. Exposed so tests
// can check it against OpenSSL's decoder.
Bytes oaep_encode(ByteView message, std::size_t modulus_bytes,
                  DigestScheme hash, ByteView seed);

}  // namespace adchain
