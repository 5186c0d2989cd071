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

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

#include "adchain/bytes.hpp"

namespace adchain {

// Source of random bytes for key material, nonces and padding seeds.
// Also models UniformRandomBitGenerator so it can drive <random>.
class ByteSource {
 public:
  using result_type = std::uint64_t;

  virtual ~ByteSource() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  Bytes bytes(std::size_t n) {
    Bytes b(n);
    fill(b);
    return b;
  }

  result_type operator()() {
    std::uint8_t buf[8];
    fill(buf);
    result_type v = 0;
    for (auto b : buf) v = v << 8 | b;
    return v;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
};

// Operating-system CSPRNG (OpenSSL RAND_bytes).
class SystemByteSource final : public ByteSource {
 public:
  void fill(std::span<std::uint8_t> out) override;
};

// AES-256-CTR keystream keyed by SHA-256 of a seed and a label. Two sources
// built from the same (seed, label) emit identical streams; used wherever a
// run must be reproducible.
class SeededByteSource final : public ByteSource {
 public:
  explicit SeededByteSource(std::uint64_t seed, std::string_view label = {});
  ~SeededByteSource() override;

  SeededByteSource(SeededByteSource&& other) noexcept;
  SeededByteSource& operator=(SeededByteSource&& other) noexcept;
  SeededByteSource(const SeededByteSource&) = delete;
  SeededByteSource& operator=(const SeededByteSource&) = delete;

  void fill(std::span<std::uint8_t> out) override;

  // Independent child stream; does not advance this one.
  SeededByteSource fork(std::string_view label) const;

 private:
  explicit SeededByteSource(const Digest32& key);

  Digest32 key_;
  void* ctx_ = nullptr;  // EVP_CIPHER_CTX
};

}  // namespace adchain
