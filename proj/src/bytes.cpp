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

#include "adchain/bytes.hpp"

#include <algorithm>

#include "adchain/error.hpp"

namespace adchain {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kTaxonomy: return "taxonomy error";
    case ErrorCode::kEmptyProfile: return "empty profile";
    case ErrorCode::kUnsupportedKeySize: return "unsupported key size";
    case ErrorCode::kCrypto: return "crypto failure";
    case ErrorCode::kWrongRecipient: return "wrong recipient";
    case ErrorCode::kKeyUnwrapFailed: return "key unwrap failed";
    case ErrorCode::kAuthenticationFailed: return "authentication failed";
    case ErrorCode::kSignatureInvalid: return "signature invalid";
    case ErrorCode::kMissingField: return "missing field";
    case ErrorCode::kBrokenChain: return "broken chain reference";
    case ErrorCode::kIndexOutOfRange: return "index out of range";
    case ErrorCode::kUnknownCategory: return "unknown category";
    case ErrorCode::kAccessDenied: return "access denied";
    case ErrorCode::kDigestMismatch: return "digest mismatch";
    case ErrorCode::kStorageFull: return "storage full";
    case ErrorCode::kEmptyIndex: return "empty index";
    case ErrorCode::kInsufficientBalance: return "insufficient balance";
    case ErrorCode::kUnknownAd: return "unknown ad";
    case ErrorCode::kDeadlineExceeded: return "deadline exceeded";
    case ErrorCode::kInvariantViolation: return "invariant violation";
  }
  return "unknown";
}

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    throw Error(ErrorCode::kParse, "odd-length hex string");
  }
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) {
      throw Error(ErrorCode::kParse, "invalid hex digit");
    }
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

Digest32 to_digest32(ByteView data) {
  if (data.size() != 32) {
    throw Error(ErrorCode::kParse,
                "expected 32-byte digest, got " + std::to_string(data.size()));
  }
  Digest32 d;
  std::copy(data.begin(), data.end(), d.begin());
  return d;
}

bool contains_bytes(ByteView haystack, ByteView needle) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(),
                     std::boyer_moore_horspool_searcher(needle.begin(),
                                                        needle.end())) !=
         haystack.end();
}

ByteWriter& ByteWriter::u8(std::uint8_t v) {
  out_.push_back(v);
  return *this;
}

ByteWriter& ByteWriter::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
  return *this;
}

ByteWriter& ByteWriter::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
  return *this;
}

ByteWriter& ByteWriter::raw(ByteView data) {
  out_.insert(out_.end(), data.begin(), data.end());
  return *this;
}

ByteWriter& ByteWriter::field(ByteView data) {
  if (data.size() > 0xffffffffu) {
    throw Error(ErrorCode::kInvalidArgument, "field exceeds 4 GiB");
  }
  u32(static_cast<std::uint32_t>(data.size()));
  return raw(data);
}

std::uint8_t ByteReader::u8() { return raw(1)[0]; }

std::uint32_t ByteReader::u32() {
  auto b = raw(4);
  std::uint32_t v = 0;
  for (auto x : b) v = v << 8 | x;
  return v;
}

std::uint64_t ByteReader::u64() {
  auto b = raw(8);
  std::uint64_t v = 0;
  for (auto x : b) v = v << 8 | x;
  return v;
}

ByteView ByteReader::raw(std::size_t n) {
  if (remaining() < n) {
    throw Error(ErrorCode::kParse, "truncated input");
  }
  auto out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

ByteView ByteReader::field() { return raw(u32()); }

std::string ByteReader::field_string() {
  auto f = field();
  return std::string(f.begin(), f.end());
}

Digest32 ByteReader::digest_field() { return to_digest32(field()); }

void ByteReader::expect_done() const {
  if (!done()) {
    throw Error(ErrorCode::kParse, "trailing bytes after record");
  }
}

}  // namespace adchain
