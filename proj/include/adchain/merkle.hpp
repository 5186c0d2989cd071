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

// Binary SHA-256 Merkle tree over 32-byte leaves.
//
// parent = SHA-256(left || right). A level with an odd node count pairs its
// last node with itself. A single leaf is its own root (no re-hash). Proofs
// always cover the full tree; nothing is pruned.

#pragma once

#include <cstddef>
#include <vector>

#include "adchain/bytes.hpp"

namespace adchain {

enum class SiblingSide : std::uint8_t { kLeft = 0, kRight = 1 };

struct MembershipProof {
  std::size_t leaf_index = 0;
  // Ordered leaf to root. `side` says where the sibling sits relative to
  // the running hash.
  struct Step {
    Digest32 digest;
    SiblingSide side;
  };
  std::vector<Step> siblings;
};

class MerkleTree {
 public:
  // Throws Error(kInvalidArgument) on an empty leaf list.
  static MerkleTree build(std::vector<Digest32> leaves);

  const Digest32& root() const { return levels_.back().front(); }
  std::size_t leaf_count() const { return levels_.front().size(); }
  const std::vector<Digest32>& leaves() const { return levels_.front(); }
  // levels()[0] are the leaves, levels().back() holds only the root.
  const std::vector<std::vector<Digest32>>& levels() const { return levels_; }
  // Number of levels; a tree of height n holds at most 2^(n-1) leaves.
  std::size_t height() const { return levels_.size(); }

  // Throws Error(kIndexOutOfRange).
  MembershipProof prove(std::size_t index) const;

 private:
  std::vector<std::vector<Digest32>> levels_;
};

Digest32 merkle_parent(const Digest32& left, const Digest32& right);

Digest32 merkle_root(const std::vector<Digest32>& leaves);

// Recomputes the root from `leaf` and the proof. Sibling sides must agree
// with the bits of leaf_index, so a perturbed index or side fails as well.
bool verify_membership(const Digest32& root, const Digest32& leaf,
                       const MembershipProof& proof);

}  // namespace adchain
