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

#include "adchain/merkle.hpp"

#include <openssl/sha.h>

#include "adchain/error.hpp"

namespace adchain {

Digest32 merkle_parent(const Digest32& left, const Digest32& right) {
  std::uint8_t buf[64];
  std::memcpy(buf, left.data(), 32);
  std::memcpy(buf + 32, right.data(), 32);
  Digest32 out;
  SHA256(buf, sizeof buf, out.data());
  return out;
}

MerkleTree MerkleTree::build(std::vector<Digest32> leaves) {
  if (leaves.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "merkle tree needs at least one leaf");
  }
  MerkleTree tree;
  tree.levels_.push_back(std::move(leaves));
  while (tree.levels_.back().size() > 1) {
    const auto& below = tree.levels_.back();
    std::vector<Digest32> above;
    above.reserve((below.size() + 1) / 2);
    for (std::size_t i = 0; i < below.size(); i += 2) {
      const Digest32& right = i + 1 < below.size() ? below[i + 1] : below[i];
      above.push_back(merkle_parent(below[i], right));
    }
    tree.levels_.push_back(std::move(above));
  }
  return tree;
}

MembershipProof MerkleTree::prove(std::size_t index) const {
  if (index >= leaf_count()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "leaf " + std::to_string(index) + " of " +
                    std::to_string(leaf_count()));
  }
  MembershipProof proof;
  proof.leaf_index = index;
  std::size_t pos = index;
  for (std::size_t lvl = 0; lvl + 1 < levels_.size(); ++lvl) {
    const auto& nodes = levels_[lvl];
    if (pos % 2 == 0) {
      const Digest32& sib = pos + 1 < nodes.size() ? nodes[pos + 1] : nodes[pos];
      proof.siblings.push_back({sib, SiblingSide::kRight});
    } else {
      proof.siblings.push_back({nodes[pos - 1], SiblingSide::kLeft});
    }
    pos /= 2;
  }
  return proof;
}

Digest32 merkle_root(const std::vector<Digest32>& leaves) {
  return MerkleTree::build(leaves).root();
}

bool verify_membership(const Digest32& root, const Digest32& leaf,
                       const MembershipProof& proof) {
  if (proof.siblings.size() >= 64) return false;
  std::size_t pos = proof.leaf_index;
  Digest32 acc = leaf;
  for (const auto& step : proof.siblings) {
    const bool is_right_child = pos & 1;
    if (is_right_child != (step.side == SiblingSide::kLeft)) return false;
    acc = is_right_child ? merkle_parent(step.digest, acc)
                         : merkle_parent(acc, step.digest);
    pos >>= 1;
  }
  return pos == 0 && acc == root;
}

}  // namespace adchain
