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

#include "adchain/bus.hpp"

#include "adchain/cryptokit.hpp"

namespace adchain {

const Message& Bus::send(std::string from, std::string to, std::string kind,
                         const Digest32& ref, Bytes body) {
  for (auto it = faults_.begin(); it != faults_.end(); ++it) {
    if (it->kind != kind) continue;
    if (it->skip > 0) {
      --it->skip;
      continue;
    }
    if (!body.empty()) body[body.size() / 2] ^= 0x01;
    ++faults_injected_;
    faults_.erase(it);
    break;
  }
  Message m{log_.size() + 1, std::move(from), std::move(to), std::move(kind), ref,
            std::move(body)};
  log_.push_back(std::move(m));
  return log_.back();
}

const Message& Bus::send(std::string from, std::string to, std::string kind,
                         Bytes body) {
  Digest32 ref = sha256(body);
  return send(std::move(from), std::move(to), std::move(kind), ref, std::move(body));
}

void Bus::corrupt(std::string kind, std::size_t skip) {
  faults_.push_back({std::move(kind), skip});
}

std::vector<const Message*> Bus::observed_by(std::string_view node) const {
  std::vector<const Message*> out;
  for (const auto& m : log_) {
    if (m.from == node || m.to == node) out.push_back(&m);
  }
  return out;
}

std::string Bus::format(const Message& m) {
  return std::to_string(m.tick) + "\t" + m.from + "\t" + m.to + "\t" + m.kind + "\t" +
         to_hex(ByteView(m.ref.data(), 8));
}

std::string Bus::run_log() const {
  std::string out;
  for (const auto& m : log_) {
    out += format(m);
    out += '\n';
  }
  return out;
}

}  // namespace adchain
