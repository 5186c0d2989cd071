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

// Deterministic in-process message bus. Every send is logged with a
// monotonically increasing tick; nothing on the log depends on wall time.

#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <string_view>
#include <vector>

#include "adchain/bytes.hpp"

namespace adchain {

struct Message {
  std::uint64_t tick = 0;
  std::string from;
  std::string to;
  // Transaction type name for ledger traffic, protocol step otherwise.
  std::string kind;
  // t_id for transactions, SHA-256 of the body otherwise.
  Digest32 ref{};
  Bytes body;
};

class Bus {
 public:
  // Logs and returns the delivered message. The body the receiver sees may
  // differ from `body` when a fault was injected.
  const Message& send(std::string from, std::string to, std::string kind,
                      const Digest32& ref, Bytes body);
  const Message& send(std::string from, std::string to, std::string kind, Bytes body);

  // Flips one bit in the body of the `skip`-th next message of `kind`
  // (0 = the very next one).
  void corrupt(std::string kind, std::size_t skip = 0);
  std::size_t faults_injected() const { return faults_injected_; }

  const std::deque<Message>& log() const { return log_; }
  std::vector<const Message*> observed_by(std::string_view node) const;

  // tick TAB from TAB to TAB kind TAB first 8 bytes of ref in hex.
  static std::string format(const Message& m);
  std::string run_log() const;

 private:
  struct Fault {
    std::string kind;
    std::size_t skip;
  };
  std::deque<Message> log_;
  std::vector<Fault> faults_;
  std::size_t faults_injected_ = 0;
};

}  // namespace adchain
