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

// Wallet ledger for presentation and click billing, and the per-ad
// advertising quota tracking list.
//
// Amounts are integer micro-units. An event with price C moves C out of the
// advertiser wallet, floor(C * u) into the app developer wallet and the
// remainder into the billing server wallet, so every event nets to zero.

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace adchain {

enum class BillEvent : std::uint8_t { kPresentation, kClick };

std::string_view to_string(BillEvent event);

// Developer share u = num / den; the billing server gets v = 1 - u.
struct Shares {
  std::int64_t num = 7;
  std::int64_t den = 10;

  // Throws Error(kInvalidArgument) unless 0 <= num <= den and den > 0.
  void validate() const;
  std::int64_t developer_part(std::int64_t amount) const;
};

struct PriceTag {
  std::string advertiser_id;
  std::int64_t presentation = 0;
  std::int64_t click = 0;
};

struct BillingEvent {
  BillEvent kind = BillEvent::kPresentation;
  std::uint64_t ad_id = 0;
  std::string developer_id;
};

// Signed balance changes of one committed event, or nothing if it queued.
struct LedgerDelta {
  BillingEvent event;
  bool committed = false;
  std::map<std::string, std::int64_t> changes;

  std::int64_t net() const;
};

class WalletLedger {
 public:
  explicit WalletLedger(Shares shares = {}, std::string billing_wallet = "bs");

  const Shares& shares() const { return shares_; }
  const std::string& billing_wallet() const { return billing_wallet_; }

  // Creates the wallet when missing. Throws Error(kInvalidArgument) for a
  // negative amount.
  void deposit(const std::string& wallet, std::int64_t amount);
  std::int64_t balance(const std::string& wallet) const;
  const std::map<std::string, std::int64_t>& balances() const { return balances_; }
  std::int64_t total() const;

  void set_price(std::uint64_t ad_id, PriceTag tag);
  const PriceTag& price(std::uint64_t ad_id) const;

  // Throws Error(kUnknownAd) for an ad without a price tag. When the
  // advertiser cannot cover the price the event is queued and the returned
  // delta is uncommitted; nothing moves.
  LedgerDelta bill(const BillingEvent& event);

  // Retries queued events in order, keeping the ones that still cannot be
  // paid. Returns the committed deltas.
  std::vector<LedgerDelta> retry_queued();
  const std::deque<BillingEvent>& queued() const { return queue_; }

 private:
  std::optional<LedgerDelta> try_commit(const BillingEvent& event);

  Shares shares_;
  std::string billing_wallet_;
  std::map<std::string, std::int64_t> balances_;
  std::map<std::uint64_t, PriceTag> prices_;
  std::deque<BillingEvent> queue_;
};

struct QuotaRow {
  std::int64_t timestamp = 0;
  std::uint64_t ad_id = 0;
  std::int64_t required_frequency = 0;
  std::int64_t served_count = 0;
  // floor(served_count * 100 / required_frequency), capped at 100.
  std::int64_t served_fraction = 0;

  friend bool operator==(const QuotaRow&, const QuotaRow&) = default;
};

class TrackingList {
 public:
  // Throws Error(kInvalidArgument) for a non-positive frequency or an ad
  // already tracked.
  void track(std::uint64_t ad_id, std::int64_t required_frequency,
             std::int64_t timestamp = 0);
  bool tracks(std::uint64_t ad_id) const;
  const QuotaRow& row(std::uint64_t ad_id) const;
  const std::vector<QuotaRow>& rows() const { return rows_; }

  // Ads below 100%.
  std::vector<std::uint64_t> unfulfilled() const;

  friend bool operator==(const TrackingList&, const TrackingList&) = default;

 private:
  friend TrackingList update_quota(TrackingList list, std::uint64_t ad_id,
                                   std::int64_t timestamp);
  std::vector<QuotaRow> rows_;
};

// Records one serving of `ad_id`. Throws Error(kUnknownAd) when the ad is
// not tracked.
TrackingList update_quota(TrackingList list, std::uint64_t ad_id,
                          std::int64_t timestamp);

}  // namespace adchain
