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

#include "adchain/billing.hpp"

#include <algorithm>

#include "adchain/error.hpp"

namespace adchain {

std::string_view to_string(BillEvent event) {
  return event == BillEvent::kClick ? "click" : "presentation";
}

void Shares::validate() const {
  if (den <= 0 || num < 0 || num > den) {
    throw Error(ErrorCode::kInvalidArgument, "developer share must lie in [0, 1]");
  }
}

std::int64_t Shares::developer_part(std::int64_t amount) const {
  // amount and num are non-negative, so integer division floors.
  return static_cast<std::int64_t>(static_cast<__int128>(amount) * num / den);
}

std::int64_t LedgerDelta::net() const {
  std::int64_t sum = 0;
  for (const auto& [w, d] : changes) sum += d;
  return sum;
}

WalletLedger::WalletLedger(Shares shares, std::string billing_wallet)
    : shares_(shares), billing_wallet_(std::move(billing_wallet)) {
  shares_.validate();
  balances_[billing_wallet_] = 0;
}

void WalletLedger::deposit(const std::string& wallet, std::int64_t amount) {
  if (amount < 0) throw Error(ErrorCode::kInvalidArgument, "negative deposit");
  balances_[wallet] += amount;
}

std::int64_t WalletLedger::balance(const std::string& wallet) const {
  auto it = balances_.find(wallet);
  return it == balances_.end() ? 0 : it->second;
}

std::int64_t WalletLedger::total() const {
  std::int64_t sum = 0;
  for (const auto& [w, b] : balances_) sum += b;
  return sum;
}

void WalletLedger::set_price(std::uint64_t ad_id, PriceTag tag) {
  if (tag.presentation < 0 || tag.click < 0) {
    throw Error(ErrorCode::kInvalidArgument, "negative price tag");
  }
  if (tag.advertiser_id.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "price tag without advertiser");
  }
  prices_[ad_id] = std::move(tag);
}

const PriceTag& WalletLedger::price(std::uint64_t ad_id) const {
  auto it = prices_.find(ad_id);
  if (it == prices_.end()) {
    throw Error(ErrorCode::kUnknownAd, "no price tag for ad " + std::to_string(ad_id));
  }
  return it->second;
}

std::optional<LedgerDelta> WalletLedger::try_commit(const BillingEvent& event) {
  const PriceTag& tag = price(event.ad_id);
  const std::int64_t cost =
      event.kind == BillEvent::kClick ? tag.click : tag.presentation;
  if (balance(tag.advertiser_id) < cost) return std::nullopt;

  const std::int64_t dev = shares_.developer_part(cost);
  LedgerDelta d{event, true, {}};
  d.changes[tag.advertiser_id] -= cost;
  d.changes[event.developer_id] += dev;
  d.changes[billing_wallet_] += cost - dev;
  for (const auto& [w, c] : d.changes) balances_[w] += c;
  return d;
}

LedgerDelta WalletLedger::bill(const BillingEvent& event) {
  if (event.developer_id.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "billing event without developer");
  }
  if (auto d = try_commit(event)) return *d;
  queue_.push_back(event);
  return LedgerDelta{event, false, {}};
}

std::vector<LedgerDelta> WalletLedger::retry_queued() {
  std::vector<LedgerDelta> done;
  std::deque<BillingEvent> still;
  while (!queue_.empty()) {
    BillingEvent ev = std::move(queue_.front());
    queue_.pop_front();
    if (auto d = try_commit(ev)) {
      done.push_back(std::move(*d));
    } else {
      still.push_back(std::move(ev));
    }
  }
  queue_ = std::move(still);
  return done;
}

void TrackingList::track(std::uint64_t ad_id, std::int64_t required_frequency,
                         std::int64_t timestamp) {
  if (required_frequency <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "required frequency must be positive");
  }
  if (tracks(ad_id)) {
    throw Error(ErrorCode::kInvalidArgument,
                "ad " + std::to_string(ad_id) + " is already tracked");
  }
  rows_.push_back({timestamp, ad_id, required_frequency, 0, 0});
}

bool TrackingList::tracks(std::uint64_t ad_id) const {
  return std::any_of(rows_.begin(), rows_.end(),
                     [&](const QuotaRow& r) { return r.ad_id == ad_id; });
}

const QuotaRow& TrackingList::row(std::uint64_t ad_id) const {
  for (const auto& r : rows_) {
    if (r.ad_id == ad_id) return r;
  }
  throw Error(ErrorCode::kUnknownAd, "ad " + std::to_string(ad_id) + " is not tracked");
}

std::vector<std::uint64_t> TrackingList::unfulfilled() const {
  std::vector<std::uint64_t> out;
  for (const auto& r : rows_) {
    if (r.served_fraction < 100) out.push_back(r.ad_id);
  }
  return out;
}

TrackingList update_quota(TrackingList list, std::uint64_t ad_id,
                          std::int64_t timestamp) {
  for (auto& r : list.rows_) {
    if (r.ad_id != ad_id) continue;
    ++r.served_count;
    r.timestamp = timestamp;
    r.served_fraction =
        std::min<std::int64_t>(100, r.served_count * 100 / r.required_frequency);
    return list;
  }
  throw Error(ErrorCode::kUnknownAd, "ad " + std::to_string(ad_id) + " is not tracked");
}

}  // namespace adchain
