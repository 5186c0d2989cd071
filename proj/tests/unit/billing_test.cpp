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

#include <random>

#include "adchain/error.hpp"
#include "doctest.h"

using namespace adchain;

TEST_CASE("share arithmetic") {
  Shares s;
  CHECK(s.developer_part(10) == 7);
  CHECK(s.developer_part(0) == 0);
  CHECK(s.developer_part(1) == 0);
  CHECK(s.developer_part(19) == 13);
  CHECK_THROWS_AS((Shares{11, 10}.validate()), Error);
  CHECK_THROWS_AS((Shares{1, 0}.validate()), Error);
  CHECK_THROWS_AS((Shares{-1, 10}.validate()), Error);
}

TEST_CASE("click of 10 units splits 7 and 3") {
  WalletLedger l;
  l.deposit("adv", 100);
  l.set_price(1, {"adv", 4, 10});
  LedgerDelta d = l.bill({BillEvent::kClick, 1, "dev"});
  CHECK(d.committed);
  CHECK(d.changes.at("adv") == -10);
  CHECK(d.changes.at("dev") == 7);
  CHECK(d.changes.at("bs") == 3);
  CHECK(d.net() == 0);
  CHECK(l.balance("adv") == 90);
  CHECK(l.balance("dev") == 7);
  CHECK(l.balance("bs") == 3);
}

TEST_CASE("zero price moves nothing") {
  WalletLedger l;
  l.deposit("adv", 5);
  l.set_price(1, {"adv", 0, 0});
  auto before = l.balances();
  LedgerDelta d = l.bill({BillEvent::kPresentation, 1, "dev"});
  CHECK(d.committed);
  CHECK(d.net() == 0);
  for (const auto& [w, b] : l.balances()) CHECK(b == (before.count(w) ? before.at(w) : 0));
}

TEST_CASE("insufficient balance queues without partial transfer") {
  WalletLedger l;
  l.deposit("adv", 5);
  l.set_price(1, {"adv", 6, 20});
  LedgerDelta d = l.bill({BillEvent::kPresentation, 1, "dev"});
  CHECK_FALSE(d.committed);
  CHECK(d.changes.empty());
  CHECK(l.balance("adv") == 5);
  CHECK(l.balance("dev") == 0);
  CHECK(l.queued().size() == 1);
  CHECK(l.retry_queued().empty());
  l.deposit("adv", 1);
  auto done = l.retry_queued();
  REQUIRE(done.size() == 1);
  CHECK(l.balance("adv") == 0);
  CHECK(l.queued().empty());
  CHECK_THROWS_AS(l.bill({BillEvent::kClick, 2, "dev"}), Error);
  CHECK_THROWS_AS(l.deposit("adv", -1), Error);
}

TEST_CASE("random events conserve value exactly") {
  std::mt19937_64 rng(2026);
  for (Shares s : {Shares{7, 10}, Shares{1, 3}, Shares{0, 1}, Shares{1, 1}}) {
    WalletLedger l(s);
    const std::int64_t start = 5'000'000;
    for (int a = 0; a < 5; ++a) l.deposit("adv" + std::to_string(a), start);
    for (std::uint64_t ad = 1; ad <= 50; ++ad) {
      l.set_price(ad, {"adv" + std::to_string(ad % 5),
                       static_cast<std::int64_t>(rng() % 1000),
                       static_cast<std::int64_t>(rng() % 10000)});
    }
    const std::int64_t total = l.total();
    for (int i = 0; i < 10'000; ++i) {
      BillingEvent ev{rng() % 2 ? BillEvent::kClick : BillEvent::kPresentation,
                      1 + rng() % 50, "dev" + std::to_string(rng() % 7)};
      LedgerDelta d = l.bill(ev);
      REQUIRE(d.net() == 0);
      for (const auto& [w, b] : l.balances()) REQUIRE(b >= 0);
    }
    CHECK(l.total() == total);
  }
}

TEST_CASE("tracking list percentages") {
  TrackingList t;
  t.track(1, 100);
  t.track(2, 67);
  t.track(3, 10);
  CHECK(t.row(1).served_fraction == 0);
  for (int i = 0; i < 65; ++i) t = update_quota(std::move(t), 1, i);
  CHECK(t.row(1).served_fraction == 65);

  // Floor convention: 33 servings of 67 is 49%, the 34th reaches 50%.
  for (int i = 0; i < 33; ++i) t = update_quota(std::move(t), 2, i);
  CHECK(t.row(2).served_fraction == 49);
  t = update_quota(std::move(t), 2, 40);
  CHECK(t.row(2).served_fraction == 50);
  CHECK(t.row(2).timestamp == 40);

  std::int64_t last = 0;
  for (int i = 0; i < 25; ++i) {
    t = update_quota(std::move(t), 3, i);
    CHECK(t.row(3).served_fraction >= last);
    CHECK(t.row(3).served_fraction <= 100);
    last = t.row(3).served_fraction;
  }
  CHECK(last == 100);
  CHECK(t.unfulfilled() == std::vector<std::uint64_t>{1, 2});
  CHECK_THROWS_AS(update_quota(t, 99, 0), Error);
  CHECK_THROWS_AS(t.track(1, 5), Error);
  CHECK_THROWS_AS(t.track(9, 0), Error);
}
