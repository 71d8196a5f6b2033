#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "hydrobal/market.hpp"

using namespace hydrobal;

namespace {

QuoteLadder one_step(std::vector<Tier> asks, std::vector<Tier> bids) {
  QuoteLadder q;
  q.steps.push_back({std::move(asks), std::move(bids)});
  return q;
}

}  // namespace

TEST_SUITE("market") {

TEST_CASE("balanced system quotes sit 15% around spot") {
  const Series spot = {20.0};
  const auto q = synthesize_quotes(spot, {{0.0}});
  CHECK(q.best_bid(0) == doctest::Approx(17.0));
  CHECK(q.best_ask(0) == doctest::Approx(23.0));
  REQUIRE(q.steps[0].asks.size() == 3);
  CHECK(q.steps[0].asks[1].price == doctest::Approx(24.5));
  CHECK(q.steps[0].bids[2].price == doctest::Approx(14.0));
  CHECK(q.steps[0].asks[0].volume == 25.0);
}

TEST_CASE("surplus shifts both sides down") {
  const Series spot = {20.0};
  const auto q = synthesize_quotes(spot, {{5.0}});
  CHECK(q.best_bid(0) == doctest::Approx(16.0));
  CHECK(q.best_ask(0) == doctest::Approx(22.0));
}

TEST_CASE("zero sensitivity ignores the imbalance") {
  QuoteParams params;
  params.sensitivity = 0.0;
  const Series spot = {20.0, 31.0};
  const auto a = synthesize_quotes(spot, {{0.0, 0.0}}, params);
  const auto b = synthesize_quotes(spot, {{40.0, -70.0}}, params);
  for (int t = 0; t < 2; ++t) {
    CHECK(a.best_ask(t) == b.best_ask(t));
    CHECK(a.best_bid(t) == b.best_bid(t));
  }
}

TEST_CASE("clamps keep a positive spread at extreme imbalance") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    QuoteParams params;
    params.spread_frac = 0.001 + 0.5 * u(rng);
    params.sensitivity = 0.05 * u(rng);
    params.depth = 1 + static_cast<int>(u(rng) * 4);
    const Series spot = {1.0 + 100.0 * u(rng)};
    const auto q = synthesize_quotes(spot, {{-500.0 + 1000.0 * u(rng)}}, params);
    CHECK(validate_quotes(q).empty());
    CHECK(q.best_bid(0) < q.best_ask(0));
    CHECK(q.best_bid(0) >= 0.05 * spot[0] - 1e-12);
  }
}

TEST_CASE("bad parameters are rejected") {
  const Series spot = {20.0};
  QuoteParams p;
  p.depth = 0;
  CHECK_THROWS_AS(synthesize_quotes(spot, {{0.0}}, p), ValidationError);
  CHECK_THROWS_AS(synthesize_quotes(spot, {{0.0, 1.0}}), ValidationError);
  CHECK_THROWS_AS(synthesize_quotes(Series{-1.0}, {{0.0}}), ValidationError);
}

TEST_CASE("validate_quotes catches crossed books and bad tiers") {
  CHECK(validate_quotes(one_step({{0, 24.2, 10}}, {{0, 21.5, 10}})).empty());
  CHECK(validate_quotes(one_step({}, {})).empty());
  CHECK_FALSE(validate_quotes(one_step({{0, 20.0, 10}}, {{0, 21.5, 10}})).empty());
  CHECK_FALSE(validate_quotes(one_step({{0, 24.2, 0}}, {})).empty());
  CHECK_FALSE(validate_quotes(one_step({{0, 25.0, 5}, {1, 24.0, 5}}, {})).empty());
  CHECK_THROWS_AS(one_step({}, {}).best_ask(0), ValidationError);
}

TEST_CASE("round trip loses the spread times the volume") {
  QuoteLadder book = one_step({{0, 24.2, 16.0}}, {{0, 21.5, 15.0}, {1, 18.3, 20.0}});
  const auto sell = clear({0, TradeSide::Sell, 15.0, 0.0, 0}, book);
  const auto buy = clear({0, TradeSide::Buy, 15.0, 1e9, 0}, book);
  CHECK(buy.notional() - sell.notional() == 40.5);
}

TEST_CASE("first come, first served") {
  QuoteLadder book = one_step({}, {{0, 21.5, 15.0}, {1, 18.3, 20.0}});
  const auto w1 = clear({0, TradeSide::Sell, 15.0, 0.0, 1}, book);
  const auto w2 = clear({0, TradeSide::Sell, 15.0, 0.0, 2}, book);
  REQUIRE(w1.fills.size() == 1);
  REQUIRE(w2.fills.size() == 1);
  CHECK(w1.fills[0].price == 21.5);
  CHECK(w2.fills[0].price == 18.3);
  CHECK(w2.fills[0].tier == 1);
  CHECK(w2.fills[0].account == 2);
  CHECK(book.steps[0].bids.size() == 1);
  CHECK(book.steps[0].bids[0].volume == 5.0);
}

TEST_CASE("limits that do not cross leave the book alone") {
  QuoteLadder book = one_step({{0, 24.2, 16.0}}, {{0, 21.5, 15.0}});
  const QuoteLadder before = book;
  const auto r = clear({0, TradeSide::Buy, 10.0, 24.0, 0}, book);
  CHECK(r.fills.empty());
  CHECK(r.remainder == 10.0);
  CHECK(book.steps[0].asks[0].volume == before.steps[0].asks[0].volume);
  const auto s = clear({0, TradeSide::Sell, 10.0, 22.0, 0}, book);
  CHECK(s.fills.empty());
}

TEST_CASE("clear_imbalance trades in the closing direction") {
  QuoteLadder book = one_step({{0, 24.2, 16.0}}, {{0, 21.5, 15.0}});
  const auto surplus = clear_imbalance(0, 20.0, book, 3);
  REQUIRE(surplus.fills.size() == 1);
  CHECK(surplus.fills[0].side == TradeSide::Sell);
  CHECK(surplus.remainder == doctest::Approx(5.0));
  const auto deficit = clear_imbalance(0, -4.0, book);
  CHECK(deficit.fills[0].side == TradeSide::Buy);
  CHECK(deficit.remainder == 0.0);
  CHECK(clear_imbalance(0, 0.0, book).fills.empty());
}

TEST_CASE("random clears conserve volume and never improve on an earlier identical order") {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 300; ++k) {
    QuoteParams params;
    params.tier_volume = 1.0 + 20.0 * u(rng);
    params.depth = 1 + static_cast<int>(u(rng) * 4);
    QuoteLadder book = synthesize_quotes(Series{10.0 + 50.0 * u(rng)}, {{-10.0 + 20.0 * u(rng)}}, params);
    const TradeSide side = u(rng) < 0.5 ? TradeSide::Buy : TradeSide::Sell;
    const double vol = 30.0 * u(rng);
    const Order order{0, side, vol, side == TradeSide::Buy ? 1e9 : 0.0, 0};
    const auto first = clear(order, book);
    const auto second = clear(order, book);
    for (const auto* r : {&first, &second}) {
      CHECK(r->filled() + r->remainder == doctest::Approx(vol).epsilon(1e-12));
      double cash = 0.0;
      for (const auto& f : r->fills) cash += f.price * f.volume;
      CHECK(r->notional() == doctest::Approx(cash));
    }
    for (const auto& f2 : second.fills) {
      for (const auto& f1 : first.fills) {
        if (side == TradeSide::Buy) CHECK(f2.price >= f1.price);
        else CHECK(f2.price <= f1.price);
      }
    }
  }
}

TEST_CASE("fees") {
  const std::vector<Fill> ten = {{0, TradeSide::Buy, 20.0, 4.0, 0, 0}, {0, TradeSide::Sell, 18.0, 6.0, 0, 0}};
  CHECK(apply_fees(ten, 0.0, FeeSchedule{}) == doctest::Approx(1.5));
  CHECK(apply_fees({}, 0.0, FeeSchedule{}) == 0.0);
  CHECK(apply_fees({}, -4.0, FeeSchedule{0.15, 0.5}) == doctest::Approx(2.0));
}

TEST_CASE("system imbalance converts inflow revisions with the reference slope") {
  CascadeSystem s = testutil::two_plant_system();
  auto early = testutil::flat_inflow(s, 2, 5.0);
  auto late = early;
  late.by_reservoir["lake"] = {7.0, 5.0};
  late.by_reservoir["pond"] = {5.0, 4.0};
  const WindSeries wf{{10.0, 10.0}, WindRole::Forecast};
  const WindSeries wa{{13.0, 6.0}, WindRole::Actual};
  const auto imb = system_imbalance(s, early, late, wf, wa);
  CHECK(imb.mw[0] == doctest::Approx(2.0 * 3.0 + 3.0));
  CHECK(imb.mw[1] == doctest::Approx(-1.0 * 2.0 - 4.0));
}

}
