#include "hydrobal/market.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace hydrobal {

double QuoteLadder::best_ask(int step) const {
  const auto& s = steps.at(static_cast<std::size_t>(step));
  if (s.asks.empty()) throw ValidationError(fmt::format("no ask quotes in step {}", step));
  return s.asks.front().price;
}

double QuoteLadder::best_bid(int step) const {
  const auto& s = steps.at(static_cast<std::size_t>(step));
  if (s.bids.empty()) throw ValidationError(fmt::format("no bid quotes in step {}", step));
  return s.bids.front().price;
}

QuoteLadder synthesize_quotes(std::span<const double> spot, const SystemImbalanceSeries& imbalance,
                              const QuoteParams& params) {
  if (!(params.spread_frac > 0.0 && params.spread_frac < 1.0)) {
    throw ValidationError("spread_frac must lie in (0, 1)");
  }
  if (!(params.sensitivity >= 0.0)) throw ValidationError("sensitivity must be >= 0");
  if (params.depth < 1) throw ValidationError("depth must be >= 1");
  if (!(params.tier_volume > 0.0)) throw ValidationError("tier_volume must be > 0");
  if (imbalance.mw.size() != spot.size()) {
    throw ValidationError("system imbalance length differs from spot series");
  }

  QuoteLadder out;
  out.steps.resize(spot.size());
  for (std::size_t t = 0; t < spot.size(); ++t) {
    const double s = spot[t];
    if (!(s > 0.0)) throw ValidationError(fmt::format("spot price must be > 0 (step {})", t));
    const double shift = params.sensitivity * imbalance.mw[t];
    double bid = s * (1.0 - params.spread_frac - shift);
    double ask = s * (1.0 + params.spread_frac - shift);
    bid = std::max(bid, 0.05 * s);
    ask = std::max(ask, bid + 0.01 * s);
    const double step_price = 0.5 * params.spread_frac * s;
    auto& q = out.steps[t];
    for (int k = 0; k < params.depth; ++k) {
      q.asks.push_back({k, ask + k * step_price, params.tier_volume});
      q.bids.push_back({k, std::max(0.0, bid - k * step_price), params.tier_volume});
    }
  }
  return out;
}

SystemImbalanceSeries system_imbalance(const CascadeSystem& system, const InflowSeries& early,
                                       const InflowSeries& late, const WindSeries& wind_forecast,
                                       const WindSeries& wind_actual) {
  const std::size_t n = wind_forecast.values.size();
  if (wind_actual.values.size() != n) throw ValidationError("wind series lengths differ");
  SystemImbalanceSeries out{Series(n, 0.0)};
  for (std::size_t t = 0; t < n; ++t) out.mw[t] = wind_actual.values[t] - wind_forecast.values[t];
  for (const auto& r : system.reservoirs) {
    const auto& e = early.at(r.id);
    const auto& l = late.at(r.id);
    if (e.size() != n || l.size() != n) throw ValidationError("inflow length differs from wind");
    for (std::size_t t = 0; t < n; ++t) out.mw[t] += (l[t] - e[t]) * r.reference_slope;
  }
  return out;
}

std::vector<Violation> validate_quotes(const QuoteLadder& quotes) {
  std::vector<Violation> out;
  for (int t = 0; t < quotes.size(); ++t) {
    const auto& q = quotes.steps[static_cast<std::size_t>(t)];
    const std::string subject = fmt::format("quotes step {}", t);
    for (std::size_t k = 0; k < q.asks.size(); ++k) {
      if (!(q.asks[k].volume > 0.0)) out.push_back({subject, "ask tier volume must be > 0"});
      if (k > 0 && q.asks[k].price < q.asks[k - 1].price) {
        out.push_back({subject, "ask tiers must have ascending prices"});
      }
    }
    for (std::size_t k = 0; k < q.bids.size(); ++k) {
      if (!(q.bids[k].volume > 0.0)) out.push_back({subject, "bid tier volume must be > 0"});
      if (k > 0 && q.bids[k].price > q.bids[k - 1].price) {
        out.push_back({subject, "bid tiers must have descending prices"});
      }
    }
    if (!q.asks.empty() && !q.bids.empty() && !(q.bids.front().price < q.asks.front().price)) {
      out.push_back({subject, "best bid must be below best ask"});
    }
  }
  return out;
}

double ClearResult::filled() const {
  double v = 0.0;
  for (const auto& f : fills) v += f.volume;
  return v;
}

double ClearResult::notional() const {
  double c = 0.0;
  for (const auto& f : fills) c += f.price * f.volume;
  return c;
}

ClearResult clear(const Order& order, QuoteLadder& book) {
  ClearResult res;
  res.remainder = order.volume;
  if (!(order.volume > 0.0)) {
    res.remainder = 0.0;
    return res;
  }
  auto& q = book.steps.at(static_cast<std::size_t>(order.step));
  auto& side = order.side == TradeSide::Buy ? q.asks : q.bids;
  auto crosses = [&](double price) {
    return order.side == TradeSide::Buy ? price <= order.limit : price >= order.limit;
  };
  std::size_t k = 0;
  while (k < side.size() && res.remainder > 0.0 && crosses(side[k].price)) {
    const double v = std::min(res.remainder, side[k].volume);
    res.fills.push_back({order.step, order.side, side[k].price, v, side[k].index, order.account});
    res.remainder -= v;
    side[k].volume -= v;
    if (side[k].volume <= 0.0) {
      ++k;
    }
  }
  side.erase(side.begin(), side.begin() + static_cast<std::ptrdiff_t>(k));
  if (res.remainder < 1e-12) res.remainder = 0.0;
  return res;
}

ClearResult clear_imbalance(int step, double surplus_mwh, QuoteLadder& book, std::size_t account) {
  if (surplus_mwh == 0.0) return {};
  Order o;
  o.step = step;
  o.account = account;
  if (surplus_mwh > 0.0) {
    o.side = TradeSide::Sell;
    o.volume = surplus_mwh;
    o.limit = 0.0;
  } else {
    o.side = TradeSide::Buy;
    o.volume = -surplus_mwh;
    o.limit = std::numeric_limits<double>::infinity();
  }
  return clear(o, book);
}

double apply_fees(std::span<const Fill> fills, double residual_mwh, const FeeSchedule& fees) {
  double traded = 0.0;
  for (const auto& f : fills) traded += f.volume;
  return fees.trade_fee * traded + fees.imbalance_fee * std::abs(residual_mwh);
}

}  // namespace hydrobal
