#include "hydrobal/settlement.hpp"

#include <numeric>

#include <fmt/format.h>

#include "hydrobal/simd/kernels.hpp"

namespace hydrobal {

std::vector<Violation> validate_prices(const SettlementPrices& p) {
  std::vector<Violation> out;
  if (p.system_buy.size() != p.spot.size() || p.system_sell.size() != p.spot.size()) {
    out.push_back({"settlement prices", "series lengths differ"});
    return out;
  }
  for (std::size_t t = 0; t < p.spot.size(); ++t) {
    if (!(p.system_buy[t] >= p.spot[t] && p.spot[t] >= p.system_sell[t])) {
      out.push_back({fmt::format("settlement step {}", t),
                     fmt::format("need system buy {} >= spot {} >= system sell {}", p.system_buy[t],
                                 p.spot[t], p.system_sell[t])});
    }
  }
  return out;
}

SettlementPrices settlement_from_quotes(std::span<const double> spot, const QuoteLadder& quotes) {
  if (static_cast<std::size_t>(quotes.size()) != spot.size()) {
    throw ValidationError("quote ladder length differs from spot series");
  }
  SettlementPrices p;
  p.spot.assign(spot.begin(), spot.end());
  for (std::size_t t = 0; t < spot.size(); ++t) {
    const auto& q = quotes.steps[t];
    p.system_buy.push_back(q.asks.empty() ? spot[t] : q.asks.front().price);
    p.system_sell.push_back(q.bids.empty() ? spot[t] : q.bids.front().price);
  }
  return p;
}

double imbalance_price(double q_act, double q_forc, const SettlementPrices& prices, std::size_t step) {
  if (q_act < q_forc) return prices.system_buy.at(step);
  if (q_act > q_forc) return prices.system_sell.at(step);
  return prices.spot.at(step);
}

double cost_imperfect(double q_act, double q_forc, const SettlementPrices& prices, std::size_t step) {
  return -(q_act - q_forc) * (imbalance_price(q_act, q_forc, prices, step) - prices.spot.at(step));
}

Series cost_imperfect_series(std::span<const double> q_act, std::span<const double> q_forc,
                             const SettlementPrices& prices) {
  if (q_act.size() != prices.size() || q_forc.size() != prices.size() ||
      prices.system_buy.size() != prices.size() || prices.system_sell.size() != prices.size()) {
    throw ValidationError("series lengths differ from settlement prices");
  }
  Series out(q_act.size());
  simd::imbalance_cost(q_act, q_forc, prices.spot, prices.system_buy, prices.system_sell, out);
  return out;
}

double average_cost(std::span<const double> costs, std::span<const double> q_act) {
  if (costs.size() != q_act.size()) throw ValidationError("cost and production lengths differ");
  const double produced = std::accumulate(q_act.begin(), q_act.end(), 0.0);
  if (!(produced > 0.0)) throw DomainError("average cost undefined: total actual production is not positive");
  return std::accumulate(costs.begin(), costs.end(), 0.0) / produced;
}

double average_cost_imperfect(std::span<const double> q_act, std::span<const double> q_forc,
                              const SettlementPrices& prices) {
  const Series c = cost_imperfect_series(q_act, q_forc, prices);
  return average_cost(c, q_act);
}

double one_price_average_cost(std::span<const double> q_act, std::span<const double> q_forc,
                              std::span<const double> imbalance_prices) {
  if (q_forc.size() != q_act.size() || imbalance_prices.size() != q_act.size()) {
    throw ValidationError("series lengths differ");
  }
  double num = 0.0;
  double produced = 0.0;
  for (std::size_t t = 0; t < q_act.size(); ++t) {
    num -= (q_act[t] - q_forc[t]) * imbalance_prices[t];
    produced += q_act[t];
  }
  if (!(produced > 0.0)) throw DomainError("average cost undefined: total actual production is not positive");
  return num / produced;
}

}  // namespace hydrobal
