#pragma once

// Imbalance settlement under one-price and two-price regimes. Quantities are
// energies per settlement step (MWh), prices EUR/MWh.

#include <span>

#include "hydrobal/hydro_core.hpp"
#include "hydrobal/market.hpp"

namespace hydrobal {

struct SettlementPrices {
  Series spot;
  Series system_buy;   // paid for deficits
  Series system_sell;  // received for surpluses

  std::size_t size() const { return spot.size(); }
};

/// Requires system_buy >= spot >= system_sell per step and equal lengths.
std::vector<Violation> validate_prices(const SettlementPrices& prices);

/// Settlement prices implied by a quote ladder: system buy = best ask,
/// system sell = best bid. Steps with an empty side fall back to spot.
SettlementPrices settlement_from_quotes(std::span<const double> spot, const QuoteLadder& quotes);

/// System buy price for a deficit, system sell price for a surplus, spot
/// when balanced.
double imbalance_price(double q_act, double q_forc, const SettlementPrices& prices, std::size_t step);

/// Cost of the deviation relative to having sold the actual production at spot:
/// -(q_act - q_forc) * (imbalance price - spot).
double cost_imperfect(double q_act, double q_forc, const SettlementPrices& prices, std::size_t step);

/// cost_imperfect for every step, vectorized.
Series cost_imperfect_series(std::span<const double> q_act, std::span<const double> q_forc,
                             const SettlementPrices& prices);

/// sum(costs) / sum(q_act). Throws DomainError when total actual production is
/// not positive.
double average_cost(std::span<const double> costs, std::span<const double> q_act);

/// Average of the per-step cost of imperfect forecast over the horizon.
double average_cost_imperfect(std::span<const double> q_act, std::span<const double> q_forc,
                              const SettlementPrices& prices);

/// One-price metric: -sum((q_act - q_forc) * imbalance_price) / sum(q_act),
/// with the given per-step imbalance clearing prices.
double one_price_average_cost(std::span<const double> q_act, std::span<const double> q_forc,
                              std::span<const double> imbalance_prices);

}  // namespace hydrobal
