#pragma once

// Intraday pay-as-bid market: synthetic quote surfaces, tiered order-book
// snapshots and first-come-first-served clearing.
//
// A QuoteLadder is mutated by clear(); callers that need independent
// scenarios copy it first. Concurrent access needs external serialization.

#include <span>
#include <string>
#include <vector>

#include "hydrobal/hydro_core.hpp"

namespace hydrobal {

struct Tier {
  int index = 0;        // position in the original ladder, 0 = best
  double price = 0.0;   // EUR/MWh
  double volume = 0.0;  // MWh
};

/// Resting orders for one delivery step. Asks are sorted by ascending price,
/// bids by descending price. Empty sides mean no liquidity.
struct StepQuotes {
  std::vector<Tier> asks;
  std::vector<Tier> bids;
};

struct QuoteLadder {
  std::vector<StepQuotes> steps;

  int size() const { return static_cast<int>(steps.size()); }
  /// Best prices; throw ValidationError when the side is empty.
  double best_ask(int step) const;
  double best_bid(int step) const;
};

struct FeeSchedule {
  double trade_fee = 0.15;      // EUR per traded MWh
  double imbalance_fee = 0.30;  // EUR per MWh of residual imbalance
};

/// Signed late-minus-early forecast delta of the whole system, MW. Positive
/// means surplus.
struct SystemImbalanceSeries {
  Series mw;
};

struct QuoteParams {
  double spread_frac = 0.15;
  double sensitivity = 0.01;  // relative price shift per MW of system imbalance
  int depth = 3;              // tiers per side
  double tier_volume = 25.0;  // MWh per tier
};

/// Quotes around spot:
///   best ask = spot * (1 + spread_frac - sensitivity * imb)
///   best bid = spot * (1 - spread_frac - sensitivity * imb)
/// clamped to bid >= 0.05 spot and ask - bid >= 0.01 spot. Deeper tiers step
/// away from the best price by spread_frac / 2 of spot per tier.
QuoteLadder synthesize_quotes(std::span<const double> spot, const SystemImbalanceSeries& imbalance,
                              const QuoteParams& params = {});

/// Energy-equivalent late-minus-early delta: inflow revisions converted with
/// each reservoir's reference slope, plus the wind revision.
SystemImbalanceSeries system_imbalance(const CascadeSystem& system, const InflowSeries& early,
                                       const InflowSeries& late, const WindSeries& wind_forecast,
                                       const WindSeries& wind_actual);

std::vector<Violation> validate_quotes(const QuoteLadder& quotes);

struct Order {
  int step = 0;
  TradeSide side = TradeSide::Buy;
  double volume = 0.0;  // MWh
  double limit = 0.0;   // EUR/MWh; BUY fills at price <= limit, SELL at price >= limit
  std::size_t account = 0;
};

struct ClearResult {
  std::vector<Fill> fills;
  double remainder = 0.0;  // unfilled MWh

  double filled() const;
  /// Pay-as-bid cash flow of the fills: sum of price * volume.
  double notional() const;
};

/// Walks the opposite side of `book` best tier first, decrementing resting
/// volume. Exhausted tiers are removed.
ClearResult clear(const Order& order, QuoteLadder& book);

/// Market order in the direction that closes a deviation `surplus_mwh`
/// (positive = sell, negative = buy).
ClearResult clear_imbalance(int step, double surplus_mwh, QuoteLadder& book, std::size_t account = 0);

/// trade_fee * traded MWh + imbalance_fee * |residual|.
double apply_fees(std::span<const Fill> fills, double residual_mwh, const FeeSchedule& fees);

}  // namespace hydrobal
