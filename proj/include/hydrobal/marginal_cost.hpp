#pragma once

// Marginal cost of hydro production from water values and PQ-curve segments,
// intraday bid ladders around a committed operating point, and the
// load-constraint shadow prices of a rebalance solution.

#include <iosfwd>
#include <string>
#include <vector>

#include "hydrobal/hydro_core.hpp"
#include "hydrobal/scheduler.hpp"

namespace hydrobal {

struct McSegment {
  std::string plant_id;
  int segment = 0;
  double mc = 0.0;      // EUR/MWh
  double volume = 0.0;  // MWh per step
};

/// mc_n = water_value * reference_slope / slope_n. Throws ValidationError
/// on a non-positive slope.
std::vector<McSegment> segment_mc(const HydroPlant& plant, const Reservoir& reservoir,
                                  double step_hours = 1.0);

enum class LadderSide { SellMore, BuyBack };

const char* to_string(LadderSide side);

struct LadderEntry {
  LadderSide side = LadderSide::SellMore;
  int segment = 0;
  double price = 0.0;   // EUR/MWh
  double volume = 0.0;  // MWh
};

/// Per step, SELL_MORE entries from the operating point upwards, then
/// BUY_BACK entries from the operating point downwards.
struct BidLadder {
  std::string plant_id;
  std::vector<std::vector<LadderEntry>> steps;
};

/// Throws DomainError when a committed value lies outside [p_min, p_max].
BidLadder build_ladder(const HydroPlant& plant, const Reservoir& reservoir, const Series& committed_g,
                       double step_hours = 1.0);

/// CSV with header `step,side,price_eur_mwh,volume_mwh`.
void write_ladder_csv(std::ostream& out, const BidLadder& ladder);

/// Load-constraint shadow prices of `solution` as marginal cost (EUR/MWh),
/// one series per plant (PLANT, wind last when committed) or a single
/// portfolio series. `mode` must match the problem's commitment.
DualReport dynamic_mc(const RebalanceProblem& problem, const ScheduleSolution& solution, LoadMode mode,
                      const SolveOptions& options = {});

}  // namespace hydrobal
