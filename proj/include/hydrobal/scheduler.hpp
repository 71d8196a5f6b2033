#pragma once

// Mixed-integer scheduling of a serial hydro cascade.
//
// Day-ahead: maximize spot revenue plus the value of the end reservoirs,
// subject to plant power bounds, reservoir bounds and balances, and segment
// logic that forces the PQ-curve segments to fill in order.
//
// Rebalance: same physics, the committed load is met through production plus
// intraday trades against the quote ladder. PLANT mode holds every unit to its
// own commitment; PORTFOLIO mode only to the sum.
//
// Reservoir balances are kept in flow units (volume / step length); the
// reported ScheduleSolution converts back to m3.

#include <optional>
#include <vector>

#include "hydrobal/hydro_core.hpp"
#include "hydrobal/lp.hpp"
#include "hydrobal/market.hpp"

namespace hydrobal {

struct DayAheadProblem {
  CascadeSystem system;
  InflowSeries inflow;
  Series prices;  // EUR/MWh per step
  TimeGrid grid;
};

struct RebalanceProblem : DayAheadProblem {
  LoadCommitment commitment;
  QuoteLadder quotes;
  std::optional<WindSeries> wind_actual;
  /// Trading fee folded into trade prices (buy at ask + fee, sell at bid - fee).
  double trade_fee = 0.0;
};

struct SolveOptions {
  double mip_gap = 0.0;
  double lp_tolerance = 1e-9;
  long max_nodes = 1'000'000;
};

ScheduleSolution solve_day_ahead(const DayAheadProblem& problem, const SolveOptions& options = {});
ScheduleSolution solve_rebalance(const RebalanceProblem& problem, const SolveOptions& options = {});

/// Shadow prices of the load constraints, expressed as marginal cost:
/// EUR per extra MWh of committed delivery.
struct DualReport {
  LoadMode mode = LoadMode::Plant;
  std::vector<std::string> units;  // per load row group
  Matrix load_mc;                  // [unit][step] EUR/MWh
  /// d(objective)/d(active reservoir bound), EUR per m3; zero when the
  /// reservoir is strictly inside its bounds.
  Matrix reservoir_shadow;         // [reservoir][step]
};

/// Fixes the segment binaries at their values in `solution`, re-solves the LP
/// and reads its duals. Throws Error when `solution` is not optimal for
/// `problem` (its fixed-binary LP finds a better objective).
DualReport extract_duals(const RebalanceProblem& problem, const ScheduleSolution& solution,
                         const SolveOptions& options = {});

/// Model builders, exposed for MPS export and tests.
lp::Model build_day_ahead_model(const DayAheadProblem& problem);
lp::Model build_rebalance_model(const RebalanceProblem& problem);

/// Independent feasibility audit of a schedule against the physical
/// constraints (power bounds, reservoir bounds and balances, segment logic,
/// linking equation). Volumes are compared in flow units (m3 / step length).
std::vector<Violation> audit_schedule(const DayAheadProblem& problem,
                                      const ScheduleSolution& solution, double tol = 1e-6);

/// audit_schedule plus the load constraints and market depth of a rebalance.
std::vector<Violation> audit_rebalance(const RebalanceProblem& problem,
                                       const ScheduleSolution& solution, double tol = 1e-6);

/// Value of a schedule at spot: sum_t price * generation * hours plus the
/// end-reservoir credit. Wind is not included.
double spot_value(const DayAheadProblem& problem, const ScheduleSolution& solution);

}  // namespace hydrobal
