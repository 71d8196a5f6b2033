#pragma once

// Four-scenario comparison of individual versus internal balancing.
//
//   1  individual, no re-optimization: each unit clears its own raw
//      imbalance hour by hour (hydro plants first, then wind)
//   2  individual, hydro re-optimized per plant (the base case)
//   3  common reactive: the portfolio's net imbalance is cleared per hour
//   4  common proactive: hydro re-optimized against the portfolio commitment
//
// Each scenario's cost is measured against selling the realized optimum
// (reforecast hydro schedule plus actual wind) at spot and keeping its
// end-reservoir value. Per step it splits into a settlement part, the
// deviation from commitment valued at spot minus the trade cash flow, and a
// redispatch part, the spot and stored-water value given up by moving away
// from the reforecast schedule.

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "hydrobal/market.hpp"
#include "hydrobal/scheduler.hpp"

namespace hydrobal {

struct ScenarioInputs {
  CascadeSystem system;
  TimeGrid grid;
  InflowSeries inflow_early;
  InflowSeries inflow_late;
  WindSeries wind_forecast;
  WindSeries wind_actual;
  Series spot;
  QuoteLadder quotes;
  FeeSchedule fees;
  SolveOptions solver;
};

struct ImbalanceReport {
  std::string name;
  Series deviation;    // MWh, actual minus committed, portfolio
  Series settlement;   // EUR
  Series redispatch;   // EUR
  Series fees;         // EUR
  Series cost;         // EUR, sum of the three parts
  Series residual;     // MWh left unfilled by the market (unsigned)
  std::vector<Fill> fills;
  double total = 0.0;         // EUR
  double actual_mwh = 0.0;    // total actual production, hydro plus wind
  double average = 0.0;       // EUR per MWh of actual production
  double income = 0.0;        // day-ahead revenue, sum of L * spot
  double share_pct = 0.0;     // total / income, percent
  double traded_mwh = 0.0;
};

struct ScenarioComparison {
  std::array<ImbalanceReport, 4> reports;
  std::array<double, 4> savings{};  // IBC_2 - IBC_k
};

/// Everything the pipeline produces on the way to the comparison.
struct ScenarioRun {
  ScheduleSolution day_ahead;          // early inflow, spot
  LoadCommitment commitment;           // PLANT, hydro plants then wind
  ScheduleSolution reforecast;         // late inflow, unconstrained
  ScheduleSolution plant_rebalance;    // scenario 2
  ScheduleSolution portfolio_rebalance;  // scenario 4
  ScenarioComparison comparison;
};

ScenarioRun run_pipeline(const ScenarioInputs& inputs);

ScenarioComparison run_scenarios(const ScenarioInputs& inputs);

/// Builds the PLANT commitment from a day-ahead schedule and the wind forecast.
LoadCommitment make_commitment(const CascadeSystem& system, const ScheduleSolution& day_ahead,
                               const WindSeries& wind_forecast);

/// Rebalance problem against the late inflow and actual wind.
RebalanceProblem make_rebalance_problem(const ScenarioInputs& inputs, const LoadCommitment& commitment);

/// Header `scenario,name,total_eur,average_eur_mwh,share_pct,traded_mwh,savings_eur`.
void write_comparison_csv(std::ostream& out, const ScenarioComparison& cmp);
/// Per-step breakdown, header `scenario,step,deviation_mwh,settlement_eur,redispatch_eur,fees_eur,cost_eur`.
void write_breakdown_csv(std::ostream& out, const ScenarioComparison& cmp);
void write_comparison_table(std::ostream& out, const ScenarioComparison& cmp);

}  // namespace hydrobal
