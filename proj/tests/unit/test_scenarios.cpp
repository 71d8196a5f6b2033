#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "hydrobal/instances.hpp"
#include "hydrobal/scenarios.hpp"
#include "hydrobal/settlement.hpp"

using namespace hydrobal;

namespace {

/// One plant that turbines all of its inflow and a wind park; the late
/// inflow adds 15 MWh of hydro while wind falls 15 MWh short.
ScenarioInputs complementary() {
  ScenarioInputs in;
  in.grid.steps = 1;
  in.system.reservoirs = {testutil::reservoir("r", 0.0, 1e6, 0.0, 1.0, 2.0)};
  in.system.plants = {testutil::plant("h", 0.0, 200.0, {{100.0, 2.0}}, "r")};
  in.inflow_early.by_reservoir["r"] = {10.0};
  in.inflow_late.by_reservoir["r"] = {17.5};
  in.wind_forecast = {{30.0}, WindRole::Forecast};
  in.wind_actual = {{15.0}, WindRole::Actual};
  in.spot = {20.0};
  QuoteParams qp;
  qp.tier_volume = 100.0;
  in.quotes = synthesize_quotes(in.spot, system_imbalance(in.system, in.inflow_early, in.inflow_late,
                                                          in.wind_forecast, in.wind_actual),
                                qp);
  in.fees = {0.0, 0.0};
  return in;
}

ScenarioInputs demo_with_market(double spread, double tier_volume, FeeSchedule fees) {
  ScenarioInputs in = instances::demo_inputs();
  QuoteParams qp;
  qp.spread_frac = spread;
  qp.sensitivity = 0.0;
  qp.tier_volume = tier_volume;
  in.quotes = synthesize_quotes(
      in.spot, system_imbalance(in.system, in.inflow_early, in.inflow_late, in.wind_forecast, in.wind_actual), qp);
  in.fees = fees;
  return in;
}

double sum(const Series& s) {
  double v = 0.0;
  for (double x : s) v += x;
  return v;
}

void check_report_arithmetic(const ScenarioComparison& cmp) {
  for (const auto& r : cmp.reports) {
    CAPTURE(r.name);
    CHECK(sum(r.cost) == doctest::Approx(r.total).epsilon(1e-12).scale(1.0));
    for (std::size_t t = 0; t < r.cost.size(); ++t) {
      CHECK(r.cost[t] == doctest::Approx(r.settlement[t] + r.redispatch[t] + r.fees[t]).epsilon(1e-12).scale(1.0));
    }
    if (r.actual_mwh > 0.0) CHECK(r.average * r.actual_mwh == doctest::Approx(r.total).epsilon(1e-12).scale(1.0));
  }
  for (int k = 0; k < 4; ++k) CHECK(cmp.savings[static_cast<std::size_t>(k)] == cmp.reports[1].total - cmp.reports[static_cast<std::size_t>(k)].total);
}

}  // namespace

TEST_SUITE("scenarios") {

TEST_CASE("no revisions, no cost") {
  ScenarioInputs in = instances::demo_inputs();
  in.inflow_late = in.inflow_early;
  in.wind_actual.values = in.wind_forecast.values;
  in.quotes = synthesize_quotes(in.spot, {Series(in.spot.size(), 0.0)}, {});
  const auto cmp = run_scenarios(in);
  for (const auto& r : cmp.reports) {
    CAPTURE(r.name);
    CHECK(std::abs(r.total) < 1e-6);
    CHECK(r.fills.empty());
    CHECK(r.traded_mwh == 0.0);
  }
  check_report_arithmetic(cmp);
}

TEST_CASE("complementary imbalances: netting saves the spread") {
  const auto in = complementary();
  CHECK(in.quotes.best_bid(0) == doctest::Approx(17.0));
  CHECK(in.quotes.best_ask(0) == doctest::Approx(23.0));
  const auto cmp = run_scenarios(in);
  CHECK(cmp.reports[0].total == doctest::Approx(90.0));
  CHECK(cmp.reports[2].total == doctest::Approx(0.0));
  CHECK(cmp.reports[0].total - cmp.reports[2].total == doctest::Approx(6.0 * 15.0));
  CHECK(cmp.reports[3].total == doctest::Approx(0.0));
  CHECK(cmp.reports[0].deviation[0] == doctest::Approx(0.0));
  check_report_arithmetic(cmp);
}

TEST_CASE("reactive netting identity on random instances") {
  std::mt19937_64 rng(61);
  for (int k = 0; k < 20; ++k) {
    const ScenarioInputs in = instances::random_scenario(rng);
    const ScenarioRun run = run_pipeline(in);
    const auto& r1 = run.comparison.reports[0];
    const auto& r3 = run.comparison.reports[2];
    const double dh = in.grid.step_hours;
    for (std::size_t t = 0; t < static_cast<std::size_t>(in.grid.steps); ++t) {
      double sells = 0.0, buys = 0.0;
      for (std::size_t i = 0; i < in.system.plants.size(); ++i) {
        const double d = (run.reforecast.generation[i][t] - run.commitment.series[i][t]) * dh;
        (d > 0 ? sells : buys) += std::abs(d);
      }
      const double w = (in.wind_actual.values[t] - in.wind_forecast.values[t]) * dh;
      (w > 0 ? sells : buys) += std::abs(w);
      const double spread = in.quotes.best_ask(static_cast<int>(t)) - in.quotes.best_bid(static_cast<int>(t));
      CAPTURE(k);
      CAPTURE(t);
      CHECK(r1.cost[t] - r3.cost[t] == doctest::Approx(spread * std::min(sells, buys)).epsilon(1e-9).scale(1.0));
    }
    check_report_arithmetic(run.comparison);
  }
}

TEST_CASE("a deep, tight market leaves nothing to gain from netting") {
  // The quote synthesis keeps at least 1% of spot between bid and ask, which
  // spread_frac = 0.005 reaches.
  double previous = 1e300;
  for (double spread : {0.15, 0.05, 0.005}) {
    const auto cmp = run_scenarios(demo_with_market(spread, 1e5, {0.0, 0.0}));
    MESSAGE("spread " << spread << ": IBC " << cmp.reports[0].total << " / " << cmp.reports[1].total << " / "
                      << cmp.reports[2].total << " / " << cmp.reports[3].total);
    CHECK(std::abs(cmp.savings[2]) < previous);
    previous = std::abs(cmp.savings[2]);
  }
  const auto wide = run_scenarios(demo_with_market(0.15, 1e5, {0.0, 0.0}));
  const auto tight = run_scenarios(demo_with_market(0.005, 1e5, {0.0, 0.0}));
  CHECK(std::abs(tight.savings[2]) < 0.05 * std::abs(wide.savings[2]));
}

TEST_CASE("demo: ordering, savings and hydro volumes") {
  const ScenarioInputs in = instances::demo_inputs();
  const ScenarioRun run = run_pipeline(in);
  const auto& r = run.comparison.reports;
  CHECK(r[3].total <= r[1].total);
  CHECK(r[1].total <= r[0].total);
  CHECK(r[3].total <= r[2].total);
  CHECK(r[2].total <= r[0].total);
  CHECK(run.comparison.savings[3] >= 0.0);
  CHECK(run.comparison.savings[1] == 0.0);
  check_report_arithmetic(run.comparison);

  // Both rebalanced schedules empty the reservoirs to the same end volume,
  // so each plant releases the same water over the day.
  for (std::size_t i = 0; i < in.system.plants.size(); ++i) {
    double q2 = 0.0, q4 = 0.0;
    for (int t = 0; t < in.grid.steps; ++t) {
      q2 += run.plant_rebalance.discharge(i, static_cast<std::size_t>(t));
      q4 += run.portfolio_rebalance.discharge(i, static_cast<std::size_t>(t));
    }
    CHECK(q4 == doctest::Approx(q2).epsilon(1e-9));
  }
  for (std::size_t m = 0; m < in.system.reservoirs.size(); ++m) {
    CHECK(run.portfolio_rebalance.reservoir[m].back() ==
          doctest::Approx(run.plant_rebalance.reservoir[m].back()).epsilon(1e-9));
  }
}

TEST_CASE("constant efficiency: total hydro energy is unchanged by internal balancing") {
  ScenarioInputs in = instances::demo_inputs();
  for (auto& p : in.system.plants) {
    const double width = p.max_discharge();
    p.segments = {{width, p.p_max / width}};
  }
  for (std::size_t m = 0; m < in.system.reservoirs.size(); ++m) {
    in.system.reservoirs[m].reference_slope = in.system.plants[m].segments[0].slope;
  }
  in.quotes = synthesize_quotes(
      in.spot, system_imbalance(in.system, in.inflow_early, in.inflow_late, in.wind_forecast, in.wind_actual), {});
  const ScenarioRun run = run_pipeline(in);
  double e2 = 0.0, e4 = 0.0;
  for (std::size_t i = 0; i < in.system.plants.size(); ++i) {
    e2 += sum(run.plant_rebalance.generation[i]);
    e4 += sum(run.portfolio_rebalance.generation[i]);
  }
  MESSAGE("hydro energy " << e2 << " MWh in both rebalanced schedules");
  CHECK(e4 == doctest::Approx(e2).epsilon(1e-9));
}

TEST_CASE("report writers") {
  const auto cmp = run_scenarios(complementary());
  std::ostringstream csv_os, breakdown_os, table_os;
  write_comparison_csv(csv_os, cmp);
  write_breakdown_csv(breakdown_os, cmp);
  write_comparison_table(table_os, cmp);
  const std::string csv = csv_os.str(), breakdown = breakdown_os.str();
  CHECK(csv.rfind("scenario,name,total_eur,average_eur_mwh,share_pct,traded_mwh,savings_eur\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(breakdown.rfind("scenario,step,deviation_mwh,settlement_eur,redispatch_eur,fees_eur,cost_eur\n", 0) == 0);
  CHECK(std::count(breakdown.begin(), breakdown.end(), '\n') == 5);
  CHECK(table_os.str().find("90") != std::string::npos);
}

TEST_CASE("inputs are validated before solving") {
  ScenarioInputs in = complementary();
  in.quotes.steps.clear();
  CHECK_THROWS_AS(run_scenarios(in), ValidationError);
  in = complementary();
  in.fees.trade_fee = -1.0;
  CHECK_THROWS_AS(run_scenarios(in), ValidationError);
}

}
