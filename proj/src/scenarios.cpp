#include "hydrobal/scenarios.hpp"

#include <cmath>
#include <future>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "hydrobal/settlement.hpp"

namespace hydrobal {

namespace {

constexpr double kMinOrder = 1e-9;  // MWh; smaller deviations are not sent to the market

/// Market outcome of one scenario.
struct Trading {
  std::vector<Fill> fills;
  Series residual;       // MWh unfilled
  Series residual_cash;  // EUR, signed like trade cash
};

/// Stored-water value gained in step t: inflow from upstream turbines minus own
/// discharge and spill, valued per reservoir. External inflow is left out; it
/// is the same in every scenario.
double water_gain(const CascadeSystem& sys, const ScheduleSolution& s, std::size_t t, double dt_s) {
  double v = 0.0;
  for (std::size_t m = 0; m < sys.reservoirs.size(); ++m) {
    double flow = -s.discharge(m, t) - s.spill[m][t];
    if (m > 0) flow += s.discharge(m - 1, t);
    v += sys.reservoirs[m].value_per_m3() * dt_s * flow;
  }
  return v;
}

double hydro_total(const ScheduleSolution& s, std::size_t t) {
  double g = 0.0;
  for (const auto& row : s.generation) g += row[t];
  return g;
}

double worst_price(const std::vector<Tier>& side, double fallback) {
  return side.empty() ? fallback : side.back().price;
}

void clear_deviation(const ScenarioInputs& in, QuoteLadder& book, Trading& tr, std::size_t t,
                     double surplus, std::size_t account) {
  if (std::abs(surplus) < kMinOrder) return;
  const ClearResult r = clear_imbalance(static_cast<int>(t), surplus, book, account);
  tr.fills.insert(tr.fills.end(), r.fills.begin(), r.fills.end());
  if (r.remainder > 0.0) {
    const auto& q = in.quotes.steps[t];
    tr.residual[t] += r.remainder;
    if (surplus > 0.0) {
      tr.residual_cash[t] += r.remainder * worst_price(q.bids, in.spot[t]);
    } else {
      tr.residual_cash[t] -= r.remainder * worst_price(q.asks, in.spot[t]);
    }
  }
}

ImbalanceReport evaluate(std::string name, const ScenarioInputs& in, const LoadCommitment& com,
                         const ScheduleSolution& reference, const ScheduleSolution& schedule,
                         const Trading& tr) {
  const std::size_t T = static_cast<std::size_t>(in.grid.steps);
  const double dt_h = in.grid.step_hours;
  const double dt_s = in.grid.step_seconds();

  ImbalanceReport rep;
  rep.name = std::move(name);
  rep.fills = tr.fills;
  rep.residual = tr.residual;
  Series cash = tr.residual_cash;
  Series traded(T, 0.0);
  for (const auto& f : tr.fills) {
    const auto t = static_cast<std::size_t>(f.step);
    cash[t] += (f.side == TradeSide::Sell ? 1.0 : -1.0) * f.price * f.volume;
    traded[t] += f.volume;
  }

  for (std::size_t t = 0; t < T; ++t) {
    const double lambda = in.spot[t];
    const double actual = (hydro_total(schedule, t) + in.wind_actual.values[t]) * dt_h;
    double committed = 0.0;
    for (const auto& s : com.series) committed += s[t] * dt_h;

    const double settlement = lambda * (actual - committed) - cash[t];
    const double redispatch = lambda * (hydro_total(reference, t) - hydro_total(schedule, t)) * dt_h +
                              water_gain(in.system, reference, t, dt_s) -
                              water_gain(in.system, schedule, t, dt_s);
    const double fee = in.fees.trade_fee * traded[t] + in.fees.imbalance_fee * tr.residual[t];

    rep.deviation.push_back(actual - committed);
    rep.settlement.push_back(settlement);
    rep.redispatch.push_back(redispatch);
    rep.fees.push_back(fee);
    rep.cost.push_back(settlement + redispatch + fee);
    rep.total += rep.cost.back();
    rep.actual_mwh += actual;
    rep.income += lambda * committed;
    rep.traded_mwh += traded[t];
  }
  Series actual_series;
  for (std::size_t t = 0; t < T; ++t) {
    actual_series.push_back((hydro_total(schedule, t) + in.wind_actual.values[t]) * dt_h);
  }
  rep.average = average_cost(rep.cost, actual_series);
  rep.share_pct = rep.income > 0.0 ? 100.0 * rep.total / rep.income : 0.0;
  return rep;
}

Trading empty_trading(std::size_t T) { return {{}, Series(T, 0.0), Series(T, 0.0)}; }

Trading from_solution(const ScheduleSolution& s, std::size_t T) {
  Trading tr = empty_trading(T);
  tr.fills = s.fills;
  return tr;
}

void check_inputs(const ScenarioInputs& in) {
  const auto T = static_cast<std::size_t>(in.grid.steps);
  if (in.spot.size() != T) throw ValidationError("spot series length differs from grid");
  if (in.wind_forecast.values.size() != T || in.wind_actual.values.size() != T) {
    throw ValidationError("wind series length differs from grid");
  }
  if (static_cast<std::size_t>(in.quotes.size()) != T) {
    throw ValidationError(fmt::format("missing quotes: ladder covers {} of {} steps", in.quotes.size(), T));
  }
  const auto qv = validate_quotes(in.quotes);
  if (!qv.empty()) throw ValidationError(fmt::format("{}: {}", qv.front().subject, qv.front().message));
  if (!(in.fees.trade_fee >= 0.0) || !(in.fees.imbalance_fee >= 0.0)) {
    throw ValidationError("fees must be >= 0");
  }
}

}  // namespace

LoadCommitment make_commitment(const CascadeSystem& system, const ScheduleSolution& day_ahead,
                               const WindSeries& wind_forecast) {
  LoadCommitment c;
  c.mode = LoadMode::Plant;
  for (std::size_t i = 0; i < system.plants.size(); ++i) {
    c.units.push_back(system.plants[i].id);
    c.series.push_back(day_ahead.generation.at(i));
  }
  c.units.push_back(kWindUnit);
  c.series.push_back(wind_forecast.values);
  return c;
}

RebalanceProblem make_rebalance_problem(const ScenarioInputs& in, const LoadCommitment& commitment) {
  RebalanceProblem p;
  p.system = in.system;
  p.inflow = in.inflow_late;
  p.prices = in.spot;
  p.grid = in.grid;
  p.commitment = commitment;
  p.quotes = in.quotes;
  p.wind_actual = in.wind_actual;
  p.trade_fee = in.fees.trade_fee;
  return p;
}

ScenarioRun run_pipeline(const ScenarioInputs& in) {
  check_inputs(in);
  const auto T = static_cast<std::size_t>(in.grid.steps);
  const double dt_h = in.grid.step_hours;
  ScenarioRun run;

  DayAheadProblem early{in.system, in.inflow_early, in.spot, in.grid};
  run.day_ahead = solve_day_ahead(early, in.solver);
  run.commitment = make_commitment(in.system, run.day_ahead, in.wind_forecast);

  DayAheadProblem late{in.system, in.inflow_late, in.spot, in.grid};
  run.reforecast = solve_day_ahead(late, in.solver);

  const RebalanceProblem plant = make_rebalance_problem(in, run.commitment);
  const RebalanceProblem portfolio = make_rebalance_problem(in, to_portfolio(run.commitment));
  auto plant_job = std::async(std::launch::async, [&] { return solve_rebalance(plant, in.solver); });
  run.portfolio_rebalance = solve_rebalance(portfolio, in.solver);
  run.plant_rebalance = plant_job.get();

  const auto& com = run.commitment;
  const std::size_t I = in.system.plants.size();
  auto& reports = run.comparison.reports;

  {
    QuoteLadder book = in.quotes;
    Trading tr = empty_trading(T);
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t i = 0; i < I; ++i) {
        clear_deviation(in, book, tr, t, (run.reforecast.generation[i][t] - com.series[i][t]) * dt_h, i);
      }
      clear_deviation(in, book, tr, t, (in.wind_actual.values[t] - com.series[I][t]) * dt_h, I);
    }
    reports[0] = evaluate("individual, no optimization", in, com, run.reforecast, run.reforecast, tr);
  }
  reports[1] = evaluate("individual, hydro optimized", in, com, run.reforecast, run.plant_rebalance,
                        from_solution(run.plant_rebalance, T));
  {
    QuoteLadder book = in.quotes;
    Trading tr = empty_trading(T);
    for (std::size_t t = 0; t < T; ++t) {
      double net = in.wind_actual.values[t] - com.series[I][t];
      for (std::size_t i = 0; i < I; ++i) net += run.reforecast.generation[i][t] - com.series[i][t];
      clear_deviation(in, book, tr, t, net * dt_h, 0);
    }
    reports[2] = evaluate("common, reactive", in, com, run.reforecast, run.reforecast, tr);
  }
  reports[3] = evaluate("common, proactive", in, com, run.reforecast, run.portfolio_rebalance,
                        from_solution(run.portfolio_rebalance, T));

  for (std::size_t k = 0; k < 4; ++k) run.comparison.savings[k] = reports[1].total - reports[k].total;
  return run;
}

ScenarioComparison run_scenarios(const ScenarioInputs& inputs) { return run_pipeline(inputs).comparison; }

void write_comparison_csv(std::ostream& out, const ScenarioComparison& cmp) {
  out << "scenario,name,total_eur,average_eur_mwh,share_pct,traded_mwh,savings_eur\n";
  for (std::size_t k = 0; k < cmp.reports.size(); ++k) {
    const auto& r = cmp.reports[k];
    fmt::print(out, "{},{},{:.6g},{:.6g},{:.6g},{:.6g},{:.6g}\n", k + 1, r.name, r.total, r.average,
               r.share_pct, r.traded_mwh, cmp.savings[k]);
  }
}

void write_breakdown_csv(std::ostream& out, const ScenarioComparison& cmp) {
  out << "scenario,step,deviation_mwh,settlement_eur,redispatch_eur,fees_eur,cost_eur\n";
  for (std::size_t k = 0; k < cmp.reports.size(); ++k) {
    const auto& r = cmp.reports[k];
    for (std::size_t t = 0; t < r.cost.size(); ++t) {
      fmt::print(out, "{},{},{:.6g},{:.6g},{:.6g},{:.6g},{:.6g}\n", k + 1, t, r.deviation[t],
                 r.settlement[t], r.redispatch[t], r.fees[t], r.cost[t]);
    }
  }
}

void write_comparison_table(std::ostream& out, const ScenarioComparison& cmp) {
  fmt::print(out, "{:<3} {:<30} {:>12} {:>12} {:>10} {:>12}\n", "#", "scenario", "IBC [EUR]",
             "avg [EUR/MWh]", "% income", "saving [EUR]");
  for (std::size_t k = 0; k < cmp.reports.size(); ++k) {
    const auto& r = cmp.reports[k];
    fmt::print(out, "{:<3} {:<30} {:>12.2f} {:>12.3f} {:>10.3f} {:>12.2f}\n", k + 1, r.name, r.total,
               r.average, r.share_pct, cmp.savings[k]);
  }
}

}  // namespace hydrobal
