#include "hydrobal/pipeline.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "hydrobal/instances.hpp"
#include "hydrobal/marginal_cost.hpp"

namespace hydrobal::pipeline {

namespace fs = std::filesystem;
using io::num;

Context load(const LoadOptions& o) {
  Context ctx;
  ctx.mps_dump = o.mps_dump;
  if (o.config) {
    ctx.config = io::read_run_config(*o.config);
  } else if (o.seed) {
    const fs::path base = o.out.value_or("out");
    std::mt19937_64 rng(*o.seed);
    const ScenarioInputs in = instances::random_scenario(rng);
    io::RunConfig params;
    params.market.sensitivity = 0.01;
    const fs::path cfg = instances::write_instance(base / "instance", in, params);
    ctx.config = io::read_run_config(cfg);
    ctx.config.out = base;
  } else {
    throw ValidationError("either --config or --seed is required");
  }
  if (o.out) ctx.config.out = *o.out;
  ctx.out = ctx.config.out;
  ctx.inputs = io::load_inputs(ctx.config);
  return ctx;
}

std::string schedule_csv(const CascadeSystem& system, const ScheduleSolution& s) {
  std::string out = "unit,step,generation_mw,discharge_m3s,reservoir_m3,spill_m3s\n";
  for (std::size_t i = 0; i < system.plants.size(); ++i) {
    for (int t = 0; t < s.steps(); ++t) {
      const auto ut = static_cast<std::size_t>(t);
      out += fmt::format("{},{},{},{},{},{}\n", system.plants[i].id, t, num(s.generation[i][ut]),
                         num(s.discharge(i, ut)), num(s.reservoir[i][ut]), num(s.spill[i][ut]));
    }
  }
  return out;
}

std::string commitment_csv(const LoadCommitment& c) {
  std::string out = "unit,step,mw\n";
  for (std::size_t u = 0; u < c.series.size(); ++u) {
    const std::string name = c.mode == LoadMode::Portfolio ? "portfolio" : c.units[u];
    for (std::size_t t = 0; t < c.series[u].size(); ++t) {
      out += fmt::format("{},{},{}\n", name, t, c.series[u][t]);
    }
  }
  return out;
}

std::string fills_csv(const std::vector<Fill>& fills) {
  std::string out = "step,side,price,volume,counter_tier\n";
  for (const auto& f : fills) {
    out += fmt::format("{},{},{},{},{}\n", f.step, f.side == TradeSide::Buy ? "BUY" : "SELL", num(f.price),
                       num(f.volume), f.tier);
  }
  return out;
}

std::string quotes_csv(const QuoteLadder& q) {
  std::string out = "step,side,tier,price_eur_mwh,volume_mwh\n";
  for (int t = 0; t < q.size(); ++t) {
    const auto& s = q.steps[static_cast<std::size_t>(t)];
    for (const auto& tier : s.bids) {
      out += fmt::format("{},BID,{},{},{}\n", t, tier.index, num(tier.price), num(tier.volume));
    }
    for (const auto& tier : s.asks) {
      out += fmt::format("{},ASK,{},{},{}\n", t, tier.index, num(tier.price), num(tier.volume));
    }
  }
  return out;
}

std::string mc_csv(const DualReport& d) {
  std::string out = "unit,step,mc_eur_mwh\n";
  for (std::size_t u = 0; u < d.units.size(); ++u) {
    for (std::size_t t = 0; t < d.load_mc[u].size(); ++t) {
      out += fmt::format("{},{},{}\n", d.units[u], t, num(d.load_mc[u][t]));
    }
  }
  return out;
}

LoadCommitment read_commitment(const fs::path& path, const CascadeSystem& system, int steps) {
  std::istringstream in(io::read_text(path));
  std::string line;
  if (!std::getline(in, line) || line != "unit,step,mw") {
    throw ValidationError(fmt::format("{}: expected header unit,step,mw", path.string()));
  }
  std::map<std::string, Series> rows;
  std::vector<std::string> order;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string unit, step, mw;
    if (!std::getline(ls, unit, ',') || !std::getline(ls, step, ',') || !std::getline(ls, mw)) {
      throw ValidationError(fmt::format("{}: malformed row '{}'", path.string(), line));
    }
    if (!rows.count(unit)) order.push_back(unit);
    auto& s = rows[unit];
    try {
      if (std::stoi(step) != static_cast<int>(s.size())) throw ValidationError("");
      s.push_back(std::stod(mw));
    } catch (const std::exception&) {
      throw ValidationError(fmt::format("{}: bad row '{}'", path.string(), line));
    }
  }
  LoadCommitment c;
  c.mode = LoadMode::Plant;
  for (const auto& p : system.plants) {
    if (!rows.count(p.id)) throw ValidationError(fmt::format("{}: no rows for plant '{}'", path.string(), p.id));
    c.units.push_back(p.id);
    c.series.push_back(rows[p.id]);
  }
  if (rows.count(kWindUnit)) {
    c.units.push_back(kWindUnit);
    c.series.push_back(rows[kWindUnit]);
  }
  for (const auto& s : c.series) {
    if (static_cast<int>(s.size()) != steps) {
      throw ValidationError(fmt::format("{}: expected {} rows per unit", path.string(), steps));
    }
  }
  return c;
}

namespace {

DayAheadProblem early_problem(const ScenarioInputs& in) { return {in.system, in.inflow_early, in.spot, in.grid}; }
DayAheadProblem late_problem(const ScenarioInputs& in) { return {in.system, in.inflow_late, in.spot, in.grid}; }

std::string mps_text(const lp::Model& m) {
  std::ostringstream ss;
  lp::write_mps(m, ss);
  return ss.str();
}

void add_day_ahead(const Context& ctx, const ScheduleSolution& da, const LoadCommitment& com, Outputs& out) {
  const auto& in = ctx.inputs;
  out["day_ahead_schedule.csv"] = schedule_csv(in.system, da);
  out["commitment.csv"] = commitment_csv(com);
  for (std::size_t i = 0; i < in.system.plants.size(); ++i) {
    const auto& plant = in.system.plants[i];
    const BidLadder ladder = build_ladder(plant, in.system.reservoirs[i], da.generation[i], in.grid.step_hours);
    std::ostringstream ss;
    write_ladder_csv(ss, ladder);
    out[fmt::format("ladder_{}.csv", plant.id)] = ss.str();
  }
  if (ctx.mps_dump) out["day_ahead.mps"] = mps_text(build_day_ahead_model(early_problem(in)));
}

void add_reforecast(const Context& ctx, const ScheduleSolution& rf, const LoadCommitment& com, Outputs& out) {
  const auto& in = ctx.inputs;
  const auto T = static_cast<std::size_t>(in.grid.steps);
  out["reforecast_schedule.csv"] = schedule_csv(in.system, rf);
  std::string csv = "step";
  for (const auto& p : in.system.plants) csv += "," + p.id;
  csv += ",hydro,wind,total\n";
  for (std::size_t t = 0; t < T; ++t) {
    csv += fmt::format("{}", t);
    double hydro = 0.0;
    for (std::size_t i = 0; i < in.system.plants.size(); ++i) {
      const double d = rf.generation[i][t] - com.series[i][t];
      hydro += d;
      csv += "," + num(d);
    }
    const double wind = in.wind_actual.values[t] - in.wind_forecast.values[t];
    csv += fmt::format(",{},{},{}\n", num(hydro), num(wind), num(hydro + wind));
  }
  out["imbalance.csv"] = csv;
}

void add_quotes(const Context& ctx, Outputs& out) {
  const auto& in = ctx.inputs;
  out["quotes.csv"] = quotes_csv(in.quotes);
  const auto imb = system_imbalance(in.system, in.inflow_early, in.inflow_late, in.wind_forecast, in.wind_actual);
  std::string csv = "step,value\n";
  for (std::size_t t = 0; t < imb.mw.size(); ++t) csv += fmt::format("{},{}\n", t, num(imb.mw[t]));
  out["system_imbalance.csv"] = csv;
}

void add_rebalance(const Context& ctx, const RebalanceProblem& p, const ScheduleSolution& s, Outputs& out) {
  const std::string tag = p.commitment.mode == LoadMode::Plant ? "plant" : "portfolio";
  out[fmt::format("rebalance_{}_schedule.csv", tag)] = schedule_csv(p.system, s);
  out[fmt::format("rebalance_{}_fills.csv", tag)] = fills_csv(s.fills);
  out[fmt::format("rebalance_{}_mc.csv", tag)] = mc_csv(dynamic_mc(p, s, p.commitment.mode, ctx.inputs.solver));
  if (ctx.mps_dump) out[fmt::format("rebalance_{}.mps", tag)] = mps_text(build_rebalance_model(p));
}

LoadCommitment stored_commitment(const Context& ctx) {
  const fs::path path = ctx.out / "commitment.csv";
  if (!fs::exists(path)) {
    throw IoError(fmt::format("'{}' not found; run the day-ahead step first", path.string()));
  }
  return read_commitment(path, ctx.inputs.system, ctx.inputs.grid.steps);
}

}  // namespace

Outputs day_ahead(const Context& ctx) {
  Outputs out;
  const auto da = solve_day_ahead(early_problem(ctx.inputs), ctx.inputs.solver);
  add_day_ahead(ctx, da, make_commitment(ctx.inputs.system, da, ctx.inputs.wind_forecast), out);
  return out;
}

Outputs reforecast(const Context& ctx) {
  Outputs out;
  const LoadCommitment com = stored_commitment(ctx);
  add_reforecast(ctx, solve_day_ahead(late_problem(ctx.inputs), ctx.inputs.solver), com, out);
  return out;
}

Outputs quotes(const Context& ctx) {
  Outputs out;
  add_quotes(ctx, out);
  return out;
}

Outputs rebalance(const Context& ctx, LoadMode mode) {
  Outputs out;
  LoadCommitment com = stored_commitment(ctx);
  if (mode == LoadMode::Portfolio) com = to_portfolio(com);
  const RebalanceProblem p = make_rebalance_problem(ctx.inputs, com);
  add_rebalance(ctx, p, solve_rebalance(p, ctx.inputs.solver), out);
  return out;
}

Outputs run(const Context& ctx) {
  const auto& in = ctx.inputs;
  const ScenarioRun r = run_pipeline(in);
  Outputs out;
  add_day_ahead(ctx, r.day_ahead, r.commitment, out);
  add_reforecast(ctx, r.reforecast, r.commitment, out);
  add_quotes(ctx, out);
  add_rebalance(ctx, make_rebalance_problem(in, r.commitment), r.plant_rebalance, out);
  add_rebalance(ctx, make_rebalance_problem(in, to_portfolio(r.commitment)), r.portfolio_rebalance, out);

  for (std::size_t k = 0; k < r.comparison.reports.size(); ++k) {
    out[fmt::format("scenario{}_fills.csv", k + 1)] = fills_csv(r.comparison.reports[k].fills);
  }
  std::ostringstream csv, breakdown, table;
  write_comparison_csv(csv, r.comparison);
  write_breakdown_csv(breakdown, r.comparison);
  write_comparison_table(table, r.comparison);
  out["scenarios.csv"] = csv.str();
  out["scenarios_breakdown.csv"] = breakdown.str();
  out["scenarios.txt"] = table.str();

  // Hydro production of the proactive scenario minus the base case.
  std::string delta = "step";
  for (const auto& p : in.system.plants) delta += "," + p.id;
  delta += ",total\n";
  for (int t = 0; t < in.grid.steps; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    delta += fmt::format("{}", t);
    double total = 0.0;
    for (std::size_t i = 0; i < in.system.plants.size(); ++i) {
      const double d = r.portfolio_rebalance.generation[i][ut] - r.plant_rebalance.generation[i][ut];
      total += d;
      delta += "," + num(d);
    }
    delta += "," + num(total) + "\n";
  }
  out["production_delta.csv"] = delta;
  return out;
}

std::string describe(const Context& ctx) {
  const auto& in = ctx.inputs;
  std::string s = fmt::format("grid: {} steps of {} h from {}\n", in.grid.steps, in.grid.step_hours, in.grid.start);
  for (std::size_t i = 0; i < in.system.plants.size(); ++i) {
    const auto& p = in.system.plants[i];
    s += fmt::format("plant {}: {}-{} MW, {} segments, {} -> {}\n", p.id, num(p.p_min), num(p.p_max),
                     p.segments.size(), p.upstream_reservoir, p.downstream_reservoir);
  }
  for (const auto& r : in.system.reservoirs) {
    s += fmt::format("reservoir {}: [{}, {}] m3, start {}, water value {} EUR/MWh\n", r.id, num(r.r_min),
                     num(r.r_max), num(r.r_init), num(r.water_value));
  }
  s += fmt::format("quotes: {} steps, fees {} / {} EUR/MWh\n", in.quotes.size(), num(in.fees.trade_fee),
                   num(in.fees.imbalance_fee));
  return s;
}

void commit(const fs::path& dir, const Outputs& outputs) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  // Stage next to the targets, then rename, so a failed write leaves no partial file set.
  std::vector<std::pair<fs::path, fs::path>> staged;
  try {
    for (const auto& [name, content] : outputs) {
      const fs::path tmp = dir / (name + ".tmp");
      io::write_text(tmp, content);
      staged.emplace_back(tmp, dir / name);
    }
  } catch (...) {
    for (const auto& [tmp, target] : staged) fs::remove(tmp, ec);
    throw;
  }
  for (const auto& [tmp, target] : staged) {
    fs::rename(tmp, target, ec);
    if (ec) throw IoError(fmt::format("cannot write '{}': {}", target.string(), ec.message()));
  }
}

}  // namespace hydrobal::pipeline
