#include "hydrobal/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "json.hpp"

namespace hydrobal::instances {

namespace fs = std::filesystem;

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Rounded to 3 decimals so that instances survive a text round trip unchanged.
double r3(double v) { return std::round(v * 1000.0) / 1000.0; }

InflowSeries random_inflow(std::mt19937_64& rng, const CascadeSystem& sys, int steps) {
  InflowSeries in;
  for (std::size_t m = 0; m < sys.reservoirs.size(); ++m) {
    const double qmax = sys.plants[m].max_discharge();
    Series s;
    for (int t = 0; t < steps; ++t) s.push_back(r3(uniform(rng, 0.0, 0.6 * qmax)));
    in.by_reservoir[sys.reservoirs[m].id] = std::move(s);
  }
  return in;
}

}  // namespace

CascadeSystem random_system(std::mt19937_64& rng, int steps, const RandomOptions& o) {
  CascadeSystem sys;
  const int plants = uniform_int(rng, 1, o.max_plants);
  const double dt_s = 3600.0;
  for (int i = 0; i < plants; ++i) {
    HydroPlant p;
    p.id = fmt::format("P{}", i + 1);
    p.upstream_reservoir = fmt::format("R{}", i + 1);
    p.downstream_reservoir = i + 1 < plants ? fmt::format("R{}", i + 2) : std::string(kSea);
    const int nseg = uniform_int(rng, 1, o.max_segments);
    double slope = r3(uniform(rng, 2.0, 5.0));
    for (int n = 0; n < nseg; ++n) {
      p.segments.push_back({r3(uniform(rng, 5.0, 40.0)), slope});
      slope = r3(slope * uniform(rng, 0.6, 0.95));
    }
    const double pmax_all = p.max_power();
    p.p_min = r3(uniform(rng, 0.0, 0.3) * pmax_all);
    p.p_max = r3(std::max(p.p_min + 1.0, uniform(rng, 0.7, 1.0) * pmax_all));
    p.p_max = std::min(p.p_max, std::floor(pmax_all * 1000.0) / 1000.0);
    sys.plants.push_back(p);
  }
  for (int i = 0; i < plants; ++i) {
    const auto& p = sys.plants[static_cast<std::size_t>(i)];
    const double horizon = steps * p.max_discharge() * dt_s;
    Reservoir r;
    r.id = p.upstream_reservoir;
    r.r_min = 0.0;
    r.r_init = std::round(uniform(rng, 0.3, 1.5) * horizon);
    r.r_max = r.r_init + std::round(uniform(rng, 0.2, 1.5) * horizon);
    r.water_value = r3(uniform(rng, 10.0, 45.0));
    r.reference_slope = p.segments.front().slope;
    sys.reservoirs.push_back(r);
  }
  return sys;
}

DayAheadProblem random_day_ahead(std::mt19937_64& rng, const RandomOptions& o) {
  DayAheadProblem p;
  p.grid.steps = uniform_int(rng, 1, o.max_steps);
  p.system = random_system(rng, p.grid.steps, o);
  std::size_t segments = 0;
  for (const auto& plant : p.system.plants) segments += plant.segments.size();
  const int cap = std::max(1, o.max_binaries / static_cast<int>(segments));
  p.grid.steps = std::min(p.grid.steps, cap);
  p.inflow = random_inflow(rng, p.system, p.grid.steps);
  for (int t = 0; t < p.grid.steps; ++t) p.prices.push_back(r3(uniform(rng, 15.0, 60.0)));
  return p;
}

ScenarioInputs random_scenario(std::mt19937_64& rng, const RandomOptions& o) {
  ScenarioInputs in;
  const DayAheadProblem base = random_day_ahead(rng, o);
  in.system = base.system;
  in.grid = base.grid;
  in.spot = base.prices;
  in.inflow_early = base.inflow;
  in.inflow_late = base.inflow;
  for (auto& [id, s] : in.inflow_late.by_reservoir) {
    for (auto& v : s) v = r3(v * uniform(rng, 0.5, 1.5));
  }
  const double wind_cap = r3(uniform(rng, 10.0, 80.0));
  for (int t = 0; t < in.grid.steps; ++t) {
    const double f = r3(uniform(rng, 0.0, wind_cap));
    in.wind_forecast.values.push_back(f);
    in.wind_actual.values.push_back(r3(std::clamp(f + uniform(rng, -0.4, 0.4) * wind_cap, 0.0, wind_cap)));
  }
  in.wind_actual.role = WindRole::Actual;

  QuoteParams q;
  q.sensitivity = r3(uniform(rng, 0.0, 0.01));
  q.depth = 3;
  double cap = wind_cap;
  for (const auto& p : in.system.plants) cap += p.p_max;
  q.tier_volume = std::ceil(cap);
  const auto imb = system_imbalance(in.system, in.inflow_early, in.inflow_late, in.wind_forecast, in.wind_actual);
  in.quotes = synthesize_quotes(in.spot, imb, q);
  in.fees = {0.0, 0.0};
  return in;
}

HydroPlant ladder_plant() {
  const double wv = 20.0;
  const double spans[] = {87.0, 20.0, 17.0, 16.0};
  const double mcs[] = {17.1, 18.3, 21.5, 24.2};
  const double ref = ladder_reservoir().reference_slope;
  HydroPlant p;
  p.id = "ladder";
  p.p_min = 68.0;
  p.p_max = 140.0;
  p.upstream_reservoir = "ladder_lake";
  for (int n = 0; n < 4; ++n) {
    const double slope = ref * wv / mcs[n];
    p.segments.push_back({spans[n] / slope, slope});
  }
  return p;
}

Reservoir ladder_reservoir() {
  Reservoir r;
  r.id = "ladder_lake";
  r.r_min = 0.0;
  r.r_max = 5e7;
  r.r_init = 2.5e7;
  r.water_value = 20.0;
  // Chosen so that the four segments add up to 42 m3/s.
  r.reference_slope = 2606.4 / 840.0;
  return r;
}

RebalanceProblem flood_problem(LoadMode mode) {
  RebalanceProblem p;
  p.grid.steps = 3;
  const double dt_s = p.grid.step_seconds();

  HydroPlant up;
  up.id = "upper";
  up.p_min = 20.0;
  up.p_max = 100.0;
  up.segments = {{100.0, 1.0}};
  up.upstream_reservoir = "upper_lake";
  up.downstream_reservoir = "lower_lake";
  HydroPlant down;
  down.id = "lower";
  down.p_min = 30.0;
  down.p_max = 132.0;
  down.segments = {{40.0, 3.3}};
  down.upstream_reservoir = "lower_lake";

  Reservoir upper{"upper_lake", 0.0, 1e7, 5e6, 20.0, 4.4};
  Reservoir lower{"lower_lake", 0.0, 1e6, 1e6 - 60.0 * dt_s, 20.0, 3.3};
  p.system.plants = {up, down};
  p.system.reservoirs = {upper, lower};
  p.inflow.by_reservoir["upper_lake"] = {0.0, 0.0, 0.0};
  p.inflow.by_reservoir["lower_lake"] = {0.0, 50.0, 0.0};
  p.prices = {30.0, 30.0, 30.0};
  p.quotes.steps.resize(3);

  LoadCommitment plant;
  plant.mode = LoadMode::Plant;
  plant.units = {"upper", "lower"};
  plant.series = {{60.0, 60.0, 60.0}, {66.0, 66.0, 66.0}};
  p.commitment = mode == LoadMode::Plant ? plant : to_portfolio(plant);
  return p;
}

ScenarioInputs demo_inputs() {
  ScenarioInputs in;
  in.grid.start = "2020-10-07T00:00";
  in.grid.steps = 24;
  in.grid.step_hours = 1.0;

  HydroPlant upper;
  upper.id = "upper";
  upper.p_min = 20.0;
  upper.p_max = 160.0;
  upper.segments = {{30.0, 4.0}, {15.0, 3.6}};
  upper.upstream_reservoir = "lake";
  upper.downstream_reservoir = "pond";
  HydroPlant lower;
  lower.id = "lower";
  lower.p_min = 15.0;
  lower.p_max = 140.0;
  lower.segments = {{40.0, 2.5}, {20.0, 2.2}};
  lower.upstream_reservoir = "pond";
  in.system.plants = {upper, lower};
  in.system.reservoirs = {{"lake", 0.5e6, 4.0e6, 1.0e6, 15.0, 6.5}, {"pond", 0.1e6, 0.45e6, 0.4e6, 15.0, 2.5}};

  const double spot[24] = {24.1, 22.8, 21.9, 21.5, 22.0, 24.6, 30.2, 38.5, 42.7, 40.1, 37.4, 35.0,
                           33.2, 32.5, 32.9, 34.8, 38.9, 44.6, 46.3, 41.2, 36.0, 31.4, 28.3, 25.7};
  in.spot.assign(std::begin(spot), std::end(spot));

  Series lake_e, lake_l, pond_e, pond_l;
  for (int t = 0; t < 24; ++t) {
    const double phase = 2.0 * std::numbers::pi * t / 24.0;
    lake_e.push_back(r3(22.0 + 3.0 * std::sin(phase)));
    // The late forecast revises the lake inflow down in the afternoon.
    lake_l.push_back(r3(lake_e.back() * (t >= 12 ? 0.8 : 0.95)));
    pond_e.push_back(r3(6.0 + 1.5 * std::cos(phase)));
    pond_l.push_back(r3(pond_e.back() * (t >= 8 ? 2.5 : 1.2)));
    const double f = r3(55.0 + 25.0 * std::sin(phase - 1.0));
    in.wind_forecast.values.push_back(f);
    in.wind_actual.values.push_back(r3(std::max(0.0, f + 12.0 * std::sin(3.0 * phase) - 4.0)));
  }
  in.inflow_early.by_reservoir = {{"lake", lake_e}, {"pond", pond_e}};
  in.inflow_late.by_reservoir = {{"lake", lake_l}, {"pond", pond_l}};
  in.wind_actual.role = WindRole::Actual;

  const io::RunConfig cfg = demo_config();
  const auto imb = system_imbalance(in.system, in.inflow_early, in.inflow_late, in.wind_forecast, in.wind_actual);
  in.quotes = synthesize_quotes(in.spot, imb, cfg.market);
  in.fees = cfg.fees;
  in.solver = cfg.solver;
  return in;
}

io::RunConfig demo_config() {
  io::RunConfig c;
  c.market.spread_frac = 0.15;
  c.market.sensitivity = 0.01;
  c.market.depth = 3;
  c.market.tier_volume = 25.0;
  return c;
}

namespace {

void write_series(const fs::path& path, const Series& s) {
  std::string out = "step,value\n";
  for (std::size_t t = 0; t < s.size(); ++t) out += fmt::format("{},{}\n", t, s[t]);
  io::write_text(path, out);
}

void write_inflow(const fs::path& path, const CascadeSystem& sys, const InflowSeries& in) {
  std::string out = "step";
  for (const auto& r : sys.reservoirs) out += "," + r.id;
  out += "\n";
  const std::size_t T = in.at(sys.reservoirs.front().id).size();
  for (std::size_t t = 0; t < T; ++t) {
    out += fmt::format("{}", t);
    for (const auto& r : sys.reservoirs) out += fmt::format(",{}", in.at(r.id)[t]);
    out += "\n";
  }
  io::write_text(path, out);
}

}  // namespace

fs::path write_instance(const fs::path& dir, const ScenarioInputs& in, const io::RunConfig& params) {
  using nlohmann::ordered_json;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));

  ordered_json sys;
  sys["grid"] = {{"start", in.grid.start}, {"steps", in.grid.steps}, {"step_hours", in.grid.step_hours}};
  sys["reservoirs"] = ordered_json::array();
  for (const auto& r : in.system.reservoirs) {
    sys["reservoirs"].push_back({{"id", r.id},
                                 {"r_min", r.r_min},
                                 {"r_max", r.r_max},
                                 {"r_init", r.r_init},
                                 {"water_value", r.water_value},
                                 {"reference_slope", r.reference_slope}});
  }
  sys["plants"] = ordered_json::array();
  for (const auto& p : in.system.plants) {
    ordered_json segs = ordered_json::array();
    for (const auto& s : p.segments) segs.push_back({{"width", s.width}, {"slope", s.slope}});
    sys["plants"].push_back({{"id", p.id},
                             {"p_min", p.p_min},
                             {"p_max", p.p_max},
                             {"upstream", p.upstream_reservoir},
                             {"downstream", p.downstream_reservoir},
                             {"segments", segs}});
  }
  io::write_text(dir / "system.json", sys.dump(2) + "\n");
  write_inflow(dir / "inflow_early.csv", in.system, in.inflow_early);
  write_inflow(dir / "inflow_late.csv", in.system, in.inflow_late);
  write_series(dir / "wind_forecast.csv", in.wind_forecast.values);
  write_series(dir / "wind_actual.csv", in.wind_actual.values);
  write_series(dir / "spot.csv", in.spot);

  ordered_json cfg;
  cfg["system"] = "system.json";
  cfg["inflow_early"] = "inflow_early.csv";
  cfg["inflow_late"] = "inflow_late.csv";
  cfg["wind_forecast"] = "wind_forecast.csv";
  cfg["wind_actual"] = "wind_actual.csv";
  cfg["spot"] = "spot.csv";
  cfg["market"] = {{"spread_frac", params.market.spread_frac},
                   {"sensitivity", params.market.sensitivity},
                   {"depth", params.market.depth},
                   {"tier_volume", params.market.tier_volume}};
  cfg["fees"] = {{"trade_fee", in.fees.trade_fee}, {"imbalance_fee", in.fees.imbalance_fee}};
  cfg["solver"] = {{"mip_gap", in.solver.mip_gap},
                   {"lp_tolerance", in.solver.lp_tolerance},
                   {"max_nodes", in.solver.max_nodes}};
  cfg["out"] = "out";
  const fs::path path = dir / "config.json";
  io::write_text(path, cfg.dump(2) + "\n");
  return path;
}

}  // namespace hydrobal::instances
