#include "hydrobal/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace hydrobal::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string num(double v) {
  if (std::abs(v) < 5e-10) v = 0.0;  // solver noise and -0 print as 0
  return fmt::format("{:.6g}", v);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw IoError(fmt::format("write failed for '{}'", path.string()));
}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    throw ValidationError(fmt::format("{}: '{}' is not a number", where, s));
  }
  return v;
}

}  // namespace

CsvTable read_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  CsvTable t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw ValidationError(fmt::format("{}:{}: expected {} columns, got {}", path.string(), lineno,
                                        t.header.size(), cells.size()));
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_double(c, fmt::format("{}:{}", path.string(), lineno)));
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw ValidationError(fmt::format("{}: empty file", path.string()));
  if (t.header.front() != "step") {
    throw ValidationError(fmt::format("{}: first column must be 'step'", path.string()));
  }
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (t.rows[r][0] != static_cast<double>(r)) {
      throw ValidationError(fmt::format("{}: steps must run 0, 1, 2, ... (row {})", path.string(), r + 1));
    }
  }
  if (t.rows.empty()) throw ValidationError(fmt::format("{}: no data rows", path.string()));
  return t;
}

Series read_series(const fs::path& path, int expected_steps) {
  const CsvTable t = read_csv(path);
  if (t.header.size() != 2) throw ValidationError(fmt::format("{}: expected header step,value", path.string()));
  if (expected_steps >= 0 && t.rows.size() != static_cast<std::size_t>(expected_steps)) {
    throw ValidationError(fmt::format("{}: {} rows, grid has {} steps", path.string(), t.rows.size(),
                                      expected_steps));
  }
  Series s;
  for (const auto& r : t.rows) s.push_back(r[1]);
  return s;
}

InflowSeries read_inflow(const fs::path& path, const CascadeSystem& system, int expected_steps) {
  const CsvTable t = read_csv(path);
  if (expected_steps >= 0 && t.rows.size() != static_cast<std::size_t>(expected_steps)) {
    throw ValidationError(fmt::format("{}: {} rows, grid has {} steps", path.string(), t.rows.size(),
                                      expected_steps));
  }
  InflowSeries out;
  for (const auto& res : system.reservoirs) {
    std::size_t col = 0;
    for (std::size_t c = 1; c < t.header.size(); ++c) {
      if (t.header[c] == res.id) col = c;
    }
    if (col == 0) throw ValidationError(fmt::format("{}: no column for reservoir '{}'", path.string(), res.id));
    Series s;
    for (const auto& r : t.rows) s.push_back(r[col]);
    out.by_reservoir[res.id] = std::move(s);
  }
  return out;
}

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(fmt::format("{}: expected an object", where));
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw ValidationError(fmt::format("{}: unknown key '{}'", where, k));
  }
}

template <typename T>
T get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ValidationError(fmt::format("{}: missing key '{}'", where, key));
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(fmt::format("{}: key '{}' has the wrong type", where, key));
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

json parse_json(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(fmt::format("{}: invalid JSON: {}", where, e.what()));
  }
}

}  // namespace

SystemConfig parse_system(const std::string& text) {
  const json j = parse_json(text, "system");
  check_keys(j, {"grid", "reservoirs", "plants"}, "system");
  SystemConfig cfg;
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    check_keys(g, {"start", "steps", "step_hours"}, "grid");
    cfg.grid.start = get_or<std::string>(g, "start", cfg.grid.start, "grid");
    cfg.grid.steps = get_or<int>(g, "steps", cfg.grid.steps, "grid");
    cfg.grid.step_hours = get_or<double>(g, "step_hours", cfg.grid.step_hours, "grid");
  }
  const auto reservoirs = get<json>(j, "reservoirs", "system");
  const auto plants = get<json>(j, "plants", "system");
  if (!reservoirs.is_array() || !plants.is_array()) {
    throw ValidationError("system: 'reservoirs' and 'plants' must be arrays");
  }
  for (const auto& p : plants) {
    check_keys(p, {"id", "p_min", "p_max", "upstream", "downstream", "segments"}, "plant");
    HydroPlant plant;
    plant.id = get<std::string>(p, "id", "plant");
    const std::string where = fmt::format("plant '{}'", plant.id);
    plant.p_min = get<double>(p, "p_min", where);
    plant.p_max = get<double>(p, "p_max", where);
    plant.upstream_reservoir = get<std::string>(p, "upstream", where);
    plant.downstream_reservoir = get_or<std::string>(p, "downstream", kSea, where);
    for (const auto& s : get<json>(p, "segments", where)) {
      check_keys(s, {"width", "slope"}, where + " segment");
      plant.segments.push_back({get<double>(s, "width", where), get<double>(s, "slope", where)});
    }
    cfg.system.plants.push_back(std::move(plant));
  }
  for (const auto& r : reservoirs) {
    check_keys(r, {"id", "r_min", "r_max", "r_init", "water_value", "reference_slope"}, "reservoir");
    Reservoir res;
    res.id = get<std::string>(r, "id", "reservoir");
    const std::string where = fmt::format("reservoir '{}'", res.id);
    res.r_min = get<double>(r, "r_min", where);
    res.r_max = get<double>(r, "r_max", where);
    res.r_init = get<double>(r, "r_init", where);
    res.water_value = get<double>(r, "water_value", where);
    if (r.contains("reference_slope")) {
      res.reference_slope = get<double>(r, "reference_slope", where);
    } else {
      for (const auto& plant : cfg.system.plants) {
        if (plant.upstream_reservoir == res.id && !plant.segments.empty()) {
          res.reference_slope = plant.segments.front().slope;
        }
      }
    }
    cfg.system.reservoirs.push_back(std::move(res));
  }
  return cfg;
}

SystemConfig read_system(const fs::path& path) {
  try {
    return parse_system(read_text(path));
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

RunConfig read_run_config(const fs::path& path) {
  const json j = parse_json(read_text(path), path.string());
  const std::string where = path.string();
  check_keys(j,
             {"system", "inflow_early", "inflow_late", "wind_forecast", "wind_actual", "spot", "market",
              "fees", "solver", "out"},
             where);
  const fs::path base = path.parent_path();
  auto resolve = [&](const char* key) {
    const fs::path p = get<std::string>(j, key, where);
    return p.is_absolute() ? p : base / p;
  };
  RunConfig c;
  c.system = resolve("system");
  c.inflow_early = resolve("inflow_early");
  c.inflow_late = resolve("inflow_late");
  c.wind_forecast = resolve("wind_forecast");
  c.wind_actual = resolve("wind_actual");
  c.spot = resolve("spot");
  if (j.contains("out")) c.out = resolve("out");
  if (j.contains("market")) {
    const auto& m = j["market"];
    check_keys(m, {"spread_frac", "sensitivity", "depth", "tier_volume"}, "market");
    c.market.spread_frac = get_or(m, "spread_frac", c.market.spread_frac, "market");
    c.market.sensitivity = get_or(m, "sensitivity", c.market.sensitivity, "market");
    c.market.depth = get_or(m, "depth", c.market.depth, "market");
    c.market.tier_volume = get_or(m, "tier_volume", c.market.tier_volume, "market");
  }
  if (j.contains("fees")) {
    const auto& f = j["fees"];
    check_keys(f, {"trade_fee", "imbalance_fee"}, "fees");
    c.fees.trade_fee = get_or(f, "trade_fee", c.fees.trade_fee, "fees");
    c.fees.imbalance_fee = get_or(f, "imbalance_fee", c.fees.imbalance_fee, "fees");
    if (!(c.fees.trade_fee >= 0.0) || !(c.fees.imbalance_fee >= 0.0)) {
      throw ValidationError("fees: values must be >= 0");
    }
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    check_keys(s, {"mip_gap", "lp_tolerance", "max_nodes"}, "solver");
    c.solver.mip_gap = get_or(s, "mip_gap", c.solver.mip_gap, "solver");
    c.solver.lp_tolerance = get_or(s, "lp_tolerance", c.solver.lp_tolerance, "solver");
    c.solver.max_nodes = get_or(s, "max_nodes", c.solver.max_nodes, "solver");
    if (!(c.solver.mip_gap >= 0.0) || !(c.solver.lp_tolerance > 0.0) || c.solver.max_nodes < 1) {
      throw ValidationError("solver: need mip_gap >= 0, lp_tolerance > 0, max_nodes >= 1");
    }
  }
  return c;
}

ScenarioInputs load_inputs(const RunConfig& c) {
  ScenarioInputs in;
  const SystemConfig sc = read_system(c.system);
  in.system = sc.system;
  in.grid = sc.grid;
  const int T = in.grid.steps;
  in.inflow_early = read_inflow(c.inflow_early, in.system, T);
  in.inflow_late = read_inflow(c.inflow_late, in.system, T);
  in.wind_forecast = {read_series(c.wind_forecast, T), WindRole::Forecast};
  in.wind_actual = {read_series(c.wind_actual, T), WindRole::Actual};
  in.spot = read_series(c.spot, T);

  for (const auto* inflow : {&in.inflow_early, &in.inflow_late}) {
    const auto v = validate_system(in.system, *inflow, in.grid);
    if (!v.empty()) throw ValidationError(fmt::format("{}: {}", v.front().subject, v.front().message));
  }
  for (std::size_t t = 0; t < in.wind_actual.values.size(); ++t) {
    if (in.wind_actual.values[t] < 0.0 || in.wind_forecast.values[t] < 0.0) {
      throw ValidationError(fmt::format("wind step {}: production must be >= 0", t));
    }
  }
  const auto imb = system_imbalance(in.system, in.inflow_early, in.inflow_late, in.wind_forecast,
                                    in.wind_actual);
  in.quotes = synthesize_quotes(in.spot, imb, c.market);
  in.fees = c.fees;
  in.solver = c.solver;
  return in;
}

}  // namespace hydrobal::io
