#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "hydrobal/error.hpp"

namespace hydrobal {

using Series = std::vector<double>;
using Matrix = std::vector<Series>;

inline constexpr const char* kSea = "SEA";
inline constexpr const char* kWindUnit = "wind";

struct TimeGrid {
  std::string start = "2020-10-07T00:00";
  int steps = 24;
  double step_hours = 1.0;

  double step_seconds() const { return step_hours * 3600.0; }
};

/// One linear piece of a PQ-curve: `width` m3/s of discharge converted at
/// `slope` MW per m3/s.
struct EfficiencySegment {
  double width = 0.0;
  double slope = 0.0;
};

struct HydroPlant {
  std::string id;
  double p_min = 0.0;
  double p_max = 0.0;
  std::vector<EfficiencySegment> segments;
  std::string upstream_reservoir;
  std::string downstream_reservoir = kSea;

  double max_discharge() const;
  double max_power() const;
};

/// Volumes in m3. The stored water is credited at
/// `water_value * reference_slope / 3600` EUR per m3.
struct Reservoir {
  std::string id;
  double r_min = 0.0;
  double r_max = 0.0;
  double r_init = 0.0;
  double water_value = 0.0;
  double reference_slope = 0.0;

  double value_per_m3() const { return water_value * reference_slope / 3600.0; }
};

/// Serial cascade: plant i draws from reservoirs[i] and releases into
/// reservoirs[i + 1], the last plant releases to the sea.
struct CascadeSystem {
  std::vector<Reservoir> reservoirs;
  std::vector<HydroPlant> plants;

  std::size_t reservoir_index(const std::string& id) const;
  std::size_t plant_index(const std::string& id) const;
};

/// reservoir id -> inflow per step, m3/s.
struct InflowSeries {
  std::map<std::string, Series> by_reservoir;

  const Series& at(const std::string& reservoir_id) const;
};

enum class WindRole { Forecast, Actual };

struct WindSeries {
  Series values;  // MW per step
  WindRole role = WindRole::Forecast;
};

enum class LoadMode { Plant, Portfolio };

/// Committed power per unit and step. In PLANT mode `units` lists the hydro
/// plants in system order, optionally followed by the wind unit; in PORTFOLIO
/// mode there is a single series.
struct LoadCommitment {
  LoadMode mode = LoadMode::Plant;
  std::vector<std::string> units;
  Matrix series;

  bool has_unit(const std::string& id) const;
  const Series& unit(const std::string& id) const;
};

/// Sums a PLANT commitment into the PORTFOLIO commitment it implies.
LoadCommitment to_portfolio(const LoadCommitment& plant_commitment);

enum class TradeSide { Buy, Sell };

/// A pay-as-bid execution against one price tier.
struct Fill {
  int step = 0;
  TradeSide side = TradeSide::Buy;
  double price = 0.0;   // EUR/MWh
  double volume = 0.0;  // MWh
  int tier = 0;
  std::size_t account = 0;
};

struct ScheduleSolution {
  std::vector<std::string> plant_ids;
  std::vector<std::string> reservoir_ids;
  Matrix generation;                           // [plant][step] MW
  std::vector<Matrix> segment_discharge;       // [plant][segment][step] m3/s
  std::vector<std::vector<std::vector<int>>> segment_active;  // [plant][segment][step]
  Matrix reservoir;                            // [reservoir][step] m3 at end of step
  Matrix spill;                                // [reservoir][step] m3/s
  std::vector<std::string> trade_accounts;
  Matrix buys;                                 // [account][step] MW
  Matrix sells;                                // [account][step] MW
  std::vector<Fill> fills;
  double objective = 0.0;

  double discharge(std::size_t plant, std::size_t step) const;
  int steps() const { return generation.empty() ? 0 : static_cast<int>(generation[0].size()); }
};

struct Violation {
  std::string subject;
  std::string message;
};

/// Checks every type invariant of the system, inflow and grid; violations are
/// returned as data.
std::vector<Violation> validate_system(const CascadeSystem& system, const InflowSeries& inflow,
                                       const TimeGrid& grid);

/// Piecewise-linear PQ-curve: fills segments in order. Throws DomainError for
/// q outside [0, max_discharge].
double discharge_to_power(const HydroPlant& plant, double q);

/// Exact inverse of discharge_to_power on [0, max_power].
double power_to_discharge(const HydroPlant& plant, double power);

}  // namespace hydrobal
