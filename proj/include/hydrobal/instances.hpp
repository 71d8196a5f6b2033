#pragma once

// Problem instances: seeded random cascades for property checks, and the
// fixed fixtures used by tests, acceptance checks and the demo.

#include <filesystem>
#include <random>

#include "hydrobal/io.hpp"
#include "hydrobal/scenarios.hpp"

namespace hydrobal::instances {

struct RandomOptions {
  int max_plants = 2;
  int max_steps = 4;
  int max_segments = 2;
  int max_binaries = 12;  // steps are cut to respect this
};

CascadeSystem random_system(std::mt19937_64& rng, int steps, const RandomOptions& options = {});
DayAheadProblem random_day_ahead(std::mt19937_64& rng, const RandomOptions& options = {});

/// Random pipeline inputs. Tiers are deep enough that every rebalance is
/// feasible; fees are zero.
ScenarioInputs random_scenario(std::mt19937_64& rng, const RandomOptions& options = {});

/// Four-segment plant, 68-140 MW and 42 m3/s, with segment marginal costs
/// 17.1, 18.3, 21.5 and 24.2 EUR/MWh at a water value of 20 EUR/MWh.
HydroPlant ladder_plant();
Reservoir ladder_reservoir();

/// Two-plant cascade, three hourly steps, with a surplus inflow into the
/// nearly full lower reservoir in step 1 and an empty order book.
RebalanceProblem flood_problem(LoadMode mode);
inline constexpr int kFloodStep = 1;

/// 24-hour two-plant cascade with a wind park.
ScenarioInputs demo_inputs();
io::RunConfig demo_config();

/// Writes system.json, the CSV series and config.json for `inputs` into `dir`
/// and returns the path of config.json. Market parameters come from `params`.
std::filesystem::path write_instance(const std::filesystem::path& dir, const ScenarioInputs& inputs,
                                     const io::RunConfig& params);

}  // namespace hydrobal::instances
