#include "hydrobal/hydro_core.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

namespace hydrobal {

namespace {
constexpr double kRangeTol = 1e-9;
}

double HydroPlant::max_discharge() const {
  double q = 0.0;
  for (const auto& s : segments) q += s.width;
  return q;
}

double HydroPlant::max_power() const {
  double p = 0.0;
  for (const auto& s : segments) p += s.width * s.slope;
  return p;
}

std::size_t CascadeSystem::reservoir_index(const std::string& id) const {
  for (std::size_t m = 0; m < reservoirs.size(); ++m) {
    if (reservoirs[m].id == id) return m;
  }
  throw ValidationError(fmt::format("unknown reservoir '{}'", id));
}

std::size_t CascadeSystem::plant_index(const std::string& id) const {
  for (std::size_t i = 0; i < plants.size(); ++i) {
    if (plants[i].id == id) return i;
  }
  throw ValidationError(fmt::format("unknown plant '{}'", id));
}

const Series& InflowSeries::at(const std::string& reservoir_id) const {
  auto it = by_reservoir.find(reservoir_id);
  if (it == by_reservoir.end()) {
    throw ValidationError(fmt::format("no inflow series for reservoir '{}'", reservoir_id));
  }
  return it->second;
}

bool LoadCommitment::has_unit(const std::string& id) const {
  return std::find(units.begin(), units.end(), id) != units.end();
}

const Series& LoadCommitment::unit(const std::string& id) const {
  auto it = std::find(units.begin(), units.end(), id);
  if (it == units.end()) throw ValidationError(fmt::format("no commitment for unit '{}'", id));
  return series[static_cast<std::size_t>(it - units.begin())];
}

LoadCommitment to_portfolio(const LoadCommitment& plant_commitment) {
  if (plant_commitment.mode == LoadMode::Portfolio) return plant_commitment;
  LoadCommitment out;
  out.mode = LoadMode::Portfolio;
  out.units = {"portfolio"};
  std::size_t n = plant_commitment.series.empty() ? 0 : plant_commitment.series.front().size();
  Series total(n, 0.0);
  for (const auto& s : plant_commitment.series) {
    for (std::size_t t = 0; t < n; ++t) total[t] += s[t];
  }
  out.series = {std::move(total)};
  return out;
}

double ScheduleSolution::discharge(std::size_t plant, std::size_t step) const {
  double q = 0.0;
  for (const auto& seg : segment_discharge[plant]) q += seg[step];
  return q;
}

std::vector<Violation> validate_system(const CascadeSystem& system, const InflowSeries& inflow,
                                       const TimeGrid& grid) {
  std::vector<Violation> out;
  auto add = [&](std::string subject, std::string message) {
    out.push_back({std::move(subject), std::move(message)});
  };

  if (grid.steps < 1) add("grid", "steps must be >= 1");
  if (!(grid.step_hours > 0.0)) add("grid", "step length must be positive");

  std::set<std::string> ids;
  for (const auto& r : system.reservoirs) {
    if (!ids.insert(r.id).second) add(r.id, "duplicate id");
    if (!(r.r_min <= r.r_init && r.r_init <= r.r_max)) {
      add(r.id, fmt::format("requires r_min <= r_init <= r_max (got {}, {}, {})", r.r_min,
                            r.r_init, r.r_max));
    }
    if (!(r.water_value >= 0.0)) add(r.id, "water value must be >= 0");
    if (!(r.reference_slope > 0.0)) add(r.id, "reference slope must be > 0");
  }
  for (const auto& p : system.plants) {
    if (!ids.insert(p.id).second) add(p.id, "duplicate id");
    if (p.p_min < 0.0) add(p.id, "p_min must be >= 0");
    if (p.p_min > p.p_max) add(p.id, fmt::format("p_min {} exceeds p_max {}", p.p_min, p.p_max));
    if (p.segments.empty()) add(p.id, "at least one efficiency segment required");
    for (std::size_t n = 0; n < p.segments.size(); ++n) {
      if (!(p.segments[n].width > 0.0)) add(p.id, fmt::format("segment {} width must be > 0", n + 1));
      if (!(p.segments[n].slope > 0.0)) add(p.id, fmt::format("segment {} slope must be > 0", n + 1));
      if (n > 0 && !(p.segments[n].slope < p.segments[n - 1].slope)) {
        add(p.id, fmt::format("non-convex efficiency: slope of segment {} is not below segment {}",
                              n + 1, n));
      }
    }
    if (!p.segments.empty() && p.max_power() + kRangeTol < p.p_max) {
      add(p.id, fmt::format("segments reach {} MW, below p_max {}", p.max_power(), p.p_max));
    }
  }

  if (system.plants.size() != system.reservoirs.size()) {
    add("topology", "serial cascade needs exactly one plant per reservoir");
  } else {
    for (std::size_t i = 0; i < system.plants.size(); ++i) {
      const auto& p = system.plants[i];
      if (p.upstream_reservoir != system.reservoirs[i].id) {
        add(p.id, fmt::format("must draw from reservoir '{}'", system.reservoirs[i].id));
      }
      const std::string expected =
          i + 1 < system.reservoirs.size() ? system.reservoirs[i + 1].id : std::string(kSea);
      if (p.downstream_reservoir != expected) {
        add(p.id, fmt::format("must release into '{}'", expected));
      }
    }
  }

  for (const auto& r : system.reservoirs) {
    auto it = inflow.by_reservoir.find(r.id);
    if (it == inflow.by_reservoir.end()) {
      add(r.id, "missing inflow series");
      continue;
    }
    if (static_cast<int>(it->second.size()) != grid.steps) {
      add(r.id, fmt::format("inflow has {} steps, grid has {}", it->second.size(), grid.steps));
    }
    for (double v : it->second) {
      if (!(v >= 0.0)) {
        add(r.id, "inflow must be >= 0");
        break;
      }
    }
  }
  return out;
}

double discharge_to_power(const HydroPlant& plant, double q) {
  const double cap = plant.max_discharge();
  if (!(q >= -kRangeTol && q <= cap + kRangeTol)) {
    throw DomainError(fmt::format("discharge {} outside [0, {}] for plant '{}'", q, cap, plant.id));
  }
  double remaining = std::clamp(q, 0.0, cap);
  double power = 0.0;
  for (const auto& s : plant.segments) {
    const double used = std::min(remaining, s.width);
    power += used * s.slope;
    remaining -= used;
    if (remaining <= 0.0) break;
  }
  return power;
}

double power_to_discharge(const HydroPlant& plant, double power) {
  const double cap = plant.max_power();
  if (!(power >= -kRangeTol && power <= cap + kRangeTol)) {
    throw DomainError(fmt::format("power {} outside [0, {}] for plant '{}'", power, cap, plant.id));
  }
  double remaining = std::clamp(power, 0.0, cap);
  double q = 0.0;
  for (const auto& s : plant.segments) {
    const double seg_power = s.width * s.slope;
    if (remaining <= seg_power) {
      q += remaining / s.slope;
      return q;
    }
    q += s.width;
    remaining -= seg_power;
  }
  return q;
}

}  // namespace hydrobal
