#pragma once

#include <random>
#include <string>

#include "hydrobal/scheduler.hpp"

namespace testutil {

inline hydrobal::Reservoir reservoir(std::string id, double r_min, double r_max, double r_init, double wv,
                                     double ref) {
  return {std::move(id), r_min, r_max, r_init, wv, ref};
}

inline hydrobal::HydroPlant plant(std::string id, double p_min, double p_max,
                                  std::vector<hydrobal::EfficiencySegment> segs, std::string up,
                                  std::string down = hydrobal::kSea) {
  hydrobal::HydroPlant p;
  p.id = std::move(id);
  p.p_min = p_min;
  p.p_max = p_max;
  p.segments = std::move(segs);
  p.upstream_reservoir = std::move(up);
  p.downstream_reservoir = std::move(down);
  return p;
}

/// Upper lake feeding a lower pond, two segments per plant.
inline hydrobal::CascadeSystem two_plant_system() {
  hydrobal::CascadeSystem s;
  s.reservoirs = {reservoir("lake", 1e5, 2e6, 1e6, 20.0, 3.0), reservoir("pond", 1e4, 3e5, 1.5e5, 20.0, 2.0)};
  s.plants = {plant("upper", 10.0, 85.0, {{20.0, 3.0}, {10.0, 2.7}}, "lake", "pond"),
              plant("lower", 5.0, 60.0, {{20.0, 2.0}, {12.0, 1.8}}, "pond")};
  return s;
}

inline hydrobal::InflowSeries flat_inflow(const hydrobal::CascadeSystem& s, int steps, double value) {
  hydrobal::InflowSeries in;
  for (const auto& r : s.reservoirs) in.by_reservoir[r.id] = hydrobal::Series(static_cast<std::size_t>(steps), value);
  return in;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace testutil
