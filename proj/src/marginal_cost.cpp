#include "hydrobal/marginal_cost.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace hydrobal {

namespace {
constexpr double kVolumeEps = 1e-12;
}

std::vector<McSegment> segment_mc(const HydroPlant& plant, const Reservoir& reservoir, double step_hours) {
  std::vector<McSegment> out;
  for (std::size_t n = 0; n < plant.segments.size(); ++n) {
    const auto& seg = plant.segments[n];
    if (!(seg.slope > 0.0)) {
      throw ValidationError(fmt::format("plant '{}' segment {}: slope must be > 0", plant.id, n));
    }
    out.push_back({plant.id, static_cast<int>(n),
                   reservoir.water_value * reservoir.reference_slope / seg.slope,
                   seg.width * seg.slope * step_hours});
  }
  return out;
}

const char* to_string(LadderSide side) { return side == LadderSide::SellMore ? "SELL_MORE" : "BUY_BACK"; }

BidLadder build_ladder(const HydroPlant& plant, const Reservoir& reservoir, const Series& committed_g,
                       double step_hours) {
  const auto mcs = segment_mc(plant, reservoir, step_hours);
  std::vector<double> lo, hi;  // power range of each segment
  double acc = 0.0;
  for (const auto& seg : plant.segments) {
    lo.push_back(acc);
    acc += seg.width * seg.slope;
    hi.push_back(acc);
  }

  BidLadder ladder;
  ladder.plant_id = plant.id;
  for (std::size_t t = 0; t < committed_g.size(); ++t) {
    const double g = committed_g[t];
    const double tol = 1e-9 * std::max(1.0, plant.p_max);
    if (!(g >= plant.p_min - tol && g <= plant.p_max + tol)) {
      throw DomainError(fmt::format("plant '{}' step {}: committed {} MW outside [{}, {}]", plant.id, t, g,
                                    plant.p_min, plant.p_max));
    }
    std::vector<LadderEntry> entries;
    for (std::size_t n = 0; n < lo.size(); ++n) {
      const double v = std::min(hi[n], plant.p_max) - std::max(lo[n], g);
      if (v > kVolumeEps) {
        entries.push_back({LadderSide::SellMore, static_cast<int>(n), mcs[n].mc, v * step_hours});
      }
    }
    for (std::size_t n = lo.size(); n-- > 0;) {
      const double v = std::min(hi[n], g) - std::max(lo[n], plant.p_min);
      if (v > kVolumeEps) {
        entries.push_back({LadderSide::BuyBack, static_cast<int>(n), mcs[n].mc, v * step_hours});
      }
    }
    ladder.steps.push_back(std::move(entries));
  }
  return ladder;
}

void write_ladder_csv(std::ostream& out, const BidLadder& ladder) {
  out << "step,side,price_eur_mwh,volume_mwh\n";
  for (std::size_t t = 0; t < ladder.steps.size(); ++t) {
    for (const auto& e : ladder.steps[t]) {
      fmt::print(out, "{},{},{:.6g},{:.6g}\n", t, to_string(e.side), e.price, e.volume);
    }
  }
}

DualReport dynamic_mc(const RebalanceProblem& problem, const ScheduleSolution& solution, LoadMode mode,
                      const SolveOptions& options) {
  if (problem.commitment.mode != mode) {
    throw ValidationError("requested MC mode differs from the problem's commitment mode");
  }
  return extract_duals(problem, solution, options);
}

}  // namespace hydrobal
