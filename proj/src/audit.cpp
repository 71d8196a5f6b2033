#include <cmath>
#include <map>
#include <tuple>
#include <utility>

#include <fmt/format.h>

#include "hydrobal/scheduler.hpp"

namespace hydrobal {

namespace {

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace

std::vector<Violation> audit_schedule(const DayAheadProblem& problem, const ScheduleSolution& s,
                                      double tol) {
  std::vector<Violation> out;
  const auto& sys = problem.system;
  const auto T = static_cast<std::size_t>(problem.grid.steps);
  const double dt_s = problem.grid.step_seconds();
  auto add = [&](std::string subject, std::string msg) { out.push_back({std::move(subject), std::move(msg)}); };

  if (s.generation.size() != sys.plants.size() || s.segment_discharge.size() != sys.plants.size() ||
      s.segment_active.size() != sys.plants.size() || s.reservoir.size() != sys.reservoirs.size() ||
      s.spill.size() != sys.reservoirs.size()) {
    add("solution", "shape does not match the system");
    return out;
  }

  for (std::size_t i = 0; i < sys.plants.size(); ++i) {
    const auto& plant = sys.plants[i];
    const auto& segs = plant.segments;
    if (s.generation[i].size() != T || s.segment_discharge[i].size() != segs.size() ||
        s.segment_active[i].size() != segs.size()) {
      add(plant.id, "shape does not match the grid");
      continue;
    }
    for (std::size_t t = 0; t < T; ++t) {
      const double g = s.generation[i][t];
      const double scale = tol * std::max(1.0, plant.p_max);
      if (g < plant.p_min - scale || g > plant.p_max + scale) {
        add(plant.id, fmt::format("step {}: generation {} outside [{}, {}]", t, g, plant.p_min, plant.p_max));
      }
      double power = 0.0;
      for (std::size_t n = 0; n < segs.size(); ++n) {
        const double q = s.segment_discharge[i][n][t];
        const int mu = s.segment_active[i][n][t];
        const double z = segs[n].width;
        const double ztol = tol * std::max(1.0, z);
        power += segs[n].slope * q;
        if (mu != 0 && mu != 1) add(plant.id, fmt::format("step {}: segment {} binary is {}", t, n, mu));
        if (q < -ztol || q > z + ztol) {
          add(plant.id, fmt::format("step {}: segment {} discharge {} outside [0, {}]", t, n, q, z));
        }
        if (q < z * mu - ztol) {
          add(plant.id, fmt::format("step {}: segment {} marked full but holds {}", t, n, q));
        }
        if (n > 0 && q > z * s.segment_active[i][n - 1][t] + ztol) {
          add(plant.id, fmt::format("step {}: segment {} used before segment {} is full", t, n, n - 1));
        }
      }
      if (!close(g, power, tol)) {
        add(plant.id, fmt::format("step {}: generation {} differs from PQ-curve power {}", t, g, power));
      }
    }
  }

  for (std::size_t m = 0; m < sys.reservoirs.size(); ++m) {
    const auto& res = sys.reservoirs[m];
    if (s.reservoir[m].size() != T || s.spill[m].size() != T) {
      add(res.id, "shape does not match the grid");
      continue;
    }
    const auto& inflow = problem.inflow.at(res.id);
    const double vtol = tol * std::max(1.0, res.r_max / dt_s);
    for (std::size_t t = 0; t < T; ++t) {
      const double r = s.reservoir[m][t] / dt_s;
      if (r < res.r_min / dt_s - vtol || r > res.r_max / dt_s + vtol) {
        add(res.id, fmt::format("step {}: volume {} outside [{}, {}]", t, s.reservoir[m][t], res.r_min, res.r_max));
      }
      if (s.spill[m][t] < -vtol) add(res.id, fmt::format("step {}: negative spill {}", t, s.spill[m][t]));
      const double prev = (t == 0 ? res.r_init : s.reservoir[m][t - 1]) / dt_s;
      double in = inflow[t];
      if (m > 0) in += s.discharge(m - 1, t);
      const double outflow = s.discharge(m, t) + s.spill[m][t];
      const double residual = r - prev - in + outflow;
      if (std::abs(residual) > vtol) {
        add(res.id, fmt::format("step {}: water balance off by {} m3/s", t, residual));
      }
    }
  }
  return out;
}

std::vector<Violation> audit_rebalance(const RebalanceProblem& problem, const ScheduleSolution& s,
                                       double tol) {
  auto out = audit_schedule(problem, s, tol);
  if (!out.empty() && out.front().subject == "solution") return out;
  const auto T = static_cast<std::size_t>(problem.grid.steps);
  const auto& com = problem.commitment;
  auto add = [&](std::string subject, std::string msg) { out.push_back({std::move(subject), std::move(msg)}); };

  if (s.buys.size() != s.trade_accounts.size() || s.sells.size() != s.trade_accounts.size()) {
    add("trades", "shape does not match the accounts");
    return out;
  }
  auto account = [&](const std::string& id) -> std::size_t {
    for (std::size_t a = 0; a < s.trade_accounts.size(); ++a) {
      if (s.trade_accounts[a] == id) return a;
    }
    return s.trade_accounts.size();
  };
  Series wind(T, 0.0);
  if (problem.wind_actual) wind = problem.wind_actual->values;

  auto check_load = [&](const std::string& unit, const Series& target, const Series& produced, std::size_t a) {
    for (std::size_t t = 0; t < T; ++t) {
      const double net = produced[t] + s.buys[a][t] - s.sells[a][t];
      if (!close(net, target[t], tol)) {
        add(unit, fmt::format("step {}: delivers {} MW against commitment {}", t, net, target[t]));
      }
    }
  };

  if (com.mode == LoadMode::Plant) {
    for (std::size_t i = 0; i < problem.system.plants.size(); ++i) {
      const auto& id = problem.system.plants[i].id;
      const std::size_t a = account(id);
      if (a == s.trade_accounts.size() || !com.has_unit(id)) {
        add(id, "no trade account or commitment");
        continue;
      }
      check_load(id, com.unit(id), s.generation[i], a);
    }
    if (com.has_unit(kWindUnit)) {
      const std::size_t a = account(kWindUnit);
      if (a == s.trade_accounts.size()) {
        add(kWindUnit, "no trade account");
      } else {
        Series target = com.unit(kWindUnit);
        for (std::size_t t = 0; t < T; ++t) target[t] -= wind[t];
        check_load(kWindUnit, target, Series(T, 0.0), a);
      }
    }
  } else {
    if (s.trade_accounts.size() != 1 || com.series.size() != 1) {
      add("portfolio", "expected a single account and commitment");
    } else {
      Series target = com.series.front();
      Series produced(T, 0.0);
      for (std::size_t t = 0; t < T; ++t) {
        target[t] -= wind[t];
        for (const auto& g : s.generation) produced[t] += g[t];
      }
      check_load("portfolio", target, produced, 0);
    }
  }

  // Fills against each resting tier may not exceed its volume.
  std::map<std::tuple<int, int, int>, double> used;
  for (const auto& f : s.fills) {
    used[{f.step, f.side == TradeSide::Buy ? 0 : 1, f.tier}] += f.volume;
  }
  for (const auto& [key, vol] : used) {
    const auto [step, side, tier] = key;
    if (step < 0 || static_cast<std::size_t>(step) >= T || problem.quotes.steps.size() != T) {
      add("market", fmt::format("fill at step {} outside the ladder", step));
      continue;
    }
    const auto& q = problem.quotes.steps[static_cast<std::size_t>(step)];
    const auto& tiers = side == 0 ? q.asks : q.bids;
    double avail = -1.0;
    for (const auto& tr : tiers) {
      if (tr.index == tier) avail = tr.volume;
    }
    if (avail < 0.0) {
      add("market", fmt::format("step {}: fill against unknown tier {}", step, tier));
    } else if (vol > avail + tol * std::max(1.0, avail)) {
      add("market", fmt::format("step {}: tier {} filled {} MWh of {}", step, tier, vol, avail));
    }
  }
  return out;
}

}  // namespace hydrobal
