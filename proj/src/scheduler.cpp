#include "hydrobal/scheduler.hpp"

#include <cmath>

#include <fmt/format.h>

#include "hydrobal/milp.hpp"

namespace hydrobal {

namespace {

using Index3 = std::vector<std::vector<std::vector<int>>>;
using Index2 = std::vector<std::vector<int>>;

struct Layout {
  Index3 mu, q;    // [plant][segment][step]
  Index2 g;        // [plant][step]
  Index2 r, spill; // [reservoir][step]
  std::vector<std::string> accounts;
  Index3 buy, sell;  // [account][step][tier], -1 when the tier is absent
  std::vector<std::string> load_units;
  Index2 load_rows;  // [load unit][step]
  double dt_s = 3600.0;
  double dt_h = 1.0;
};

void require_valid(const DayAheadProblem& p) {
  const auto violations = validate_system(p.system, p.inflow, p.grid);
  if (!violations.empty()) {
    throw ValidationError(fmt::format("{}: {}", violations.front().subject, violations.front().message));
  }
  if (static_cast<int>(p.prices.size()) != p.grid.steps) {
    throw ValidationError(fmt::format("price series has {} steps, grid has {}", p.prices.size(),
                                      p.grid.steps));
  }
}

class ModelBuilder {
 public:
  explicit ModelBuilder(const DayAheadProblem& p) : p_(p) {
    layout.dt_s = p.grid.step_seconds();
    layout.dt_h = p.grid.step_hours;
  }

  void add_physics(bool spot_revenue);
  void add_trading(const RebalanceProblem& p);

  lp::Model model;
  Layout layout;

 private:
  const DayAheadProblem& p_;
};

void ModelBuilder::add_physics(bool spot_revenue) {
  const auto& sys = p_.system;
  const int T = p_.grid.steps;
  const std::size_t I = sys.plants.size();
  const std::size_t M = sys.reservoirs.size();
  const double dt_s = layout.dt_s;
  const double dt_h = layout.dt_h;

  // Binaries first, ordered (plant, segment, step): branch order follows column order.
  layout.mu.resize(I);
  for (std::size_t i = 0; i < I; ++i) {
    const auto& segs = sys.plants[i].segments;
    layout.mu[i].assign(segs.size(), std::vector<int>(static_cast<std::size_t>(T), -1));
    for (std::size_t n = 0; n < segs.size(); ++n) {
      for (int t = 0; t < T; ++t) {
        layout.mu[i][n][static_cast<std::size_t>(t)] =
            model.add_column(fmt::format("MU_{}_{}_{}", i, n, t), 0.0, 1.0, 0.0, true);
      }
    }
  }
  layout.q.resize(I);
  layout.g.assign(I, std::vector<int>(static_cast<std::size_t>(T), -1));
  for (std::size_t i = 0; i < I; ++i) {
    const auto& plant = sys.plants[i];
    layout.q[i].assign(plant.segments.size(), std::vector<int>(static_cast<std::size_t>(T), -1));
    for (std::size_t n = 0; n < plant.segments.size(); ++n) {
      for (int t = 0; t < T; ++t) {
        layout.q[i][n][static_cast<std::size_t>(t)] = model.add_column(
            fmt::format("Q_{}_{}_{}", i, n, t), 0.0, plant.segments[n].width, 0.0);
      }
    }
    for (int t = 0; t < T; ++t) {
      const double c = spot_revenue ? p_.prices[static_cast<std::size_t>(t)] * dt_h : 0.0;
      layout.g[i][static_cast<std::size_t>(t)] =
          model.add_column(fmt::format("G_{}_{}", i, t), plant.p_min, plant.p_max, c);
    }
  }
  layout.r.assign(M, std::vector<int>(static_cast<std::size_t>(T), -1));
  layout.spill.assign(M, std::vector<int>(static_cast<std::size_t>(T), -1));
  for (std::size_t m = 0; m < M; ++m) {
    const auto& res = sys.reservoirs[m];
    for (int t = 0; t < T; ++t) {
      const double c = t == T - 1 ? res.value_per_m3() * dt_s : 0.0;
      layout.r[m][static_cast<std::size_t>(t)] = model.add_column(
          fmt::format("R_{}_{}", m, t), res.r_min / dt_s, res.r_max / dt_s, c);
      layout.spill[m][static_cast<std::size_t>(t)] =
          model.add_column(fmt::format("FL_{}_{}", m, t), 0.0, lp::kInf, 0.0);
    }
  }

  for (std::size_t i = 0; i < I; ++i) {
    const auto& segs = sys.plants[i].segments;
    for (int t = 0; t < T; ++t) {
      const auto ut = static_cast<std::size_t>(t);
      std::vector<lp::Term> link{{layout.g[i][ut], 1.0}};
      for (std::size_t n = 0; n < segs.size(); ++n) link.push_back({layout.q[i][n][ut], -segs[n].slope});
      model.add_row(fmt::format("LNK_{}_{}", i, t), "linking", std::move(link), 0.0, 0.0);
      for (std::size_t n = 0; n < segs.size(); ++n) {
        if (n > 0) {
          model.add_row(fmt::format("SEGO_{}_{}_{}", i, n, t), "segment order",
                        {{layout.q[i][n][ut], 1.0}, {layout.mu[i][n - 1][ut], -segs[n].width}},
                        -lp::kInf, 0.0);
        }
        model.add_row(fmt::format("SEGF_{}_{}_{}", i, n, t), "segment fill",
                      {{layout.q[i][n][ut], 1.0}, {layout.mu[i][n][ut], -segs[n].width}}, 0.0,
                      lp::kInf);
      }
    }
  }

  for (std::size_t m = 0; m < M; ++m) {
    const auto& res = sys.reservoirs[m];
    const auto& inflow = p_.inflow.at(res.id);
    for (int t = 0; t < T; ++t) {
      const auto ut = static_cast<std::size_t>(t);
      std::vector<lp::Term> terms{{layout.r[m][ut], 1.0}, {layout.spill[m][ut], 1.0}};
      double rhs = inflow[ut];
      if (t > 0) {
        terms.push_back({layout.r[m][ut - 1], -1.0});
      } else {
        rhs += res.r_init / dt_s;
      }
      for (std::size_t n = 0; n < sys.plants[m].segments.size(); ++n) {
        terms.push_back({layout.q[m][n][ut], 1.0});
      }
      if (m > 0) {
        for (std::size_t n = 0; n < sys.plants[m - 1].segments.size(); ++n) {
          terms.push_back({layout.q[m - 1][n][ut], -1.0});
        }
      }
      model.add_row(fmt::format("BAL_{}_{}", m, t), "reservoir balance", std::move(terms), rhs, rhs);
    }
  }
}

void ModelBuilder::add_trading(const RebalanceProblem& p) {
  const auto& sys = p.system;
  const int T = p.grid.steps;
  const auto uT = static_cast<std::size_t>(T);
  const double dt_h = layout.dt_h;
  const auto& com = p.commitment;

  if (p.quotes.size() != T) {
    throw ValidationError(fmt::format("missing quotes: ladder covers {} of {} steps", p.quotes.size(), T));
  }
  for (const auto& s : com.series) {
    if (s.size() != uT) throw ValidationError("commitment length differs from grid");
  }
  if (p.wind_actual && p.wind_actual->values.size() != uT) {
    throw ValidationError("wind actual length differs from grid");
  }
  Series wind(uT, 0.0);
  if (p.wind_actual) wind = p.wind_actual->values;

  const bool plant_mode = com.mode == LoadMode::Plant;
  bool wind_account = false;
  if (plant_mode) {
    for (const auto& plant : sys.plants) {
      if (!com.has_unit(plant.id)) {
        throw ValidationError(fmt::format("commitment has no series for plant '{}'", plant.id));
      }
      layout.accounts.push_back(plant.id);
    }
    if (com.has_unit(kWindUnit)) {
      if (!p.wind_actual) throw ValidationError("wind commitment given without wind actual series");
      wind_account = true;
      layout.accounts.push_back(kWindUnit);
    }
  } else {
    if (com.series.size() != 1) throw ValidationError("portfolio commitment needs exactly one series");
    layout.accounts.push_back("portfolio");
  }

  double offset = 0.0;
  for (const auto& s : com.series) {
    for (std::size_t t = 0; t < uT; ++t) offset += s[t] * p.prices[t] * dt_h;
  }
  model.objective_offset = offset;

  const std::size_t A = layout.accounts.size();
  layout.buy.assign(A, std::vector<std::vector<int>>(uT));
  layout.sell.assign(A, std::vector<std::vector<int>>(uT));
  for (std::size_t a = 0; a < A; ++a) {
    for (std::size_t t = 0; t < uT; ++t) {
      const auto& q = p.quotes.steps[t];
      for (const auto& tier : q.asks) {
        layout.buy[a][t].push_back(model.add_column(fmt::format("B_{}_{}_{}", a, t, tier.index), 0.0,
                                                    tier.volume / dt_h,
                                                    -(tier.price + p.trade_fee) * dt_h));
      }
      for (const auto& tier : q.bids) {
        layout.sell[a][t].push_back(model.add_column(fmt::format("S_{}_{}_{}", a, t, tier.index), 0.0,
                                                     tier.volume / dt_h,
                                                     (tier.price - p.trade_fee) * dt_h));
      }
    }
  }
  if (A > 1) {
    for (std::size_t t = 0; t < uT; ++t) {
      const auto& q = p.quotes.steps[t];
      for (std::size_t k = 0; k < q.asks.size(); ++k) {
        std::vector<lp::Term> terms;
        for (std::size_t a = 0; a < A; ++a) terms.push_back({layout.buy[a][t][k], 1.0});
        model.add_row(fmt::format("DEPA_{}_{}", t, k), "market depth", std::move(terms), -lp::kInf,
                      q.asks[k].volume / dt_h);
      }
      for (std::size_t k = 0; k < q.bids.size(); ++k) {
        std::vector<lp::Term> terms;
        for (std::size_t a = 0; a < A; ++a) terms.push_back({layout.sell[a][t][k], 1.0});
        model.add_row(fmt::format("DEPB_{}_{}", t, k), "market depth", std::move(terms), -lp::kInf,
                      q.bids[k].volume / dt_h);
      }
    }
  }

  auto trade_terms = [&](std::size_t a, std::size_t t, std::vector<lp::Term>& terms) {
    for (int c : layout.buy[a][t]) terms.push_back({c, 1.0});
    for (int c : layout.sell[a][t]) terms.push_back({c, -1.0});
  };

  if (plant_mode) {
    for (std::size_t i = 0; i < sys.plants.size(); ++i) {
      const auto& L = com.unit(sys.plants[i].id);
      layout.load_units.push_back(sys.plants[i].id);
      layout.load_rows.emplace_back();
      for (std::size_t t = 0; t < uT; ++t) {
        std::vector<lp::Term> terms{{layout.g[i][t], 1.0}};
        trade_terms(i, t, terms);
        layout.load_rows.back().push_back(
            model.add_row(fmt::format("LOAD_{}_{}", i, t), "load", std::move(terms), L[t], L[t]));
      }
    }
    if (wind_account) {
      const auto& L = com.unit(kWindUnit);
      const std::size_t a = A - 1;
      layout.load_units.push_back(kWindUnit);
      layout.load_rows.emplace_back();
      for (std::size_t t = 0; t < uT; ++t) {
        std::vector<lp::Term> terms;
        trade_terms(a, t, terms);
        const double rhs = L[t] - wind[t];
        layout.load_rows.back().push_back(
            model.add_row(fmt::format("LOAD_{}_{}", a, t), "load", std::move(terms), rhs, rhs));
      }
    }
  } else {
    const auto& L = com.series.front();
    layout.load_units.push_back("portfolio");
    layout.load_rows.emplace_back();
    for (std::size_t t = 0; t < uT; ++t) {
      std::vector<lp::Term> terms;
      for (std::size_t i = 0; i < sys.plants.size(); ++i) terms.push_back({layout.g[i][t], 1.0});
      trade_terms(0, t, terms);
      const double rhs = L[t] - wind[t];
      layout.load_rows.back().push_back(
          model.add_row(fmt::format("LOAD_P_{}", t), "load", std::move(terms), rhs, rhs));
    }
  }
}

milp::Options to_milp(const SolveOptions& o) {
  if (!(o.lp_tolerance > 0.0) || !(o.mip_gap >= 0.0)) {
    throw ValidationError("solver tolerances must be positive (mip_gap >= 0)");
  }
  milp::Options m;
  m.mip_gap = o.mip_gap;
  m.max_nodes = o.max_nodes;
  m.lp.optimality_tol = o.lp_tolerance;
  return m;
}

/// Proposes segment binaries that fill the PQ-curve in order up to each
/// plant's relaxed generation.
milp::RoundingHeuristic ordered_fill(const CascadeSystem& sys, const Layout& layout, std::size_t ncols) {
  return [&sys, &layout, ncols](const lp::Result& relax) -> std::optional<std::vector<double>> {
    std::vector<double> v(ncols, 0.0);
    for (std::size_t i = 0; i < sys.plants.size(); ++i) {
      const auto& segs = sys.plants[i].segments;
      for (std::size_t t = 0; t < layout.g[i].size(); ++t) {
        double remaining = relax.x[static_cast<std::size_t>(layout.g[i][t])];
        for (std::size_t n = 0; n < segs.size(); ++n) {
          const double seg_power = segs[n].width * segs[n].slope;
          const bool full = remaining >= seg_power - 1e-9;
          v[static_cast<std::size_t>(layout.mu[i][n][t])] = full ? 1.0 : 0.0;
          remaining = full ? remaining - seg_power : 0.0;
        }
      }
    }
    return v;
  };
}

[[noreturn]] void raise_for(const lp::Model& model, lp::Status status, int infeasible_row) {
  if (status == lp::Status::Unbounded) throw UnboundedError("scheduling model is unbounded");
  if (status == lp::Status::Infeasible) {
    if (infeasible_row >= 0) {
      const auto& row = model.rows()[static_cast<std::size_t>(infeasible_row)];
      throw InfeasibleError(row.group, fmt::format("{} constraint cannot be met (row {})",
                                                   row.group, row.name));
    }
    throw InfeasibleError("integrality", "no integer-feasible segment assignment");
  }
  throw Error(fmt::format("solver stopped: {}", lp::to_string(status)));
}

ScheduleSolution extract(const DayAheadProblem& p, const QuoteLadder* quotes, const Layout& layout,
                         const std::vector<double>& x, double objective) {
  const auto& sys = p.system;
  const std::size_t T = static_cast<std::size_t>(p.grid.steps);
  ScheduleSolution s;
  for (const auto& pl : sys.plants) s.plant_ids.push_back(pl.id);
  for (const auto& r : sys.reservoirs) s.reservoir_ids.push_back(r.id);
  auto val = [&](int c) { return x[static_cast<std::size_t>(c)]; };

  s.generation.assign(sys.plants.size(), Series(T));
  s.segment_discharge.resize(sys.plants.size());
  s.segment_active.resize(sys.plants.size());
  for (std::size_t i = 0; i < sys.plants.size(); ++i) {
    const std::size_t N = sys.plants[i].segments.size();
    s.segment_discharge[i].assign(N, Series(T));
    s.segment_active[i].assign(N, std::vector<int>(T));
    for (std::size_t t = 0; t < T; ++t) {
      s.generation[i][t] = val(layout.g[i][t]);
      for (std::size_t n = 0; n < N; ++n) {
        s.segment_discharge[i][n][t] = val(layout.q[i][n][t]);
        s.segment_active[i][n][t] = static_cast<int>(std::lround(val(layout.mu[i][n][t])));
      }
    }
  }
  s.reservoir.assign(sys.reservoirs.size(), Series(T));
  s.spill.assign(sys.reservoirs.size(), Series(T));
  for (std::size_t m = 0; m < sys.reservoirs.size(); ++m) {
    for (std::size_t t = 0; t < T; ++t) {
      s.reservoir[m][t] = val(layout.r[m][t]) * layout.dt_s;
      s.spill[m][t] = val(layout.spill[m][t]);
    }
  }
  s.trade_accounts = layout.accounts;
  s.buys.assign(layout.accounts.size(), Series(T, 0.0));
  s.sells.assign(layout.accounts.size(), Series(T, 0.0));
  if (quotes != nullptr) {
    for (std::size_t a = 0; a < layout.accounts.size(); ++a) {
      for (std::size_t t = 0; t < T; ++t) {
        const auto& q = quotes->steps[t];
        for (std::size_t k = 0; k < layout.buy[a][t].size(); ++k) {
          const double v = val(layout.buy[a][t][k]);
          s.buys[a][t] += v;
          if (v > 1e-9) {
            s.fills.push_back({static_cast<int>(t), TradeSide::Buy, q.asks[k].price, v * layout.dt_h,
                               q.asks[k].index, a});
          }
        }
        for (std::size_t k = 0; k < layout.sell[a][t].size(); ++k) {
          const double v = val(layout.sell[a][t][k]);
          s.sells[a][t] += v;
          if (v > 1e-9) {
            s.fills.push_back({static_cast<int>(t), TradeSide::Sell, q.bids[k].price,
                               v * layout.dt_h, q.bids[k].index, a});
          }
        }
      }
    }
  }
  s.objective = objective;
  return s;
}

ScheduleSolution solve_model(const DayAheadProblem& p, const QuoteLadder* quotes, const ModelBuilder& b,
                             const SolveOptions& o) {
  const auto heuristic = ordered_fill(p.system, b.layout, b.model.columns().size());
  const milp::Result r = milp::solve(b.model, to_milp(o), heuristic);
  if (r.status != lp::Status::Optimal) raise_for(b.model, r.status, r.infeasible_row);
  return extract(p, quotes, b.layout, r.x, r.objective);
}

}  // namespace

lp::Model build_day_ahead_model(const DayAheadProblem& problem) {
  require_valid(problem);
  ModelBuilder b(problem);
  b.model.name = "DAYAHEAD";
  b.add_physics(true);
  return std::move(b.model);
}

lp::Model build_rebalance_model(const RebalanceProblem& problem) {
  require_valid(problem);
  ModelBuilder b(problem);
  b.model.name = "REBALANCE";
  b.add_physics(false);
  b.add_trading(problem);
  return std::move(b.model);
}

ScheduleSolution solve_day_ahead(const DayAheadProblem& problem, const SolveOptions& options) {
  require_valid(problem);
  ModelBuilder b(problem);
  b.add_physics(true);
  return solve_model(problem, nullptr, b, options);
}

ScheduleSolution solve_rebalance(const RebalanceProblem& problem, const SolveOptions& options) {
  require_valid(problem);
  ModelBuilder b(problem);
  b.add_physics(false);
  b.add_trading(problem);
  return solve_model(problem, &problem.quotes, b, options);
}

DualReport extract_duals(const RebalanceProblem& problem, const ScheduleSolution& solution,
                         const SolveOptions& options) {
  require_valid(problem);
  ModelBuilder b(problem);
  b.add_physics(false);
  b.add_trading(problem);
  const auto& layout = b.layout;

  if (solution.segment_active.size() != problem.system.plants.size()) {
    throw Error("solution does not match the problem's plants");
  }
  std::vector<double> fixed(b.model.columns().size(), 0.0);
  for (std::size_t i = 0; i < layout.mu.size(); ++i) {
    for (std::size_t n = 0; n < layout.mu[i].size(); ++n) {
      for (std::size_t t = 0; t < layout.mu[i][n].size(); ++t) {
        fixed[static_cast<std::size_t>(layout.mu[i][n][t])] = solution.segment_active.at(i).at(n).at(t);
      }
    }
  }
  lp::Options lpo;
  lpo.optimality_tol = options.lp_tolerance;
  const lp::Result r = milp::solve_fixed(b.model, fixed, lpo);
  if (r.status != lp::Status::Optimal) {
    throw Error(fmt::format("solution is not optimal for this problem (fixed LP {})",
                            lp::to_string(r.status)));
  }
  const double tol = 1e-6 * std::max(1.0, std::abs(solution.objective));
  if (std::abs(r.objective - solution.objective) > tol) {
    throw Error(fmt::format("solution is not optimal for this problem (objective {} vs {})",
                            solution.objective, r.objective));
  }

  DualReport out;
  out.mode = problem.commitment.mode;
  out.units = layout.load_units;
  for (const auto& rows : layout.load_rows) {
    Series mc;
    for (int row : rows) mc.push_back(-r.row_dual[static_cast<std::size_t>(row)] / layout.dt_h);
    out.load_mc.push_back(std::move(mc));
  }
  for (const auto& cols : layout.r) {
    Series sh;
    for (int c : cols) sh.push_back(r.reduced_cost[static_cast<std::size_t>(c)] / layout.dt_s);
    out.reservoir_shadow.push_back(std::move(sh));
  }
  return out;
}

double spot_value(const DayAheadProblem& problem, const ScheduleSolution& solution) {
  double v = 0.0;
  const std::size_t T = static_cast<std::size_t>(problem.grid.steps);
  for (std::size_t i = 0; i < solution.generation.size(); ++i) {
    for (std::size_t t = 0; t < T; ++t) {
      v += problem.prices[t] * solution.generation[i][t] * problem.grid.step_hours;
    }
  }
  for (std::size_t m = 0; m < problem.system.reservoirs.size(); ++m) {
    v += problem.system.reservoirs[m].value_per_m3() * solution.reservoir[m][T - 1];
  }
  return v;
}

}  // namespace hydrobal
