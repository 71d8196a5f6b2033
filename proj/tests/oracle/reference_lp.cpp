#include "reference_lp.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

namespace oracle {

namespace {

using real = long double;
constexpr real kEps = 1e-10L;

struct Dense {
  std::size_t rows = 0, cols = 0;
  std::vector<real> a;  // rows x (cols + 1), last column is the rhs
  real& at(std::size_t r, std::size_t c) { return a[r * (cols + 1) + c]; }
};

void pivot(Dense& t, std::vector<real>& obj, std::size_t pr, std::size_t pc) {
  const real p = t.at(pr, pc);
  for (std::size_t c = 0; c <= t.cols; ++c) t.at(pr, c) /= p;
  for (std::size_t r = 0; r < t.rows; ++r) {
    if (r == pr) continue;
    const real f = t.at(r, pc);
    if (f == 0) continue;
    for (std::size_t c = 0; c <= t.cols; ++c) t.at(r, c) -= f * t.at(pr, c);
  }
  const real f = obj[pc];
  if (f != 0) {
    for (std::size_t c = 0; c <= t.cols; ++c) obj[c] -= f * t.at(pr, c);
  }
}

/// Maximizes with reduced costs in `obj` (obj[j] > 0 improves). Bland's rule.
/// Returns false when unbounded. Columns with allowed[j] == false never enter.
bool simplex(Dense& t, std::vector<real>& obj, std::vector<std::size_t>& basis, const std::vector<bool>& allowed) {
  while (true) {
    std::size_t enter = t.cols;
    for (std::size_t j = 0; j < t.cols; ++j) {
      if (allowed[j] && obj[j] > kEps) {
        enter = j;
        break;
      }
    }
    if (enter == t.cols) return true;
    std::size_t leave = t.rows;
    real best = 0;
    for (std::size_t r = 0; r < t.rows; ++r) {
      const real a = t.at(r, enter);
      if (a <= kEps) continue;
      const real ratio = t.at(r, t.cols) / a;
      if (leave == t.rows || ratio < best - kEps || (std::fabs(ratio - best) <= kEps && basis[r] < basis[leave])) {
        best = ratio;
        leave = r;
      }
    }
    if (leave == t.rows) return false;
    pivot(t, obj, leave, enter);
    basis[leave] = enter;
  }
}

}  // namespace

LpResult solve(const Lp& lp) {
  const std::size_t n = lp.c.size();
  // Rows in terms of y = x - lo >= 0.
  struct StdRow {
    std::vector<std::pair<std::size_t, real>> terms;
    char sense;
    real rhs;
  };
  std::vector<StdRow> rows;
  for (const auto& con : lp.cons) {
    StdRow r{{}, con.sense, con.rhs};
    for (const auto& [j, a] : con.terms) {
      r.terms.emplace_back(static_cast<std::size_t>(j), a);
      r.rhs -= static_cast<real>(a) * lp.lo[static_cast<std::size_t>(j)];
    }
    rows.push_back(std::move(r));
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isfinite(lp.hi[j])) rows.push_back({{{j, 1.0L}}, 'L', static_cast<real>(lp.hi[j]) - lp.lo[j]});
  }

  std::size_t slacks = 0;
  for (const auto& r : rows) slacks += r.sense == 'E' ? 0 : 1;
  Dense t;
  t.rows = rows.size();
  t.cols = n + slacks + rows.size();  // structural, slack, artificial
  t.a.assign(t.rows * (t.cols + 1), 0);
  std::vector<std::size_t> basis(t.rows);
  std::size_t s = n;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& [j, a] : rows[r].terms) t.at(r, j) += a;
    if (rows[r].sense == 'L') t.at(r, s++) = 1;
    if (rows[r].sense == 'G') t.at(r, s++) = -1;
    t.at(r, t.cols) = rows[r].rhs;
    if (rows[r].rhs < 0) {
      for (std::size_t c = 0; c <= t.cols; ++c) t.at(r, c) = -t.at(r, c);
    }
    const std::size_t art = n + slacks + r;
    t.at(r, art) = 1;
    basis[r] = art;
  }

  // Phase 1: maximize -sum(artificials).
  std::vector<real> obj(t.cols + 1, 0);
  for (std::size_t r = 0; r < t.rows; ++r) {
    for (std::size_t c = 0; c <= t.cols; ++c) obj[c] += t.at(r, c);
  }
  for (std::size_t r = 0; r < t.rows; ++r) obj[n + slacks + r] = 0;
  std::vector<bool> allowed(t.cols, true);
  simplex(t, obj, basis, allowed);
  real infeas = 0;
  for (std::size_t r = 0; r < t.rows; ++r) {
    if (basis[r] >= n + slacks) infeas += t.at(r, t.cols);
  }
  LpResult res;
  if (infeas > 1e-7L) return res;

  // Drive remaining artificials out of the basis where possible.
  for (std::size_t r = 0; r < t.rows; ++r) {
    if (basis[r] < n + slacks) continue;
    for (std::size_t j = 0; j < n + slacks; ++j) {
      if (std::fabs(t.at(r, j)) > 1e-9L) {
        pivot(t, obj, r, j);
        basis[r] = j;
        break;
      }
    }
  }
  for (std::size_t j = n + slacks; j < t.cols; ++j) allowed[j] = false;

  // Phase 2.
  std::vector<real> cost(t.cols + 1, 0);
  for (std::size_t j = 0; j < n; ++j) cost[j] = lp.c[j];
  std::vector<real> d = cost;
  for (std::size_t r = 0; r < t.rows; ++r) {
    const real cb = cost[basis[r]];
    if (cb == 0) continue;
    for (std::size_t c = 0; c <= t.cols; ++c) d[c] -= cb * t.at(r, c);
  }
  if (!simplex(t, d, basis, allowed)) {
    res.status = LpStatus::Unbounded;
    return res;
  }
  res.status = LpStatus::Optimal;
  res.x.assign(lp.lo.begin(), lp.lo.end());
  for (std::size_t r = 0; r < t.rows; ++r) {
    if (basis[r] < n) res.x[basis[r]] += static_cast<double>(t.at(r, t.cols));
  }
  real o = 0;
  for (std::size_t j = 0; j < n; ++j) o += static_cast<real>(lp.c[j]) * res.x[j];
  res.objective = static_cast<double>(o);
  return res;
}

Lp from_model(const hydrobal::lp::Model& model) {
  Lp lp;
  for (const auto& c : model.columns()) lp.add_var(c.objective, c.lower, c.upper);
  for (const auto& r : model.rows()) {
    Constraint base;
    for (const auto& t : r.terms) base.terms.emplace_back(t.column, t.coef);
    if (r.lower == r.upper) {
      base.sense = 'E';
      base.rhs = r.lower;
      lp.cons.push_back(base);
      continue;
    }
    if (std::isfinite(r.lower)) {
      base.sense = 'G';
      base.rhs = r.lower;
      lp.cons.push_back(base);
    }
    if (std::isfinite(r.upper)) {
      base.sense = 'L';
      base.rhs = r.upper;
      lp.cons.push_back(base);
    }
  }
  return lp;
}

namespace {

/// Leaf LP for fixed segment binaries, built from the problem data with
/// volumes in m3. Returns nullopt when the binaries contradict themselves.
std::optional<double> leaf(const hydrobal::DayAheadProblem& p, const std::vector<int>& mu) {
  const auto& sys = p.system;
  const int T = p.grid.steps;
  const double dt_s = p.grid.step_seconds();
  const double dt_h = p.grid.step_hours;
  const double inf = std::numeric_limits<double>::infinity();
  Lp lp;
  std::size_t k = 0;
  std::vector<std::vector<std::vector<int>>> q(sys.plants.size());
  for (std::size_t i = 0; i < sys.plants.size(); ++i) {
    const auto& segs = sys.plants[i].segments;
    q[i].assign(segs.size(), std::vector<int>(static_cast<std::size_t>(T)));
    // mu is ordered (plant, segment, step).
    for (std::size_t n = 0; n < segs.size(); ++n) {
      for (int t = 0; t < T; ++t) {
        const int m_here = mu[k + n * static_cast<std::size_t>(T) + static_cast<std::size_t>(t)];
        const int m_prev = n == 0 ? 1 : mu[k + (n - 1) * static_cast<std::size_t>(T) + static_cast<std::size_t>(t)];
        const double lo = segs[n].width * m_here;
        const double hi = segs[n].width * m_prev;
        if (lo > hi) return std::nullopt;
        q[i][n][static_cast<std::size_t>(t)] = lp.add_var(p.prices[static_cast<std::size_t>(t)] * dt_h * segs[n].slope, lo, hi);
      }
    }
    k += segs.size() * static_cast<std::size_t>(T);
  }
  std::vector<std::vector<int>> vol(sys.reservoirs.size()), spill(sys.reservoirs.size());
  for (std::size_t m = 0; m < sys.reservoirs.size(); ++m) {
    const auto& r = sys.reservoirs[m];
    for (int t = 0; t < T; ++t) {
      vol[m].push_back(lp.add_var(t == T - 1 ? r.value_per_m3() : 0.0, r.r_min, r.r_max));
      spill[m].push_back(lp.add_var(0.0, 0.0, inf));
    }
  }
  for (std::size_t i = 0; i < sys.plants.size(); ++i) {
    for (int t = 0; t < T; ++t) {
      Constraint c;
      for (std::size_t n = 0; n < q[i].size(); ++n) {
        c.terms.emplace_back(q[i][n][static_cast<std::size_t>(t)], sys.plants[i].segments[n].slope);
      }
      Constraint lo = c, hi = c;
      lo.sense = 'G';
      lo.rhs = sys.plants[i].p_min;
      hi.sense = 'L';
      hi.rhs = sys.plants[i].p_max;
      lp.cons.push_back(lo);
      lp.cons.push_back(hi);
    }
  }
  for (std::size_t m = 0; m < sys.reservoirs.size(); ++m) {
    const auto& inflow = p.inflow.at(sys.reservoirs[m].id);
    for (int t = 0; t < T; ++t) {
      const auto ut = static_cast<std::size_t>(t);
      // V_t - V_{t-1} + dt * (own discharge + spill - upstream discharge) = dt * inflow
      Constraint c;
      c.sense = 'E';
      c.rhs = inflow[ut] * dt_s;
      c.terms.emplace_back(vol[m][ut], 1.0);
      if (t > 0) {
        c.terms.emplace_back(vol[m][ut - 1], -1.0);
      } else {
        c.rhs += sys.reservoirs[m].r_init;
      }
      c.terms.emplace_back(spill[m][ut], dt_s);
      for (int id : [&] {
             std::vector<int> v;
             for (const auto& seg : q[m]) v.push_back(seg[ut]);
             return v;
           }()) {
        c.terms.emplace_back(id, dt_s);
      }
      if (m > 0) {
        for (const auto& seg : q[m - 1]) c.terms.emplace_back(seg[ut], -dt_s);
      }
      lp.cons.push_back(std::move(c));
    }
  }
  const LpResult r = solve(lp);
  if (r.status != LpStatus::Optimal) return std::nullopt;
  return r.objective;
}

}  // namespace

std::optional<double> brute_force_day_ahead(const hydrobal::DayAheadProblem& p) {
  std::size_t nbin = 0;
  for (const auto& plant : p.system.plants) nbin += plant.segments.size() * static_cast<std::size_t>(p.grid.steps);
  std::optional<double> best;
  std::vector<int> mu(nbin);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << nbin); ++bits) {
    for (std::size_t b = 0; b < nbin; ++b) mu[b] = static_cast<int>((bits >> b) & 1u);
    if (const auto v = leaf(p, mu); v && (!best || *v > *best)) best = v;
  }
  return best;
}

}  // namespace oracle
