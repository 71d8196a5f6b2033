#include <doctest.h>

#include <random>
#include <sstream>

#include "helpers.hpp"
#include "hydrobal/lp.hpp"
#include "hydrobal/milp.hpp"
#include "hydrobal/simd/kernels.hpp"
#include "reference_lp.hpp"

using namespace hydrobal;
using lp::kInf;

namespace {

lp::Model textbook() {
  // max 3x + 5y  s.t.  x <= 4, 2y <= 12, 3x + 2y <= 18
  lp::Model m;
  const int x = m.add_column("x", 0, kInf, 3);
  const int y = m.add_column("y", 0, kInf, 5);
  m.add_row("c1", "a", {{x, 1}}, -kInf, 4);
  m.add_row("c2", "b", {{y, 2}}, -kInf, 12);
  m.add_row("c3", "c", {{x, 3}, {y, 2}}, -kInf, 18);
  return m;
}

// Random LP around a known point so that most instances are feasible; some
// get a contradicting row, some lose an upper bound.
lp::Model random_model(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> nd(1, 6);
  const int n = nd(rng), m = nd(rng);
  lp::Model model;
  std::vector<double> x0(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double lo = std::floor(-5.0 + 10.0 * u(rng));
    const double hi = u(rng) < 0.2 ? kInf : lo + std::floor(1.0 + 10.0 * u(rng));
    x0[static_cast<std::size_t>(j)] = lo + (std::isfinite(hi) ? (hi - lo) * u(rng) : 3.0 * u(rng));
    model.add_column("x" + std::to_string(j), lo, hi, std::floor(-5.0 + 10.0 * u(rng)));
  }
  for (int i = 0; i < m; ++i) {
    std::vector<lp::Term> terms;
    double act = 0.0;
    for (int j = 0; j < n; ++j) {
      if (u(rng) < 0.3) continue;
      const double a = std::floor(-4.0 + 9.0 * u(rng));
      if (a == 0.0) continue;
      terms.push_back({j, a});
      act += a * x0[static_cast<std::size_t>(j)];
    }
    const double r = u(rng);
    if (r < 0.35) {
      model.add_row("r" + std::to_string(i), "g", terms, -kInf, std::ceil(act));
    } else if (r < 0.7) {
      model.add_row("r" + std::to_string(i), "g", terms, std::floor(act), kInf);
    } else if (r < 0.85) {
      model.add_row("r" + std::to_string(i), "g", terms, std::floor(act) - 1, std::ceil(act) + 1);
    } else if (r < 0.95) {
      model.add_row("r" + std::to_string(i), "g", terms, act, act);
    } else {
      model.add_row("r" + std::to_string(i), "g", terms, std::ceil(act) + 50, kInf);
    }
  }
  return model;
}

oracle::LpStatus as_oracle(lp::Status s) {
  switch (s) {
    case lp::Status::Optimal:
      return oracle::LpStatus::Optimal;
    case lp::Status::Unbounded:
      return oracle::LpStatus::Unbounded;
    default:
      return oracle::LpStatus::Infeasible;
  }
}

}  // namespace

TEST_SUITE("lp") {

TEST_CASE("textbook LP optimum and duals") {
  const auto r = lp::solve(textbook());
  REQUIRE(r.status == lp::Status::Optimal);
  CHECK(r.objective == doctest::Approx(36.0));
  CHECK(r.x[0] == doctest::Approx(2.0));
  CHECK(r.x[1] == doctest::Approx(6.0));
  CHECK(r.row_dual[0] == doctest::Approx(0.0));
  CHECK(r.row_dual[1] == doctest::Approx(1.5));
  CHECK(r.row_dual[2] == doctest::Approx(1.0));
  CHECK(r.row_activity[2] == doctest::Approx(18.0));
}

TEST_CASE("bound overrides replace column bounds") {
  const auto r = lp::solve(textbook(), {}, {0.0, 0.0}, {1.0, kInf});
  REQUIRE(r.status == lp::Status::Optimal);
  CHECK(r.objective == doctest::Approx(3.0 + 30.0));
  CHECK(r.reduced_cost[0] == doctest::Approx(3.0));
}

TEST_CASE("infeasible and unbounded models are classified") {
  lp::Model inf;
  const int x = inf.add_column("x", 0, 10, 1);
  inf.add_row("lo", "floor", {{x, 1}}, 5, kInf);
  inf.add_row("hi", "ceiling", {{x, 1}}, -kInf, 3);
  const auto r = lp::solve(inf);
  CHECK(r.status == lp::Status::Infeasible);
  CHECK(r.infeasible_row >= 0);

  lp::Model unb;
  const int a = unb.add_column("a", 0, kInf, 1);
  const int b = unb.add_column("b", 0, kInf, 0);
  unb.add_row("r", "g", {{a, 1}, {b, -1}}, -kInf, 2);
  CHECK(lp::solve(unb).status == lp::Status::Unbounded);
}

TEST_CASE("random LPs agree with the reference simplex") {
  std::mt19937_64 rng(11);
  int optimal = 0, infeasible = 0, unbounded = 0;
  for (int k = 0; k < 400; ++k) {
    const lp::Model m = random_model(rng);
    const auto got = lp::solve(m);
    const auto want = oracle::solve(oracle::from_model(m));
    CAPTURE(k);
    REQUIRE(as_oracle(got.status) == want.status);
    if (want.status == oracle::LpStatus::Optimal) {
      ++optimal;
      CHECK(testutil::rel_diff(got.objective, want.objective) < 1e-9);
      // The primal point is feasible for the original rows.
      for (std::size_t i = 0; i < m.rows().size(); ++i) {
        double act = 0.0;
        for (const auto& t : m.rows()[i].terms) act += t.coef * got.x[static_cast<std::size_t>(t.column)];
        CHECK(act >= m.rows()[i].lower - 1e-7);
        CHECK(act <= m.rows()[i].upper + 1e-7);
      }
    } else if (want.status == oracle::LpStatus::Infeasible) {
      ++infeasible;
    } else {
      ++unbounded;
    }
  }
  MESSAGE(optimal << " optimal, " << infeasible << " infeasible, " << unbounded << " unbounded");
  CHECK(optimal > 100);
  CHECK(infeasible > 0);
  CHECK(unbounded > 0);
}

TEST_CASE("row duals satisfy strong duality on random feasible LPs") {
  // For max c'x with bounded rows and columns, c'x equals the sum of
  // dual * active bound over rows and columns.
  std::mt19937_64 rng(12);
  int checked = 0;
  for (int k = 0; k < 300; ++k) {
    const lp::Model m = random_model(rng);
    const auto r = lp::solve(m);
    if (r.status != lp::Status::Optimal) continue;
    double dual_obj = 0.0;
    for (std::size_t i = 0; i < m.rows().size(); ++i) {
      if (r.row_dual[i] != 0.0) dual_obj += r.row_dual[i] * r.row_activity[i];
    }
    for (std::size_t j = 0; j < m.columns().size(); ++j) {
      if (r.reduced_cost[j] != 0.0) dual_obj += r.reduced_cost[j] * r.x[j];
    }
    CHECK(dual_obj == doctest::Approx(r.objective).epsilon(1e-8).scale(1.0));
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("scalar and avx2 backends give the same optimum") {
  if (!simd::backend_supported(simd::Backend::Avx2)) return;
  const auto saved = simd::active_backend();
  std::mt19937_64 rng(13);
  for (int k = 0; k < 100; ++k) {
    const lp::Model m = random_model(rng);
    simd::set_backend(simd::Backend::Scalar);
    const auto a = lp::solve(m);
    simd::set_backend(simd::Backend::Avx2);
    const auto b = lp::solve(m);
    CHECK(a.status == b.status);
    if (a.status == lp::Status::Optimal) CHECK(testutil::rel_diff(a.objective, b.objective) < 1e-9);
  }
  simd::set_backend(saved);
}

TEST_CASE("MPS export lists every section") {
  lp::Model m = textbook();
  m.add_column("z", 0, 1, 2, true);
  m.add_row("rng", "g", {{0, 1}, {2, 1}}, 1, 3);
  m.objective_offset = 7.0;
  std::ostringstream os;
  lp::write_mps(m, os);
  const std::string s = os.str();
  for (const char* key : {"NAME", "OBJSENSE", "ROWS", "COLUMNS", "'INTORG'", "'INTEND'", "RHS", "RANGES", "BOUNDS",
                          "ENDATA", " L  c3", "x         c3"}) {
    CAPTURE(key);
    CHECK(s.find(key) != std::string::npos);
  }
}

}

TEST_SUITE("milp") {

TEST_CASE("small knapsack") {
  lp::Model m;
  const int a = m.add_column("a", 0, 1, 5, true);
  const int b = m.add_column("b", 0, 1, 4, true);
  const int c = m.add_column("c", 0, 1, 3, true);
  m.add_row("w", "weight", {{a, 2}, {b, 3}, {c, 1}}, -kInf, 5);
  const auto r = milp::solve(m);
  REQUIRE(r.status == lp::Status::Optimal);
  CHECK(r.objective == doctest::Approx(9.0));
  CHECK(r.x == std::vector<double>{1, 1, 0});
  CHECK(r.bound >= r.objective - 1e-9);
  CHECK(r.fixed.status == lp::Status::Optimal);
}

TEST_CASE("integer infeasibility with a feasible relaxation") {
  lp::Model m;
  const int x = m.add_column("x", 0, 1, 1, true);
  m.add_row("half", "parity", {{x, 2}}, 1, 1);
  const auto r = milp::solve(m);
  CHECK(r.status == lp::Status::Infeasible);
  CHECK(r.infeasible_row == -1);
}

TEST_CASE("random binary programs match enumeration") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 60; ++k) {
    lp::Model m;
    const int nb = 1 + static_cast<int>(u(rng) * 5);
    const int nc = 1 + static_cast<int>(u(rng) * 3);
    for (int j = 0; j < nb; ++j) m.add_column("b" + std::to_string(j), 0, 1, -3 + 8 * u(rng), true);
    for (int j = 0; j < nc; ++j) m.add_column("c" + std::to_string(j), 0, 5, -2 + 4 * u(rng));
    for (int i = 0; i < 3; ++i) {
      std::vector<lp::Term> t;
      for (int j = 0; j < nb + nc; ++j) t.push_back({j, -2 + 5 * u(rng)});
      m.add_row("r" + std::to_string(i), "g", t, -kInf, 1 + 4 * u(rng));
    }
    std::optional<double> best;
    for (int mask = 0; mask < (1 << nb); ++mask) {
      oracle::Lp o = oracle::from_model(m);
      for (int j = 0; j < nb; ++j) o.lo[static_cast<std::size_t>(j)] = o.hi[static_cast<std::size_t>(j)] = (mask >> j) & 1;
      const auto leaf = oracle::solve(o);
      if (leaf.status == oracle::LpStatus::Optimal && (!best || leaf.objective > *best)) best = leaf.objective;
    }
    const auto r = milp::solve(m);
    CAPTURE(k);
    REQUIRE((r.status == lp::Status::Optimal) == best.has_value());
    if (best) CHECK(testutil::rel_diff(r.objective, *best) < 1e-9);
  }
}

TEST_CASE("solve_fixed pins integer columns") {
  lp::Model m;
  const int a = m.add_column("a", 0, 1, 5, true);
  const int y = m.add_column("y", 0, 4, 1);
  m.add_row("cap", "g", {{a, 2}, {y, 1}}, -kInf, 4);
  const auto r = milp::solve_fixed(m, {0.0, 0.0});
  REQUIRE(r.status == lp::Status::Optimal);
  CHECK(r.x[0] == 0.0);
  CHECK(r.objective == doctest::Approx(4.0));
}

}
