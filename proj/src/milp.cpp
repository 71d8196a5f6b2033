#include "hydrobal/milp.hpp"

#include <cmath>
#include <utility>

namespace hydrobal::milp {

namespace {

struct Node {
  std::vector<double> lower;
  std::vector<double> upper;
};

int first_fractional(const lp::Model& model, const std::vector<double>& x, double tol) {
  const auto& cols = model.columns();
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (!cols[j].integer) continue;
    if (std::abs(x[j] - std::round(x[j])) > tol) return static_cast<int>(j);
  }
  return -1;
}

}  // namespace

lp::Result solve_fixed(const lp::Model& model, const std::vector<double>& values,
                       const lp::Options& options) {
  std::vector<double> lower, upper;
  for (const auto& c : model.columns()) {
    lower.push_back(c.lower);
    upper.push_back(c.upper);
  }
  for (std::size_t j = 0; j < lower.size(); ++j) {
    if (model.columns()[j].integer) lower[j] = upper[j] = std::round(values[j]);
  }
  return lp::solve(model, options, lower, upper);
}

Result solve(const lp::Model& model, const Options& options, const RoundingHeuristic& heuristic) {
  Result out;
  const auto& cols = model.columns();

  std::vector<Node> stack;
  {
    Node root;
    for (const auto& c : cols) {
      root.lower.push_back(c.lower);
      root.upper.push_back(c.upper);
    }
    stack.push_back(std::move(root));
  }

  bool have_incumbent = false;
  bool root_done = false;
  auto prune_level = [&]() {
    const double slack = std::max(1e-9 * std::max(1.0, std::abs(out.objective)),
                                  options.mip_gap * std::abs(out.objective));
    return out.objective + slack;
  };
  auto offer = [&](const lp::Result& r, const std::vector<double>& x) {
    if (!have_incumbent || r.objective > out.objective + 1e-12 * std::max(1.0, std::abs(out.objective))) {
      have_incumbent = true;
      out.objective = r.objective;
      out.x = x;
      for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j].integer) out.x[j] = std::round(out.x[j]);
      }
    }
  };

  while (!stack.empty()) {
    if (out.nodes >= options.max_nodes) {
      out.status = lp::Status::IterationLimit;
      break;
    }
    Node node = std::move(stack.back());
    stack.pop_back();
    ++out.nodes;

    const lp::Result relax = lp::solve(model, options.lp, node.lower, node.upper);
    if (!root_done) {
      root_done = true;
      out.bound = relax.objective;
      if (relax.status == lp::Status::Infeasible) out.infeasible_row = relax.infeasible_row;
      if (relax.status == lp::Status::Unbounded) {
        out.status = lp::Status::Unbounded;
        return out;
      }
    }
    if (relax.status != lp::Status::Optimal) continue;
    if (have_incumbent && relax.objective <= prune_level()) continue;

    const int branch = first_fractional(model, relax.x, options.integrality_tol);
    if (branch < 0) {
      offer(relax, relax.x);
      continue;
    }

    if (heuristic) {
      if (auto proposal = heuristic(relax)) {
        std::vector<double> lo = node.lower, hi = node.upper;
        bool consistent = true;
        for (std::size_t j = 0; j < cols.size() && consistent; ++j) {
          if (!cols[j].integer) continue;
          const double v = std::round((*proposal)[j]);
          if (v < node.lower[j] || v > node.upper[j]) consistent = false;
          lo[j] = hi[j] = v;
        }
        if (consistent) {
          const lp::Result completed = lp::solve(model, options.lp, lo, hi);
          if (completed.status == lp::Status::Optimal) offer(completed, completed.x);
        }
        if (have_incumbent && relax.objective <= prune_level()) continue;
      }
    }

    const auto b = static_cast<std::size_t>(branch);
    Node down = node;
    down.upper[b] = std::floor(relax.x[b]);
    Node up = std::move(node);
    up.lower[b] = std::ceil(relax.x[b]);
    stack.push_back(std::move(down));
    stack.push_back(std::move(up));
  }

  if (!have_incumbent) {
    if (out.status != lp::Status::IterationLimit) out.status = lp::Status::Infeasible;
    return out;
  }
  if (out.status != lp::Status::IterationLimit) out.status = lp::Status::Optimal;
  out.fixed = solve_fixed(model, out.x, options.lp);
  if (out.fixed.status == lp::Status::Optimal) {
    out.x = out.fixed.x;
    out.objective = out.fixed.objective;
  }
  return out;
}

}  // namespace hydrobal::milp
