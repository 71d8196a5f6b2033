#pragma once

// Depth-first branch-and-bound over the binary columns of an lp::Model.
// Branching picks the lowest-index fractional binary and explores the
// up-branch (value 1) first, so ties resolve reproducibly.

#include <functional>
#include <optional>
#include <vector>

#include "hydrobal/lp.hpp"

namespace hydrobal::milp {

struct Options {
  double mip_gap = 0.0;  // relative; 0 = prove optimality
  double integrality_tol = 1e-6;
  long max_nodes = 1'000'000;
  lp::Options lp;
};

/// Proposes a value for every binary column given a node's relaxation. The
/// proposal is completed by an LP with those binaries fixed; returning
/// nullopt skips the heuristic at that node.
using RoundingHeuristic = std::function<std::optional<std::vector<double>>(const lp::Result&)>;

struct Result {
  lp::Status status = lp::Status::Infeasible;
  double objective = 0.0;
  double bound = 0.0;  // best relaxation bound seen at the root
  std::vector<double> x;
  /// LP re-solved with every binary fixed at the incumbent; carries duals.
  lp::Result fixed;
  long nodes = 0;
  int infeasible_row = -1;  // from the root relaxation when infeasible
};

Result solve(const lp::Model& model, const Options& options = {},
             const RoundingHeuristic& heuristic = {});

/// Re-solves the LP with every integer column fixed to `values[j]`.
lp::Result solve_fixed(const lp::Model& model, const std::vector<double>& values,
                       const lp::Options& options = {});

}  // namespace hydrobal::milp
