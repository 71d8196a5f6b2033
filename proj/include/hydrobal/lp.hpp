#pragma once

// Bounded-variable primal simplex over a dense tableau.
//
//   maximize    c'x + offset
//   subject to  row_lower <= A x <= row_upper
//               col_lower <=   x <= col_upper
//
// Every column needs at least one finite bound. Rows are turned into
// equalities with a bounded slack; rows whose slack starts outside its bounds
// get an artificial that phase 1 drives to zero.

#include <cstddef>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace hydrobal::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Term {
  int column;
  double coef;
};

struct Column {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  double objective = 0.0;
  bool integer = false;
};

struct Row {
  std::string name;
  std::string group;  // constraint class, used in infeasibility reports
  std::vector<Term> terms;
  double lower = -kInf;
  double upper = kInf;
};

class Model {
 public:
  int add_column(std::string name, double lower, double upper, double objective,
                 bool integer = false);
  int add_row(std::string name, std::string group, std::vector<Term> terms, double lower,
              double upper);

  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<Row>& rows() const { return rows_; }
  std::vector<Column>& columns() { return columns_; }
  std::vector<Row>& rows() { return rows_; }

  double objective_offset = 0.0;
  std::string name = "MODEL";

 private:
  std::vector<Column> columns_;
  std::vector<Row> rows_;
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(Status s);

struct Options {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  int max_iterations = 0;  // 0 = automatic, proportional to model size
  int bland_after_degenerate = 50;
};

struct Result {
  Status status = Status::Infeasible;
  double objective = 0.0;
  std::vector<double> x;             // per structural column
  std::vector<double> row_activity;  // A x
  /// d(objective)/d(active row bound); zero for rows whose bounds are slack.
  std::vector<double> row_dual;
  /// d(objective)/d(active column bound); zero for basic columns.
  std::vector<double> reduced_cost;
  int iterations = 0;
  int infeasible_row = -1;  // first row still carrying infeasibility after phase 1
};

/// Solves the LP relaxation (integrality flags ignored). `lower`/`upper`, when
/// non-empty, replace the model's column bounds.
Result solve(const Model& model, const Options& options = {},
             const std::vector<double>& lower = {}, const std::vector<double>& upper = {});

/// Writes the model in (free-form compatible) MPS with an OBJSENSE MAX section.
void write_mps(const Model& model, std::ostream& out);

}  // namespace hydrobal::lp
