#include <cmath>
#include <map>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "hydrobal/lp.hpp"

namespace hydrobal::lp {

namespace {

std::string num(double v) { return fmt::format("{:.12g}", v); }

char row_type(const Row& r) {
  if (r.lower == r.upper) return 'E';
  if (std::isfinite(r.upper)) return 'L';
  if (std::isfinite(r.lower)) return 'G';
  return 'N';
}

}  // namespace

void write_mps(const Model& model, std::ostream& out) {
  const auto& rows = model.rows();
  const auto& cols = model.columns();

  fmt::print(out, "NAME          {}\n", model.name);
  fmt::print(out, "OBJSENSE\n    MAX\n");
  fmt::print(out, "ROWS\n N  OBJ\n");
  for (const auto& r : rows) fmt::print(out, " {}  {}\n", row_type(r), r.name);

  // Column-major view of the coefficients.
  std::vector<std::map<std::size_t, double>> by_col(cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& t : rows[i].terms) by_col[static_cast<std::size_t>(t.column)][i] += t.coef;
  }

  fmt::print(out, "COLUMNS\n");
  bool in_int = false;
  int marker = 0;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].integer != in_int) {
      fmt::print(out, "    MARKER{:<6}  'MARKER'                 '{}'\n", marker++,
                 cols[j].integer ? "INTORG" : "INTEND");
      in_int = cols[j].integer;
    }
    if (cols[j].objective != 0.0) {
      fmt::print(out, "    {:<8}  {:<8}  {}\n", cols[j].name, "OBJ", num(cols[j].objective));
    }
    for (const auto& [i, v] : by_col[j]) {
      if (v != 0.0) fmt::print(out, "    {:<8}  {:<8}  {}\n", cols[j].name, rows[i].name, num(v));
    }
  }
  if (in_int) fmt::print(out, "    MARKER{:<6}  'MARKER'                 'INTEND'\n", marker);

  fmt::print(out, "RHS\n");
  if (model.objective_offset != 0.0) {
    // MPS convention: the RHS of the objective row is minus the constant.
    fmt::print(out, "    RHS       {:<8}  {}\n", "OBJ", num(-model.objective_offset));
  }
  for (const auto& r : rows) {
    const char t = row_type(r);
    const double rhs = t == 'G' ? r.lower : (t == 'N' ? 0.0 : r.upper);
    if (t != 'N' && rhs != 0.0) fmt::print(out, "    RHS       {:<8}  {}\n", r.name, num(rhs));
  }

  bool have_ranges = false;
  for (const auto& r : rows) {
    if (row_type(r) == 'L' && std::isfinite(r.lower)) {
      if (!have_ranges) fmt::print(out, "RANGES\n");
      have_ranges = true;
      fmt::print(out, "    RNG       {:<8}  {}\n", r.name, num(r.upper - r.lower));
    }
  }

  fmt::print(out, "BOUNDS\n");
  for (const auto& c : cols) {
    if (c.integer && c.lower == 0.0 && c.upper == 1.0) {
      fmt::print(out, " BV BND       {}\n", c.name);
      continue;
    }
    if (c.lower == c.upper) {
      fmt::print(out, " FX BND       {:<8}  {}\n", c.name, num(c.lower));
      continue;
    }
    if (std::isinf(c.lower)) {
      fmt::print(out, " MI BND       {}\n", c.name);
    } else if (c.lower != 0.0) {
      fmt::print(out, " LO BND       {:<8}  {}\n", c.name, num(c.lower));
    }
    if (std::isfinite(c.upper)) fmt::print(out, " UP BND       {:<8}  {}\n", c.name, num(c.upper));
  }
  fmt::print(out, "ENDATA\n");
}

}  // namespace hydrobal::lp
