#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

#include "hydrobal/lp.hpp"
#include "hydrobal/simd/kernels.hpp"

namespace hydrobal::lp {

int Model::add_column(std::string name, double lower, double upper, double objective,
                      bool integer) {
  columns_.push_back({std::move(name), lower, upper, objective, integer});
  return static_cast<int>(columns_.size()) - 1;
}

int Model::add_row(std::string name, std::string group, std::vector<Term> terms, double lower,
                   double upper) {
  rows_.push_back({std::move(name), std::move(group), std::move(terms), lower, upper});
  return static_cast<int>(rows_.size()) - 1;
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal:
      return "optimal";
    case Status::Infeasible:
      return "infeasible";
    case Status::Unbounded:
      return "unbounded";
    case Status::IterationLimit:
      return "iteration limit";
  }
  return "unknown";
}

namespace {

enum class VarState { AtLower, AtUpper, Basic };

class Tableau {
 public:
  Tableau(const Model& model, const Options& opt, const std::vector<double>& lower,
          const std::vector<double>& upper);

  Result run();

 private:
  enum class Outcome { Optimal, Unbounded, IterationLimit };

  std::span<double> row(std::size_t r) { return {tab_.data() + r * width_, width_}; }
  Outcome optimize(std::vector<double>& cost);
  int choose_entering(const std::vector<double>& cost, bool bland) const;
  void pivot(std::size_t r, std::size_t e);
  void recompute_basics();
  double phase1_infeasibility() const;

  const Model& model_;
  Options opt_;
  std::size_t n_ = 0;      // structural columns
  std::size_t m_ = 0;      // rows
  std::size_t width_ = 0;  // structural + slack + artificial
  std::vector<double> lo_, hi_, x_;
  std::vector<VarState> state_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> art_row_;  // artificial k -> originating row
  std::vector<double> tab_;
  std::vector<double> d_phase1_, d_phase2_;
  int iterations_ = 0;
  int max_iterations_ = 0;
};

Tableau::Tableau(const Model& model, const Options& opt, const std::vector<double>& lower,
                 const std::vector<double>& upper)
    : model_(model), opt_(opt), n_(model.columns().size()), m_(model.rows().size()) {
  const auto& cols = model.columns();
  const auto& rows = model.rows();
  if ((!lower.empty() && lower.size() != n_) || (!upper.empty() && upper.size() != n_)) {
    throw std::invalid_argument("lp::solve: bound override size mismatch");
  }

  std::vector<double> col_lo(n_), col_hi(n_), col_x(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    col_lo[j] = lower.empty() ? cols[j].lower : lower[j];
    col_hi[j] = upper.empty() ? cols[j].upper : upper[j];
    if (std::isinf(col_lo[j]) && std::isinf(col_hi[j])) {
      throw std::invalid_argument("lp::solve: free column '" + cols[j].name + "' not supported");
    }
    col_x[j] = std::isfinite(col_lo[j]) ? col_lo[j] : col_hi[j];
  }

  // Starting slack values and which rows need an artificial.
  std::vector<double> activity(m_, 0.0);
  std::vector<int> sigma(m_, 0);
  std::vector<double> slack_x(m_, 0.0);
  for (std::size_t r = 0; r < m_; ++r) {
    double a = 0.0;
    for (const auto& t : rows[r].terms) a += t.coef * col_x[static_cast<std::size_t>(t.column)];
    activity[r] = a;
    if (a < rows[r].lower) {
      slack_x[r] = rows[r].lower;
      sigma[r] = -1;
      art_row_.push_back(r);
    } else if (a > rows[r].upper) {
      slack_x[r] = rows[r].upper;
      sigma[r] = 1;
      art_row_.push_back(r);
    } else {
      slack_x[r] = a;
    }
  }

  width_ = n_ + m_ + art_row_.size();
  lo_.assign(width_, 0.0);
  hi_.assign(width_, 0.0);
  x_.assign(width_, 0.0);
  state_.assign(width_, VarState::AtLower);
  basis_.assign(m_, 0);
  tab_.assign(m_ * width_, 0.0);
  d_phase1_.assign(width_, 0.0);
  d_phase2_.assign(width_, 0.0);

  for (std::size_t j = 0; j < n_; ++j) {
    lo_[j] = col_lo[j];
    hi_[j] = col_hi[j];
    x_[j] = col_x[j];
    state_[j] = std::isfinite(col_lo[j]) ? VarState::AtLower : VarState::AtUpper;
    d_phase2_[j] = cols[j].objective;
  }

  std::size_t k = 0;
  for (std::size_t r = 0; r < m_; ++r) {
    const std::size_t s = n_ + r;
    lo_[s] = rows[r].lower;
    hi_[s] = rows[r].upper;
    x_[s] = slack_x[r];
    auto tr = row(r);
    // Row r as  -A_r x + s_r (+ sigma a_r) = 0, premultiplied by the inverse
    // of its basic column.
    const double sign = sigma[r] == 0 ? 1.0 : static_cast<double>(sigma[r]);
    for (const auto& t : rows[r].terms) tr[static_cast<std::size_t>(t.column)] -= sign * t.coef;
    tr[s] = sign;
    if (sigma[r] == 0) {
      basis_[r] = s;
      state_[s] = VarState::Basic;
    } else {
      const std::size_t a = n_ + m_ + k++;
      lo_[a] = 0.0;
      hi_[a] = kInf;
      x_[a] = std::abs(activity[r] - slack_x[r]);
      tr[a] = 1.0;
      basis_[r] = a;
      state_[a] = VarState::Basic;
      state_[s] = slack_x[r] == rows[r].lower ? VarState::AtLower : VarState::AtUpper;
      // Phase-1 cost -1 on the artificial; reduced costs of the row entries.
      simd::axpy(1.0, tr, d_phase1_);
      d_phase1_[a] = 0.0;
    }
  }

  max_iterations_ = opt_.max_iterations > 0 ? opt_.max_iterations
                                            : static_cast<int>(20 * (m_ + width_) + 1000);
}

int Tableau::choose_entering(const std::vector<double>& cost, bool bland) const {
  int best = -1;
  double best_score = opt_.optimality_tol;
  for (std::size_t j = 0; j < width_; ++j) {
    if (state_[j] == VarState::Basic || !(hi_[j] > lo_[j])) continue;
    double score = 0.0;
    if (state_[j] == VarState::AtLower && cost[j] > opt_.optimality_tol) {
      score = cost[j];
    } else if (state_[j] == VarState::AtUpper && cost[j] < -opt_.optimality_tol) {
      score = -cost[j];
    } else {
      continue;
    }
    if (bland) return static_cast<int>(j);
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(j);
    }
  }
  return best;
}

void Tableau::pivot(std::size_t r, std::size_t e) {
  auto pr = row(r);
  simd::scale(1.0 / pr[e], pr);
  pr[e] = 1.0;
  for (std::size_t i = 0; i < m_; ++i) {
    if (i == r) continue;
    auto ti = row(i);
    const double f = ti[e];
    if (f == 0.0) continue;
    simd::axpy(-f, pr, ti);
    ti[e] = 0.0;
  }
  for (auto* d : {&d_phase1_, &d_phase2_}) {
    const double f = (*d)[e];
    if (f != 0.0) {
      simd::axpy(-f, pr, *d);
      (*d)[e] = 0.0;
    }
  }
  basis_[r] = e;
  state_[e] = VarState::Basic;
}

Tableau::Outcome Tableau::optimize(std::vector<double>& cost) {
  int degenerate_run = 0;
  while (true) {
    if (iterations_ >= max_iterations_) return Outcome::IterationLimit;
    const bool bland = degenerate_run >= opt_.bland_after_degenerate;
    const int entering = choose_entering(cost, bland);
    if (entering < 0) return Outcome::Optimal;
    const auto e = static_cast<std::size_t>(entering);
    const double dir = state_[e] == VarState::AtLower ? 1.0 : -1.0;

    // Ratio test: basic variable in row r moves at rate -T[r][e] * dir.
    double theta = hi_[e] - lo_[e];
    int leave = -1;
    double leave_alpha = 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      const double alpha = tab_[r * width_ + e];
      if (std::abs(alpha) <= opt_.pivot_tol) continue;
      const std::size_t b = basis_[r];
      const double rate = -alpha * dir;
      double limit = kInf;
      if (rate < 0.0 && std::isfinite(lo_[b])) {
        limit = (x_[b] - lo_[b]) / -rate;
      } else if (rate > 0.0 && std::isfinite(hi_[b])) {
        limit = (hi_[b] - x_[b]) / rate;
      }
      if (!std::isfinite(limit)) continue;
      limit = std::max(limit, 0.0);
      bool take = false;
      const double tie = std::isfinite(theta) ? 1e-12 * std::max(1.0, std::abs(theta)) : 0.0;
      if (limit < theta - tie) {
        take = true;
      } else if (leave >= 0 && limit <= theta + tie) {
        take = bland ? b < basis_[static_cast<std::size_t>(leave)]
                     : std::abs(alpha) > std::abs(leave_alpha);
      }
      if (take) {
        theta = std::min(theta, limit);
        leave = static_cast<int>(r);
        leave_alpha = alpha;
      }
    }
    if (leave < 0 && std::isinf(theta)) return Outcome::Unbounded;

    ++iterations_;
    degenerate_run = theta <= 1e-12 ? degenerate_run + 1 : 0;

    if (theta > 0.0) {
      x_[e] += dir * theta;
      for (std::size_t r = 0; r < m_; ++r) {
        const double alpha = tab_[r * width_ + e];
        if (alpha != 0.0) x_[basis_[r]] -= alpha * dir * theta;
      }
    }

    if (leave < 0) {
      // Bound flip, the basis is unchanged.
      state_[e] = dir > 0 ? VarState::AtUpper : VarState::AtLower;
      x_[e] = dir > 0 ? hi_[e] : lo_[e];
      continue;
    }

    const auto r = static_cast<std::size_t>(leave);
    const std::size_t b = basis_[r];
    const double rate = -leave_alpha * dir;
    if (rate < 0.0) {
      x_[b] = lo_[b];
      state_[b] = VarState::AtLower;
    } else {
      x_[b] = hi_[b];
      state_[b] = VarState::AtUpper;
    }
    pivot(r, e);
  }
}

void Tableau::recompute_basics() {
  std::vector<double> nonbasic = x_;
  for (std::size_t r = 0; r < m_; ++r) nonbasic[basis_[r]] = 0.0;
  for (std::size_t r = 0; r < m_; ++r) {
    x_[basis_[r]] = -simd::dot(row(r), nonbasic);
  }
}

double Tableau::phase1_infeasibility() const {
  double sum = 0.0;
  for (std::size_t k = 0; k < art_row_.size(); ++k) sum += std::abs(x_[n_ + m_ + k]);
  return sum;
}

Result Tableau::run() {
  Result res;
  const auto& rows = model_.rows();

  if (!art_row_.empty()) {
    const Outcome o = optimize(d_phase1_);
    recompute_basics();
    if (o == Outcome::IterationLimit) {
      res.status = Status::IterationLimit;
      res.iterations = iterations_;
      return res;
    }
    if (o == Outcome::Unbounded) throw std::logic_error("lp::solve: phase 1 reported an unbounded ray");
    double scale = 1.0;
    for (const auto& r : rows) {
      if (std::isfinite(r.lower)) scale = std::max(scale, std::abs(r.lower));
      if (std::isfinite(r.upper)) scale = std::max(scale, std::abs(r.upper));
    }
    if (phase1_infeasibility() > opt_.feasibility_tol * scale) {
      res.status = Status::Infeasible;
      res.iterations = iterations_;
      for (std::size_t k = 0; k < art_row_.size(); ++k) {
        if (std::abs(x_[n_ + m_ + k]) > opt_.feasibility_tol * scale) {
          const int rr = static_cast<int>(art_row_[k]);
          if (res.infeasible_row < 0 || rr < res.infeasible_row) res.infeasible_row = rr;
        }
      }
      return res;
    }
    for (std::size_t k = 0; k < art_row_.size(); ++k) {
      const std::size_t a = n_ + m_ + k;
      lo_[a] = hi_[a] = 0.0;
      if (state_[a] != VarState::Basic) {
        state_[a] = VarState::AtLower;
        x_[a] = 0.0;
      }
    }
  }

  const Outcome o = optimize(d_phase2_);
  recompute_basics();
  res.iterations = iterations_;
  if (o == Outcome::Unbounded) {
    res.status = Status::Unbounded;
    return res;
  }
  if (o == Outcome::IterationLimit) {
    res.status = Status::IterationLimit;
    return res;
  }

  res.status = Status::Optimal;
  const auto& cols = model_.columns();
  res.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
  for (std::size_t j = 0; j < n_; ++j) {
    // Snap values within tolerance of a bound.
    if (std::isfinite(lo_[j]) && std::abs(res.x[j] - lo_[j]) <= 1e-11 * std::max(1.0, std::abs(lo_[j]))) {
      res.x[j] = lo_[j];
    }
    if (std::isfinite(hi_[j]) && std::abs(res.x[j] - hi_[j]) <= 1e-11 * std::max(1.0, std::abs(hi_[j]))) {
      res.x[j] = hi_[j];
    }
  }
  res.objective = model_.objective_offset;
  for (std::size_t j = 0; j < n_; ++j) res.objective += cols[j].objective * res.x[j];
  res.row_activity.assign(m_, 0.0);
  res.row_dual.assign(m_, 0.0);
  for (std::size_t r = 0; r < m_; ++r) {
    double a = 0.0;
    for (const auto& t : rows[r].terms) a += t.coef * res.x[static_cast<std::size_t>(t.column)];
    res.row_activity[r] = a;
    const std::size_t s = n_ + r;
    if (state_[s] != VarState::Basic) res.row_dual[r] = d_phase2_[s];
  }
  res.reduced_cost.assign(n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    if (state_[j] != VarState::Basic) res.reduced_cost[j] = d_phase2_[j];
  }
  return res;
}

}  // namespace

Result solve(const Model& model, const Options& options, const std::vector<double>& lower,
             const std::vector<double>& upper) {
  Tableau t(model, options, lower, upper);
  return t.run();
}

}  // namespace hydrobal::lp
