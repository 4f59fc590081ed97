#include "cutsel/simplex.hpp"

#include <algorithm>
#include <cmath>

#include "cutsel/errors.hpp"

namespace cutsel {

namespace {

constexpr double kDualTol = 1e-9;   // reduced-cost eligibility
constexpr double kPivotTol = 1e-9;  // minimum pivot magnitude
constexpr int kRefactorEvery = 64;
constexpr int kDegenerateLimit = 100;  // consecutive zero steps before Bland

struct SparseCol {
  std::vector<std::pair<int, double>> entries;
};

// Bounded-variable primal simplex over the standard form A x + s = b with an
// explicit dense basis inverse, refactorized periodically to keep drift in
// check. Sized for desk-scale instances (a few hundred rows and columns).
class Simplex {
 public:
  Simplex(const MilpInstance& inst, const std::vector<double>& lower,
          const std::vector<double>& upper, const SimplexOptions& options)
      : inst_(inst), options_(options) {
    n_ = inst.n;
    m_ = inst.num_rows();
    total_ = n_ + m_;
    lo_.assign(total_, 0.0);
    up_.assign(total_, kInf);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = lower[j];
      up_[j] = upper[j];
    }
    cost_.assign(total_, 0.0);
    for (int j = 0; j < n_; ++j) cost_[j] = inst.objective[j];
    cols_.resize(total_);
    b_.assign(m_, 0.0);
    scale_ = 1.0;
    for (int i = 0; i < m_; ++i) {
      b_[i] = inst.rows[i].rhs;
      scale_ += std::abs(b_[i]);
      cols_[n_ + i].entries.emplace_back(i, 1.0);
    }
    for (int i = 0; i < m_; ++i)
      for (const auto& [j, v] : inst.rows[i].coefs)
        if (v != 0.0) cols_[j].entries.emplace_back(i, v);
    max_iterations_ = options.max_iterations > 0 ? options.max_iterations
                                                 : 2000 + 200L * total_;
  }

  LpSolution run() {
    init_basis();
    phase1();
    if (status_ == LpStatus::Infeasible) return make_solution();
    phase2();
    return make_solution();
  }

  long pivots() const { return pivots_; }

 private:
  void init_basis() {
    status_vec_.assign(total_, VarStatus::AtLower);
    for (int j = 0; j < total_; ++j) {
      if (lo_[j] > -kInf) {
        status_vec_[j] = VarStatus::AtLower;
      } else if (up_[j] < kInf) {
        status_vec_[j] = VarStatus::AtUpper;
      } else {
        status_vec_[j] = VarStatus::NonbasicFree;
      }
    }
    basic_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      status_vec_[n_ + i] = VarStatus::Basic;
    }
    binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) binv_[idx(i, i)] = 1.0;
    recompute_basic_values();
  }

  double nonbasic_value(int j) const {
    switch (status_vec_[j]) {
      case VarStatus::AtLower:
        return lo_[j];
      case VarStatus::AtUpper:
        return up_[j];
      default:
        return 0.0;
    }
  }

  std::size_t idx(int r, int c) const {
    return static_cast<std::size_t>(r) * m_ + c;
  }

  void recompute_basic_values() {
    std::vector<double> rhs = b_;
    for (int j = 0; j < total_; ++j) {
      if (status_vec_[j] == VarStatus::Basic) continue;
      const double v = nonbasic_value(j);
      if (v == 0.0) continue;
      for (const auto& [r, a] : cols_[j].entries) rhs[r] -= a * v;
    }
    xb_.assign(m_, 0.0);
    for (int r = 0; r < m_; ++r) {
      double acc = 0.0;
      const double* row = &binv_[idx(r, 0)];
      for (int c = 0; c < m_; ++c) acc += row[c] * rhs[c];
      xb_[r] = acc;
    }
  }

  void refactorize() {
    std::vector<double> mat(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int r = 0; r < m_; ++r)
      for (const auto& [i, v] : cols_[basic_[r]].entries) mat[idx(i, r)] = v;
    std::vector<double> inv(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) inv[idx(i, i)] = 1.0;
    for (int col = 0; col < m_; ++col) {
      int piv = col;
      double best = std::abs(mat[idx(col, col)]);
      for (int r = col + 1; r < m_; ++r) {
        const double a = std::abs(mat[idx(r, col)]);
        if (a > best) {
          best = a;
          piv = r;
        }
      }
      if (best < 1e-12) throw NumericalFailure("singular basis during refactorization");
      if (piv != col) {
        for (int c = 0; c < m_; ++c) std::swap(mat[idx(piv, c)], mat[idx(col, c)]);
        for (int c = 0; c < m_; ++c) std::swap(inv[idx(piv, c)], inv[idx(col, c)]);
      }
      const double d = 1.0 / mat[idx(col, col)];
      for (int c = 0; c < m_; ++c) {
        mat[idx(col, c)] *= d;
        inv[idx(col, c)] *= d;
      }
      for (int r = 0; r < m_; ++r) {
        if (r == col) continue;
        const double f = mat[idx(r, col)];
        if (f == 0.0) continue;
        for (int c = 0; c < m_; ++c) {
          mat[idx(r, c)] -= f * mat[idx(col, c)];
          inv[idx(r, c)] -= f * inv[idx(col, c)];
        }
      }
    }
    binv_ = std::move(inv);
    recompute_basic_values();
    pivots_since_refactor_ = 0;
  }

  void compute_y(const std::vector<double>& cb, std::vector<double>& y) const {
    y.assign(m_, 0.0);
    for (int r = 0; r < m_; ++r) {
      const double c = cb[r];
      if (c == 0.0) continue;
      const double* row = &binv_[idx(r, 0)];
      for (int i = 0; i < m_; ++i) y[i] += c * row[i];
    }
  }

  double reduced_cost(int j, const std::vector<double>& y, double cj) const {
    double acc = cj;
    for (const auto& [r, v] : cols_[j].entries) acc -= y[r] * v;
    return acc;
  }

  void ftran(int j, std::vector<double>& w) const {
    w.assign(m_, 0.0);
    for (const auto& [r, v] : cols_[j].entries) {
      if (v == 0.0) continue;
      for (int i = 0; i < m_; ++i) w[i] += binv_[idx(i, r)] * v;
    }
  }

  void pivot_update(int row, const std::vector<double>& w) {
    const double inv_piv = 1.0 / w[row];
    double* prow = &binv_[idx(row, 0)];
    for (int c = 0; c < m_; ++c) prow[c] *= inv_piv;
    for (int r = 0; r < m_; ++r) {
      if (r == row) continue;
      const double f = w[r];
      if (f == 0.0) continue;
      double* rr = &binv_[idx(r, 0)];
      for (int c = 0; c < m_; ++c) rr[c] -= f * prow[c];
    }
  }

  double infeasibility() const {
    double total = 0.0;
    for (int r = 0; r < m_; ++r) {
      const int v = basic_[r];
      if (xb_[r] < lo_[v] - kFeasTol) total += lo_[v] - xb_[r];
      if (xb_[r] > up_[v] + kFeasTol) total += xb_[r] - up_[v];
    }
    return total;
  }

  void bump_iteration(double step) {
    ++pivots_;
    ++iterations_;
    if (step < 1e-9) {
      if (++degenerate_streak_ > kDegenerateLimit) bland_ = true;
    } else {
      degenerate_streak_ = 0;
    }
    if (iterations_ > max_iterations_)
      throw NumericalFailure("simplex iteration cap exceeded");
    if (++pivots_since_refactor_ >= kRefactorEvery) refactorize();
  }

  struct RatioResult {
    double step = kInf;
    int row = -1;  // -1 with finite step: bound flip; -1 with inf step: unbounded
    VarStatus hit = VarStatus::AtLower;
  };

  RatioResult ratio_test(const std::vector<double>& w, int dir, int entering,
                         bool phase_one) const {
    RatioResult best;
    best.step = kInf;
    for (int r = 0; r < m_; ++r) {
      const double a = dir * w[r];
      const int v = basic_[r];
      double ratio = kInf;
      VarStatus hit = VarStatus::AtLower;
      if (a > kPivotTol) {  // basic value decreases as the step grows
        if (phase_one && xb_[r] > up_[v] + kFeasTol) {
          ratio = (xb_[r] - up_[v]) / a;
          hit = VarStatus::AtUpper;
        } else if (lo_[v] > -kInf && xb_[r] >= lo_[v] - kFeasTol) {
          ratio = (xb_[r] - lo_[v]) / a;
          hit = VarStatus::AtLower;
        }
      } else if (a < -kPivotTol) {  // basic value increases
        if (phase_one && xb_[r] < lo_[v] - kFeasTol) {
          ratio = (lo_[v] - xb_[r]) / (-a);
          hit = VarStatus::AtLower;
        } else if (up_[v] < kInf && xb_[r] <= up_[v] + kFeasTol) {
          ratio = (up_[v] - xb_[r]) / (-a);
          hit = VarStatus::AtUpper;
        }
      }
      if (ratio == kInf) continue;
      if (ratio < 0.0) ratio = 0.0;
      bool take;
      if (best.row < 0) {
        take = true;
      } else if (ratio < best.step - 1e-12) {
        take = true;
      } else if (ratio <= best.step + 1e-12) {
        // Tie: Bland needs the lowest variable index for termination;
        // otherwise prefer the numerically larger pivot.
        take = bland_ ? v < basic_[best.row]
                      : std::abs(w[r]) > std::abs(w[best.row]);
      } else {
        take = false;
      }
      if (take) {
        best.step = ratio;
        best.row = r;
        best.hit = hit;
      }
    }
    // The entering variable's own opposite bound can block first.
    if (lo_[entering] > -kInf && up_[entering] < kInf) {
      const double span = up_[entering] - lo_[entering];
      if (span < best.step - 1e-12) {
        best.step = span;
        best.row = -1;
      }
    }
    return best;
  }

  void apply_step(int entering, int dir, const std::vector<double>& w,
                  const RatioResult& rr) {
    const double t = rr.step;
    for (int r = 0; r < m_; ++r) xb_[r] -= dir * t * w[r];
    if (rr.row < 0) {  // bound flip
      status_vec_[entering] = status_vec_[entering] == VarStatus::AtLower
                                  ? VarStatus::AtUpper
                                  : VarStatus::AtLower;
      bump_iteration(t);
      return;
    }
    const double enter_value = nonbasic_value(entering) + dir * t;
    const int leaving = basic_[rr.row];
    status_vec_[leaving] = rr.hit;
    pivot_update(rr.row, w);
    basic_[rr.row] = entering;
    status_vec_[entering] = VarStatus::Basic;
    xb_[rr.row] = enter_value;
    bump_iteration(t);
  }

  // Picks an eligible entering column; returns (-1, 0) when none.
  std::pair<int, int> price(const std::vector<double>& y, bool phase_one) const {
    int entering = -1, dir = 0;
    double best_score = kDualTol;
    for (int j = 0; j < total_; ++j) {
      if (status_vec_[j] == VarStatus::Basic) continue;
      const double cj = phase_one ? 0.0 : cost_[j];
      const double d = reduced_cost(j, y, cj);
      int cand_dir = 0;
      if (status_vec_[j] == VarStatus::AtLower && d < -kDualTol) {
        cand_dir = 1;
      } else if (status_vec_[j] == VarStatus::AtUpper && d > kDualTol) {
        cand_dir = -1;
      } else if (status_vec_[j] == VarStatus::NonbasicFree && std::abs(d) > kDualTol) {
        cand_dir = d < 0 ? 1 : -1;
      }
      if (cand_dir == 0) continue;
      if (bland_) return {j, cand_dir};
      if (std::abs(d) > best_score) {
        best_score = std::abs(d);
        entering = j;
        dir = cand_dir;
      }
    }
    return {entering, dir};
  }

  void phase1() {
    std::vector<double> gamma(m_), y, w;
    while (infeasibility() > kFeasTol * scale_) {
      for (int r = 0; r < m_; ++r) {
        const int v = basic_[r];
        gamma[r] = 0.0;
        if (xb_[r] < lo_[v] - kFeasTol) gamma[r] = -1.0;
        else if (xb_[r] > up_[v] + kFeasTol) gamma[r] = 1.0;
      }
      compute_y(gamma, y);
      const auto [entering, dir] = price(y, /*phase_one=*/true);
      if (entering < 0) {
        status_ = LpStatus::Infeasible;
        return;
      }
      ftran(entering, w);
      const RatioResult rr = ratio_test(w, dir, entering, /*phase_one=*/true);
      if (rr.step == kInf) throw NumericalFailure("unbounded phase-1 direction");
      apply_step(entering, dir, w, rr);
    }
  }

  void phase2() {
    std::vector<double> cb(m_), y, w;
    while (true) {
      for (int r = 0; r < m_; ++r) cb[r] = cost_[basic_[r]];
      compute_y(cb, y);
      const auto [entering, dir] = price(y, /*phase_one=*/false);
      if (entering < 0) {
        status_ = LpStatus::Optimal;
        return;
      }
      ftran(entering, w);
      const RatioResult rr = ratio_test(w, dir, entering, /*phase_one=*/false);
      if (rr.step == kInf) {
        status_ = LpStatus::Unbounded;
        return;
      }
      apply_step(entering, dir, w, rr);
    }
  }

  LpSolution make_solution() {
    LpSolution sol;
    sol.status = status_;
    sol.pivots = pivots_;
    if (status_ != LpStatus::Optimal) return sol;
    refactorize();  // clean solution and tableau
    std::vector<double> cb(m_);
    for (int r = 0; r < m_; ++r) cb[r] = cost_[basic_[r]];
    compute_y(cb, sol.duals);
    sol.x.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j)
      if (status_vec_[j] != VarStatus::Basic) sol.x[j] = nonbasic_value(j);
    for (int r = 0; r < m_; ++r)
      if (basic_[r] < n_) sol.x[basic_[r]] = xb_[r];
    double z = 0.0;
    for (int j = 0; j < n_; ++j) z += inst_.objective[j] * sol.x[j];
    sol.objective = z;
    sol.var_status = status_vec_;
    sol.pivots = pivots_;
    if (options_.want_tableau) extract_tableau(sol);
    return sol;
  }

  void extract_tableau(LpSolution& sol) const {
    for (int r = 0; r < m_; ++r) {
      const int v = basic_[r];
      if (v >= n_ || !inst_.is_integer(v)) continue;
      const double value = xb_[r];
      const double frac = value - std::floor(value);
      if (frac < kIntTol || frac > 1.0 - kIntTol) continue;
      TableauRow row;
      row.basic_var = v;
      row.value = value;
      row.coef.assign(total_, 0.0);
      const double* binv_row = &binv_[idx(r, 0)];
      for (int j = 0; j < total_; ++j) {
        if (status_vec_[j] == VarStatus::Basic) continue;
        double acc = 0.0;
        for (const auto& [i, a] : cols_[j].entries) acc += binv_row[i] * a;
        if (std::abs(acc) > 1e-12) row.coef[j] = acc;
      }
      sol.tableau_rows.push_back(std::move(row));
    }
  }

  const MilpInstance& inst_;
  SimplexOptions options_;
  int n_ = 0, m_ = 0, total_ = 0;
  std::vector<double> lo_, up_, cost_, b_;
  double scale_ = 1.0;
  std::vector<SparseCol> cols_;

  std::vector<int> basic_;
  std::vector<VarStatus> status_vec_;
  std::vector<double> binv_;
  std::vector<double> xb_;

  LpStatus status_ = LpStatus::Optimal;
  long pivots_ = 0;
  long iterations_ = 0;
  long max_iterations_ = 0;
  int pivots_since_refactor_ = 0;
  int degenerate_streak_ = 0;
  bool bland_ = false;
};

}  // namespace

LpSolution solve_lp(const MilpInstance& instance, const SimplexOptions& options) {
  return solve_lp_bounded(instance, instance.lower, instance.upper, options, nullptr);
}

LpSolution solve_lp_bounded(const MilpInstance& instance,
                            const std::vector<double>& lower,
                            const std::vector<double>& upper,
                            const SimplexOptions& options, long* work) {
  Simplex solver(instance, lower, upper, options);
  try {
    LpSolution sol = solver.run();
    if (work != nullptr) *work += sol.pivots;
    return sol;
  } catch (const NumericalFailure&) {
    if (work != nullptr) *work += solver.pivots();
    throw;
  }
}

}  // namespace cutsel
