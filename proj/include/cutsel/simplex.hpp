#pragma once

#include <cstdint>
#include <vector>

#include "cutsel/milp.hpp"

namespace cutsel {

enum class LpStatus { Optimal, Infeasible, Unbounded };

enum class VarStatus : std::uint8_t { Basic, AtLower, AtUpper, NonbasicFree };

// Tableau row of a fractional basic integer variable: the equation
//   x[basic_var] + sum_j coef[j] * x[j] = value   (coef nonzero only on
// nonbasic columns; columns n..n+m-1 are the slack variables of the rows).
struct TableauRow {
  int basic_var = -1;
  double value = 0.0;
  std::vector<double> coef;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;                 // length n, primal values
  double objective = 0.0;                // c^T x
  std::vector<VarStatus> var_status;     // length n + m (structurals, then slacks)
  std::vector<double> duals;             // length m, row duals
  std::vector<TableauRow> tableau_rows;  // one per fractional basic integer var
  long pivots = 0;                       // simplex pivots spent on this solve
};

struct SimplexOptions {
  bool want_tableau = true;
  long max_iterations = 0;  // 0 -> automatic cap from problem size
};

// Solves the LP relaxation of `instance` (integrality dropped).
// Throws NumericalFailure when pivoting stalls beyond the iteration cap.
LpSolution solve_lp(const MilpInstance& instance, const SimplexOptions& options = {});

// Same, with overriding variable bounds (used by branch-and-bound nodes).
// Consumed pivots are added to *work even when NumericalFailure is thrown.
LpSolution solve_lp_bounded(const MilpInstance& instance,
                            const std::vector<double>& lower,
                            const std::vector<double>& upper,
                            const SimplexOptions& options = {}, long* work = nullptr);

}  // namespace cutsel
