#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cutsel/milp.hpp"
#include "cutsel/selector.hpp"
#include "cutsel/simplex.hpp"

namespace cutsel {

enum class SolveStatus { OptimalProven, TimeLimit, NodeLimit };

enum class TimeMode { WallClock, WorkUnits };

struct SolveConfig {
  double time_limit = 300.0;  // wall seconds (active in WallClock mode)
  double work_limit = 100000.0;  // simplex pivots (active in WorkUnits mode)
  long node_limit = std::numeric_limits<long>::max();
  int separation_rounds = 1;  // T; cut separation stops after T root rounds
  std::uint64_t seed = 0;
  double gap_init = kGapInit;
  TimeMode time_mode = TimeMode::WorkUnits;

  double horizon() const {
    return time_mode == TimeMode::WallClock ? time_limit : work_limit;
  }
};

struct BoundEvent {
  double t = 0.0;     // timestamp in the active clock's units
  double bound = 0.0;
};

struct SolveStats {
  SolveStatus status = SolveStatus::OptimalProven;
  double solve_time = 0.0;  // wall seconds, always recorded
  double work_units = 0.0;  // simplex pivots, always recorded
  long nodes = 0;
  std::vector<BoundEvent> primal_events;  // nonincreasing bounds
  std::vector<BoundEvent> dual_events;    // nondecreasing bounds
  double pd_gap = 0.0;
  double pd_integral = 0.0;
  bool numerical_trouble = false;
  bool has_incumbent = false;
  double best_objective = kInf;
  std::vector<double> best_x;
  double dual_bound = -kInf;
  double proven_time = kInf;  // clock value at which optimality was proven
  double root_dual_before_cuts = -kInf;
  double root_dual_after_cuts = -kInf;
  long root_cuts_added = 0;
  long root_pool_size = 0;  // candidates offered to the selector (last round)
};

// Runs T root separation rounds (solve LP, generate pool, let the selector
// pick an ordered subset, append it) followed by best-first branch-and-bound
// with most-fractional branching. All bound improvements are timestamped.
SolveStats branch_and_cut(const MilpInstance& instance, const CutSelector& selector,
                          const SolveConfig& config);

// Piecewise-constant integral of the primal-dual gap over [0, horizon].
// Intervals where either bound is unknown contribute gap_init; after the
// proof of optimality the gap is 0.
double pd_integral(const SolveStats& stats, double horizon,
                   double gap_init = kGapInit);

// (nocuts - method) / nocuts. Throws UndefinedImprovement when nocuts == 0.
double improvement(double metric_nocuts, double metric_method);

std::string stats_to_json(const SolveStats& stats);

}  // namespace cutsel
