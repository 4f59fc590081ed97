#include "cutsel/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

#include "cutsel/errors.hpp"
#include "cutsel/features.hpp"
#include "cutsel/gomory.hpp"
#include "json.hpp"

namespace cutsel {

namespace {

using Clock = std::chrono::steady_clock;

struct Node {
  double bound = -kInf;  // parent LP objective, valid for the whole subtree
  long order = 0;        // FIFO tiebreak
  std::vector<double> lower, upper;
};

struct NodeCompare {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.order > b.order;
  }
};

bool is_integral(const MilpInstance& inst, const std::vector<double>& x) {
  for (int j : inst.integer_set) {
    const double v = x[j];
    if (std::abs(v - std::round(v)) > kIntTol) return false;
  }
  return true;
}

// Snaps integer components and evaluates the point against the original
// instance; +inf when the snapped point is infeasible.
double rounded_objective(const MilpInstance& inst, std::vector<double>& x) {
  for (int j : inst.integer_set) {
    double v = std::round(x[j]);
    v = std::clamp(v, inst.lower[j], inst.upper[j]);
    x[j] = v;
  }
  for (const Row& row : inst.rows) {
    double act = 0.0;
    for (const auto& [j, a] : row.coefs) act += a * x[j];
    if (act > row.rhs + kFeasTol) return kInf;
  }
  double z = 0.0;
  for (int j = 0; j < inst.n; ++j) z += inst.objective[j] * x[j];
  return z;
}

class Run {
 public:
  Run(const MilpInstance& instance, const CutSelector& selector,
      const SolveConfig& config)
      : orig_(instance), selector_(selector), config_(config), start_(Clock::now()) {}

  SolveStats execute() {
    orig_.validate();
    separate_root();
    if (!proven_ && !aborted_ && !limit_reached_) search();
    finish();
    return stats_;
  }

 private:
  double wall() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }

  double now() const {
    return config_.time_mode == TimeMode::WallClock ? wall() : static_cast<double>(work_);
  }

  // Checks the active limits; sets limit_reached_ and the status on a hit.
  bool limit_hit() {
    if (config_.time_mode == TimeMode::WallClock) {
      if (wall() >= config_.time_limit) {
        stats_.status = SolveStatus::TimeLimit;
        limit_reached_ = true;
      }
    } else if (static_cast<double>(work_) >= config_.work_limit) {
      stats_.status = SolveStatus::TimeLimit;
      limit_reached_ = true;
    }
    if (!limit_reached_ && stats_.nodes >= config_.node_limit) {
      stats_.status = SolveStatus::NodeLimit;
      limit_reached_ = true;
    }
    return limit_reached_;
  }

  void record_dual(double bound) {
    if (bound <= stats_.dual_bound + 1e-12) return;
    stats_.dual_bound = bound;
    stats_.dual_events.push_back({now(), bound});
  }

  void record_primal(double bound, const std::vector<double>& x) {
    if (stats_.has_incumbent && bound >= stats_.best_objective - 1e-12) return;
    stats_.has_incumbent = true;
    stats_.best_objective = bound;
    stats_.best_x = x;
    stats_.primal_events.push_back({now(), bound});
  }

  const MilpInstance& model() const { return has_cut_model_ ? cut_model_ : orig_; }

  void separate_root() {
    Rng rng = Rng(config_.seed).child(0x9c75);
    long next_cut_id = 0;
    for (int round = 0; round < config_.separation_rounds; ++round) {
      if (limit_hit()) return;
      LpSolution lp;
      try {
        SimplexOptions opt;
        opt.want_tableau = true;
        lp = solve_lp_bounded(model(), model().lower, model().upper, opt, &work_);
      } catch (const NumericalFailure&) {
        stats_.numerical_trouble = true;
        return;  // fall through to the search on the current model
      }
      if (lp.status == LpStatus::Infeasible) {
        proven_ = true;  // no integer point either
        return;
      }
      if (lp.status == LpStatus::Unbounded) {
        stats_.numerical_trouble = true;
        aborted_ = true;
        return;
      }
      if (round == 0) stats_.root_dual_before_cuts = lp.objective;
      record_dual(lp.objective);
      if (is_integral(orig_, lp.x)) {
        std::vector<double> x = lp.x;
        const double z = rounded_objective(orig_, x);
        if (z < kInf) {
          record_primal(z, x);
          stats_.nodes = 1;
          record_dual(z);
          proven_ = true;
          return;
        }
      }
      std::vector<Cut> pool = generate_cuts(model(), lp, round, next_cut_id);
      if (pool.empty()) return;
      next_cut_id = pool.back().id + 1;
      stats_.root_pool_size = static_cast<long>(pool.size());
      const CutSelState state = featurize(model(), lp, pool);
      const std::vector<int> order = selector_.select(state, pool, rng);
      std::vector<char> seen(pool.size(), 0);
      std::vector<Cut> chosen;
      chosen.reserve(order.size());
      for (int idx : order) {
        if (idx < 0 || idx >= static_cast<int>(pool.size()) || seen[idx])
          throw InvalidSelection(selector_.name() + " returned a bad index set");
        seen[idx] = 1;
        chosen.push_back(pool[static_cast<std::size_t>(idx)]);
      }
      if (chosen.empty()) return;  // an empty addition would repeat forever
      cut_model_ = add_rows(model(), chosen);
      has_cut_model_ = true;
      stats_.root_cuts_added += static_cast<long>(chosen.size());
    }
  }

  void search() {
    const MilpInstance& inst = model();
    std::priority_queue<Node, std::vector<Node>, NodeCompare> open;
    long order_counter = 0;
    open.push({stats_.dual_bound, order_counter++, inst.lower, inst.upper});

    bool first_node = true;
    while (!open.empty()) {
      if (limit_hit()) return;
      Node node = open.top();
      open.pop();
      if (stats_.has_incumbent && node.bound >= stats_.best_objective - 1e-9)
        break;  // best-first: every remaining node is at least as bad
      record_dual(node.bound);
      ++stats_.nodes;

      LpSolution lp;
      try {
        SimplexOptions opt;
        opt.want_tableau = false;
        lp = solve_lp_bounded(inst, node.lower, node.upper, opt, &work_);
      } catch (const NumericalFailure&) {
        stats_.numerical_trouble = true;
        continue;
      }
      if (lp.status == LpStatus::Infeasible) {
        first_node = false;
        continue;
      }
      if (lp.status == LpStatus::Unbounded) {
        stats_.numerical_trouble = true;
        aborted_ = true;
        return;
      }
      if (first_node) {
        stats_.root_dual_after_cuts = lp.objective;
        first_node = false;
      }
      if (stats_.has_incumbent && lp.objective >= stats_.best_objective - 1e-9)
        continue;
      if (is_integral(inst, lp.x)) {
        std::vector<double> x = lp.x;
        const double z = rounded_objective(orig_, x);
        if (z < kInf) record_primal(z, x);
        continue;
      }
      {
        // One naive rounding attempt per node.
        std::vector<double> x = lp.x;
        const double z = rounded_objective(orig_, x);
        if (z < kInf) record_primal(z, x);
      }
      if (stats_.has_incumbent && lp.objective >= stats_.best_objective - 1e-9)
        continue;

      // Most-fractional branching, ties by lowest index.
      int branch_var = -1;
      double best_dist = 1.0;
      for (int j : inst.integer_set) {
        const double f = lp.x[j] - std::floor(lp.x[j]);
        if (f <= kIntTol || f >= 1.0 - kIntTol) continue;
        const double dist = std::abs(f - 0.5);
        if (dist < best_dist - 1e-12) {
          best_dist = dist;
          branch_var = j;
        }
      }
      if (branch_var < 0) continue;

      Node down{lp.objective, order_counter++, node.lower, node.upper};
      down.upper[branch_var] = std::floor(lp.x[branch_var]);
      Node up{lp.objective, order_counter++, node.lower, node.upper};
      up.lower[branch_var] = std::ceil(lp.x[branch_var]);
      if (down.lower[branch_var] <= down.upper[branch_var]) open.push(std::move(down));
      if (up.lower[branch_var] <= up.upper[branch_var]) open.push(std::move(up));
    }
    proven_ = true;
  }

  void finish() {
    stats_.solve_time = wall();
    stats_.work_units = static_cast<double>(work_);
    if (proven_ && !aborted_) {
      stats_.status = SolveStatus::OptimalProven;
      stats_.proven_time = now();
      if (stats_.has_incumbent) record_dual(stats_.best_objective);
    } else if (aborted_ && !limit_reached_) {
      stats_.status = SolveStatus::TimeLimit;
    }
    stats_.pd_gap = final_gap();
    stats_.pd_integral = pd_integral(stats_, config_.horizon(), config_.gap_init);
  }

  double final_gap() const {
    if (stats_.status == SolveStatus::OptimalProven) return 0.0;
    if (!stats_.has_incumbent || stats_.dual_bound == -kInf) return config_.gap_init;
    return std::max(0.0, stats_.best_objective - stats_.dual_bound);
  }

  MilpInstance orig_;
  MilpInstance cut_model_;
  bool has_cut_model_ = false;
  const CutSelector& selector_;
  SolveConfig config_;
  Clock::time_point start_;
  SolveStats stats_;
  long work_ = 0;
  bool proven_ = false;
  bool aborted_ = false;
  bool limit_reached_ = false;
};

}  // namespace

SolveStats branch_and_cut(const MilpInstance& instance, const CutSelector& selector,
                          const SolveConfig& config) {
  Run run(instance, selector, config);
  return run.execute();
}

double pd_integral(const SolveStats& stats, double horizon, double gap_init) {
  if (horizon <= 0.0) return 0.0;
  std::size_t pi = 0, di = 0;
  double primal = kInf, dual = -kInf;
  bool has_primal = false, has_dual = false;
  double t = 0.0, total = 0.0;

  auto gap_at = [&](double at) {
    if (at >= stats.proven_time) return 0.0;
    if (!has_primal || !has_dual) return gap_init;
    return std::max(0.0, primal - dual);
  };

  while (t < horizon) {
    double next = horizon;
    if (pi < stats.primal_events.size())
      next = std::min(next, stats.primal_events[pi].t);
    if (di < stats.dual_events.size())
      next = std::min(next, stats.dual_events[di].t);
    if (stats.proven_time > t && stats.proven_time < next)
      next = stats.proven_time;
    if (next > t) total += gap_at(t) * (std::min(next, horizon) - t);
    if (next >= horizon) break;
    while (pi < stats.primal_events.size() && stats.primal_events[pi].t <= next) {
      primal = stats.primal_events[pi].bound;
      has_primal = true;
      ++pi;
    }
    while (di < stats.dual_events.size() && stats.dual_events[di].t <= next) {
      dual = stats.dual_events[di].bound;
      has_dual = true;
      ++di;
    }
    t = next;
  }
  return total;
}

double improvement(double metric_nocuts, double metric_method) {
  if (metric_nocuts == 0.0) throw UndefinedImprovement("NoCuts metric is zero");
  return (metric_nocuts - metric_method) / metric_nocuts;
}

std::string stats_to_json(const SolveStats& stats) {
  nlohmann::json doc;
  doc["time"] = stats.solve_time;
  doc["work_units"] = stats.work_units;
  doc["nodes"] = stats.nodes;
  switch (stats.status) {
    case SolveStatus::OptimalProven:
      doc["status"] = "optimal";
      break;
    case SolveStatus::TimeLimit:
      doc["status"] = "timelimit";
      break;
    case SolveStatus::NodeLimit:
      doc["status"] = "nodelimit";
      break;
  }
  doc["pd_gap"] = stats.pd_gap;
  doc["pd_integral"] = stats.pd_integral;
  auto events = [](const std::vector<BoundEvent>& evs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const BoundEvent& e : evs) arr.push_back(nlohmann::json::array({e.t, e.bound}));
    return arr;
  };
  doc["primal_events"] = events(stats.primal_events);
  doc["dual_events"] = events(stats.dual_events);
  doc["numerical_trouble"] = stats.numerical_trouble;
  return doc.dump(2) + "\n";
}

}  // namespace cutsel
