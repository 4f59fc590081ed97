#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cutsel/engine.hpp"
#include "cutsel/features.hpp"
#include "cutsel/instance_gen.hpp"
#include "cutsel/selector.hpp"

namespace cutsel {

struct EvalRecord {
  std::string method;
  std::string instance;
  std::uint64_t seed = 0;
  double time = 0.0;  // active metric: work units in deterministic mode
  double wall = 0.0;  // wall seconds; kept out of the canonical outputs
  double nodes = 0.0;
  double pd_gap = 0.0;
  double pd_integral = 0.0;
  std::string status;
};

struct MethodRow {
  std::string method;
  double time_mean = 0, time_sd = 0;
  double nodes_mean = 0, nodes_sd = 0;
  double gap_mean = 0, gap_sd = 0;
  double pdi_mean = 0, pdi_sd = 0;
  bool has_improvement = false;  // false for the NoCuts row itself
  double improvement_time = 0;   // fraction, vs NoCuts
  double improvement_pdi = 0;
};

struct EvalReport {
  std::vector<EvalRecord> records;  // per instance x seed x method
  std::vector<MethodRow> rows;
};

struct NamedSelector {
  std::string name;
  std::shared_ptr<const CutSelector> selector;
};

struct EvalOptions {
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  SolveConfig solve;
  int workers = 1;
};

// Runs every selector over every instance and seed and aggregates
// mean/stdev rows plus Improvement columns computed against the method
// named "nocuts" (when present).
EvalReport evaluate(const std::vector<NamedSelector>& selectors,
                    const std::vector<MilpInstance>& pool, const EvalOptions& options);

// Recomputes the aggregate rows from raw records (used after CSV reload).
std::vector<MethodRow> aggregate_records(const std::vector<EvalRecord>& records);

std::string report_records_csv(const EvalReport& report);  // canonical, no wall clock
std::string report_timings_csv(const EvalReport& report);  // wall-clock sidecar
std::string report_summary_csv(const EvalReport& report);
std::string report_table(const EvalReport& report);  // 2-decimal metrics, 1-decimal %
std::vector<EvalRecord> records_from_csv(const std::string& text);

// ---- order-sensitivity study ----

struct OrderStudyInstance {
  std::string instance;
  long pool_size = 0;
  double mean_pdi = 0.0;
  double stdev_pdi = 0.0;
};

struct OrderStudyResult {
  std::vector<OrderStudyInstance> instances;
  // share of instances with >= 5 candidate cuts whose spread is nonzero
  double fraction_nonzero_spread = 0.0;
  int eligible = 0;
};

// Runs the rule with n_orders different selector seeds per instance and
// reports the spread of the PD integral across the orders.
OrderStudyResult order_study(const std::vector<MilpInstance>& pool,
                             const CutSelector& rule, int n_orders,
                             const SolveConfig& solve, std::uint64_t seed);
std::string order_study_csv(const OrderStudyResult& result);

// ---- PCA of selected-cut features ----

struct PcaResult {
  bool degenerate = false;                      // all rows identical
  std::vector<std::array<double, 2>> coords;    // one per input row
  std::vector<double> eigenvalues;              // all 13, descending
  std::array<int, 4> extremes = {-1, -1, -1, -1};  // min-x, max-x, min-y, max-y
};

// Centers the rows and projects onto the top-2 principal components of the
// sample covariance (eigen-decomposition; deterministic sign convention).
PcaResult pca_project(const std::vector<std::array<double, kFeatureDim>>& rows);
std::string pca_csv(const PcaResult& result);

// Jacobi eigen-decomposition of a symmetric matrix (row-major, dim x dim);
// eigenvalues descending, eigenvectors in the columns of vectors_out.
void symmetric_eigen(std::vector<double>& matrix, int dim,
                     std::vector<double>* eigenvalues,
                     std::vector<double>* vectors_out);

}  // namespace cutsel
