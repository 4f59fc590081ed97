#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace cutsel {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Tolerances shared across the solver stack.
inline constexpr double kFeasTol = 1e-7;       // row / bound feasibility
inline constexpr double kIntTol = 1e-6;        // integrality
inline constexpr double kCutFracMin = 1e-4;    // fractionality window for cut rows
inline constexpr double kDedupTol = 1e-9;      // cut pool dedup (max-norm)
inline constexpr double kGapInit = 100.0;      // initial primal-dual gap constant

// One <= constraint, stored sparse.
struct Row {
  std::vector<std::pair<int, double>> coefs;  // (variable index, coefficient)
  double rhs = 0.0;
};

// A valid inequality alpha^T x <= beta over the original variables.
struct Cut {
  std::vector<std::pair<int, double>> alpha;
  double beta = 0.0;
  int source_row = -1;  // tableau row the cut was derived from
  int round = 0;        // separation round
  long id = -1;         // assigned at generation time, monotonically increasing
};

// Minimization MILP: min c^T x  s.t.  A x <= b,  lo <= x <= up,
// x_j integer for j in integer_set.
struct MilpInstance {
  std::string name;
  int n = 0;  // variables
  std::vector<double> objective;           // length n
  std::vector<Row> rows;                   // m constraints, all <=
  std::vector<int> integer_set;            // sorted indices
  std::vector<double> lower;               // length n, default 0
  std::vector<double> upper;               // length n, default +inf

  int num_rows() const { return static_cast<int>(rows.size()); }
  bool is_integer(int j) const;

  // Checks the structural invariants; throws DimensionMismatch on violation.
  void validate() const;
};

// Appends cuts as <= rows, preserving the given order.
MilpInstance add_rows(const MilpInstance& instance, const std::vector<Cut>& cuts);

// JSON instance format. Round-trips bit-exactly: write -> read -> write
// produces identical bytes. ">=" and "=" relations are normalized to "<="
// at load time (negation / row splitting).
std::string instance_to_json(const MilpInstance& instance);
MilpInstance instance_from_json(const std::string& text);
void write_instance(const MilpInstance& instance, const std::string& path);
MilpInstance read_instance(const std::string& path);

}  // namespace cutsel
