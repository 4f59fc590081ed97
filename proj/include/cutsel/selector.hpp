#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cutsel/features.hpp"
#include "cutsel/milp.hpp"
#include "cutsel/rng.hpp"

namespace cutsel {

// A cut-selection policy. Given the feature state and the candidate pool,
// returns distinct pool indices in the order the cuts are to be added.
// Implementations must be safe for concurrent use (no mutable state beyond
// the caller-supplied rng).
class CutSelector {
 public:
  virtual ~CutSelector() = default;
  virtual std::vector<int> select(const CutSelState& state,
                                  const std::vector<Cut>& cuts, Rng& rng) const = 0;
  virtual std::string name() const = 0;
};

// Rule policies keep at least one cut whenever ratio > 0 and N > 0.
inline int ratio_count_ceil(int n, double ratio) {
  if (n <= 0 || ratio <= 0.0) return 0;
  return std::min<int>(n, static_cast<int>(std::ceil(ratio * n - 1e-12)));
}

// The learned policies size the selection with a floor instead.
inline int ratio_count_floor(int n, double ratio) {
  if (n <= 0 || ratio <= 0.0) return 0;
  return std::min<int>(n, static_cast<int>(std::floor(ratio * n + 1e-12)));
}

}  // namespace cutsel
