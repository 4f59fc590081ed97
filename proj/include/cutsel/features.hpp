#pragma once

#include <array>
#include <string>
#include <vector>

#include "cutsel/milp.hpp"
#include "cutsel/simplex.hpp"

namespace cutsel {

inline constexpr int kFeatureDim = 13;

// Thirteen per-cut features describing a candidate cut relative to the
// current LP relaxation and its optimal solution.
struct CutFeatures {
  double coef_mean = 0, coef_max = 0, coef_min = 0, coef_std = 0;
  double obj_mean = 0, obj_max = 0, obj_min = 0, obj_std = 0;
  double parallelism = 0;
  double efficacy = 0;
  double support = 0;
  double integral_support = 0;
  double normalized_violation = 0;

  std::array<double, kFeatureDim> to_array() const {
    return {coef_mean, coef_max,  coef_min, coef_std,        obj_mean,
            obj_max,   obj_min,   obj_std,  parallelism,     efficacy,
            support,   integral_support,    normalized_violation};
  }
  static CutFeatures from_array(const std::array<double, kFeatureDim>& a) {
    CutFeatures f;
    f.coef_mean = a[0];
    f.coef_max = a[1];
    f.coef_min = a[2];
    f.coef_std = a[3];
    f.obj_mean = a[4];
    f.obj_max = a[5];
    f.obj_min = a[6];
    f.obj_std = a[7];
    f.parallelism = a[8];
    f.efficacy = a[9];
    f.support = a[10];
    f.integral_support = a[11];
    f.normalized_violation = a[12];
    return f;
  }
};

// The selection state: one feature row per candidate cut, in cut-id order.
struct CutSelState {
  std::vector<CutFeatures> features;
  int size() const { return static_cast<int>(features.size()); }
};

// Encodes (instance, LP optimum, candidate cuts) as feature rows.
// Objective statistics are taken over the entries of c on the cut's support.
// Throws ZeroNormCut when a cut has no nonzero coefficient.
CutSelState featurize(const MilpInstance& instance, const LpSolution& lp,
                      const std::vector<Cut>& cuts);

extern const char* const kFeatureCsvHeader;

// One row per cut, 13 columns, fixed header.
std::string features_to_csv(const CutSelState& state);

}  // namespace cutsel
