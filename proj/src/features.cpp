#include "cutsel/features.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cutsel/errors.hpp"

namespace cutsel {

const char* const kFeatureCsvHeader =
    "coef_mean,coef_max,coef_min,coef_std,obj_mean,obj_max,obj_min,obj_std,"
    "parallelism,efficacy,support,integral_support,normalized_violation";

namespace {

struct Stats {
  double mean = 0, max = 0, min = 0, std = 0;
};

Stats moments(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  s.max = v[0];
  s.min = v[0];
  double sum = 0;
  for (double x : v) {
    sum += x;
    s.max = std::max(s.max, x);
    s.min = std::min(s.min, x);
  }
  s.mean = sum / static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(v.size()));
  return s;
}

}  // namespace

CutSelState featurize(const MilpInstance& instance, const LpSolution& lp,
                      const std::vector<Cut>& cuts) {
  CutSelState state;
  state.features.reserve(cuts.size());
  double c_norm = 0.0;
  for (double cj : instance.objective) c_norm += cj * cj;
  c_norm = std::sqrt(c_norm);

  for (const Cut& cut : cuts) {
    std::vector<double> coefs, objs;
    coefs.reserve(cut.alpha.size());
    double a_norm2 = 0.0, activity = 0.0, c_dot_a = 0.0;
    int nnz = 0, nnz_int = 0;
    for (const auto& [j, v] : cut.alpha) {
      if (v == 0.0) continue;
      ++nnz;
      if (instance.is_integer(j)) ++nnz_int;
      coefs.push_back(v);
      objs.push_back(instance.objective[j]);
      a_norm2 += v * v;
      activity += v * lp.x[j];
      c_dot_a += instance.objective[j] * v;
    }
    if (nnz == 0) throw ZeroNormCut("cut " + std::to_string(cut.id) + " has no nonzeros");
    const double a_norm = std::sqrt(a_norm2);

    CutFeatures f;
    const Stats cs = moments(coefs);
    f.coef_mean = cs.mean;
    f.coef_max = cs.max;
    f.coef_min = cs.min;
    f.coef_std = cs.std;
    const Stats os = moments(objs);
    f.obj_mean = os.mean;
    f.obj_max = os.max;
    f.obj_min = os.min;
    f.obj_std = os.std;
    f.parallelism = c_norm > 0.0 ? c_dot_a / (c_norm * a_norm) : 0.0;
    f.parallelism = std::clamp(f.parallelism, -1.0, 1.0);
    f.efficacy = std::abs(activity - cut.beta) / a_norm;
    f.support = static_cast<double>(nnz) / static_cast<double>(instance.n);
    f.integral_support = static_cast<double>(nnz_int) / static_cast<double>(nnz);
    const double denom = std::abs(cut.beta) < 1e-9 ? 1.0 : std::abs(cut.beta);
    f.normalized_violation = std::max(0.0, (activity - cut.beta) / denom);
    state.features.push_back(f);
  }
  return state;
}

std::string features_to_csv(const CutSelState& state) {
  std::ostringstream out;
  out << kFeatureCsvHeader << "\n";
  out.precision(17);
  for (const CutFeatures& f : state.features) {
    const auto a = f.to_array();
    for (int i = 0; i < kFeatureDim; ++i) {
      if (i) out << ",";
      out << a[static_cast<std::size_t>(i)];
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace cutsel
