#include "cutsel/gomory.hpp"

#include <algorithm>
#include <cmath>

#include "cutsel/errors.hpp"

namespace cutsel {

namespace {

double frac(double v) { return v - std::floor(v); }

// Normalized max-norm distance between (alpha, beta) pairs; cuts are scaled
// by their largest |alpha| entry before comparison.
bool same_cut(const Cut& a, const Cut& b) {
  if (a.alpha.size() != b.alpha.size()) return false;
  double na = 0.0, nb = 0.0;
  for (const auto& [j, v] : a.alpha) {
    (void)j;
    na = std::max(na, std::abs(v));
  }
  for (const auto& [j, v] : b.alpha) {
    (void)j;
    nb = std::max(nb, std::abs(v));
  }
  if (na == 0.0 || nb == 0.0) return false;
  for (std::size_t k = 0; k < a.alpha.size(); ++k) {
    if (a.alpha[k].first != b.alpha[k].first) return false;
    if (std::abs(a.alpha[k].second / na - b.alpha[k].second / nb) >= kDedupTol)
      return false;
  }
  return std::abs(a.beta / na - b.beta / nb) < kDedupTol;
}

}  // namespace

std::vector<Cut> generate_cuts(const MilpInstance& instance, const LpSolution& lp,
                               int round, long first_id) {
  std::vector<Cut> pool;
  if (lp.status != LpStatus::Optimal) return pool;
  const int n = instance.n;
  const int total = n + instance.num_rows();
  long next_id = first_id;

  for (const TableauRow& row : lp.tableau_rows) {
    const double f0 = frac(row.value);
    if (f0 < kCutFracMin || f0 > 1.0 - kCutFracMin) continue;

    // Coefficients of the cut sum_j pi_j t_j >= 1 over the shifted nonbasic
    // variables t_j >= 0 (t = x - lo at a lower bound, t = up - x at an
    // upper bound, slacks always at 0).
    bool usable = true;
    std::vector<double> q(n, 0.0);  // accumulated x-space coefficients
    double constant = 0.0;          // accumulated constant terms
    for (int j = 0; j < total && usable; ++j) {
      const double coef = row.coef[j];
      if (coef == 0.0) continue;
      const VarStatus st = lp.var_status[j];
      if (st == VarStatus::Basic) continue;
      if (st == VarStatus::NonbasicFree) {
        usable = false;  // no valid shift for a free nonbasic
        break;
      }
      const bool at_lower = st == VarStatus::AtLower;
      const double g = at_lower ? coef : -coef;
      double pi;
      if (j < n && instance.is_integer(j)) {
        const double fj = frac(g);
        pi = fj <= f0 + 1e-12 ? fj / f0 : (1.0 - fj) / (1.0 - f0);
      } else {
        pi = g > 0.0 ? g / f0 : -g / (1.0 - f0);
      }
      if (pi == 0.0) continue;
      if (j < n) {
        if (at_lower) {
          q[j] += pi;
          constant -= pi * instance.lower[j];
        } else {
          q[j] -= pi;
          constant += pi * instance.upper[j];
        }
      } else {
        // slack of row i: t = b_i - A_i x
        const Row& orig = instance.rows[j - n];
        constant += pi * orig.rhs;
        for (const auto& [k, a] : orig.coefs) q[k] -= pi * a;
      }
    }
    if (!usable) continue;

    Cut cut;
    cut.beta = constant - 1.0;  // sum q_k x_k >= 1 - constant, negated to <=
    for (int k = 0; k < n; ++k)
      if (std::abs(q[k]) > 1e-12) cut.alpha.emplace_back(k, -q[k]);
    if (cut.alpha.empty()) continue;
    cut.source_row = row.basic_var;
    cut.round = round;

    bool duplicate = false;
    for (const Cut& kept : pool) {
      if (same_cut(kept, cut)) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;
    cut.id = next_id++;
    pool.push_back(std::move(cut));
  }
  return pool;
}

}  // namespace cutsel
