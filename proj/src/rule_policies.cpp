#include "cutsel/rule_policies.hpp"

#include <algorithm>
#include <numeric>

namespace cutsel {

namespace {

// Top count indices by score, descending; ties broken by lower index (which
// equals the cut-id order of the pool).
std::vector<int> top_by_score(const std::vector<double>& scores, int count) {
  std::vector<int> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
  });
  idx.resize(static_cast<std::size_t>(count));
  return idx;
}

}  // namespace

std::vector<int> select_nv(const CutSelState& state, double ratio) {
  const int count = ratio_count_ceil(state.size(), ratio);
  std::vector<double> scores;
  scores.reserve(state.features.size());
  for (const CutFeatures& f : state.features) scores.push_back(f.normalized_violation);
  return top_by_score(scores, count);
}

std::vector<int> select_eff(const CutSelState& state, double ratio) {
  const int count = ratio_count_ceil(state.size(), ratio);
  std::vector<double> scores;
  scores.reserve(state.features.size());
  for (const CutFeatures& f : state.features) scores.push_back(f.efficacy);
  return top_by_score(scores, count);
}

std::vector<int> select_random(const CutSelState& state, double ratio, Rng& rng) {
  const int count = ratio_count_ceil(state.size(), ratio);
  std::vector<int> perm = rng.permutation(state.size());
  perm.resize(static_cast<std::size_t>(count));
  return perm;
}

std::vector<int> select_random_all(const CutSelState& state, Rng& rng) {
  return rng.permutation(state.size());
}

std::vector<int> select_random_nv(const CutSelState& state, double ratio, Rng& rng) {
  std::vector<int> top = select_nv(state, ratio);
  rng.shuffle(top);
  return top;
}

SbpParams::SbpParams(Rng& rng, int hidden)
    : scorer("sbp/scorer", {kFeatureDim, hidden, hidden, 1}, rng) {}

double SbpParams::score(const CutFeatures& f) const {
  Tape tape;
  const auto arr = f.to_array();
  const int x = tape.constant(Tensor::column({arr.begin(), arr.end()}));
  const int out = scorer.forward(tape, x);
  return tape.val(out).v[0];
}

std::vector<int> sbp_select(const SbpParams& params, const CutSelState& state) {
  const int count = ratio_count_ceil(state.size(), params.ratio);
  std::vector<double> scores;
  scores.reserve(state.features.size());
  for (const CutFeatures& f : state.features) scores.push_back(params.score(f));
  return top_by_score(scores, count);
}

}  // namespace cutsel
