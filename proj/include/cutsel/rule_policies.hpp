#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cutsel/layers.hpp"
#include "cutsel/selector.hpp"

namespace cutsel {

// Free-function forms of the rule policies (the selector classes wrap these).
std::vector<int> select_nv(const CutSelState& state, double ratio);
std::vector<int> select_eff(const CutSelState& state, double ratio);
std::vector<int> select_random(const CutSelState& state, double ratio, Rng& rng);
std::vector<int> select_random_all(const CutSelState& state, Rng& rng);
std::vector<int> select_random_nv(const CutSelState& state, double ratio, Rng& rng);

class NoCutsSelector final : public CutSelector {
 public:
  std::vector<int> select(const CutSelState&, const std::vector<Cut>&, Rng&) const override {
    return {};
  }
  std::string name() const override { return "nocuts"; }
};

class NvSelector final : public CutSelector {
 public:
  explicit NvSelector(double ratio = 0.2) : ratio_(ratio) {}
  std::vector<int> select(const CutSelState& state, const std::vector<Cut>&,
                          Rng&) const override {
    return select_nv(state, ratio_);
  }
  std::string name() const override { return "nv"; }

 private:
  double ratio_;
};

class EffSelector final : public CutSelector {
 public:
  explicit EffSelector(double ratio = 0.2) : ratio_(ratio) {}
  std::vector<int> select(const CutSelState& state, const std::vector<Cut>&,
                          Rng&) const override {
    return select_eff(state, ratio_);
  }
  std::string name() const override { return "eff"; }

 private:
  double ratio_;
};

// Selects a random fixed-ratio subset in random order.
class RandomSelector final : public CutSelector {
 public:
  explicit RandomSelector(double ratio = 0.2) : ratio_(ratio) {}
  std::vector<int> select(const CutSelState& state, const std::vector<Cut>&,
                          Rng& rng) const override {
    return select_random(state, ratio_, rng);
  }
  std::string name() const override { return "random"; }

 private:
  double ratio_;
};

// Adds all candidate cuts in a uniformly random order.
class RandomAllSelector final : public CutSelector {
 public:
  std::vector<int> select(const CutSelState& state, const std::vector<Cut>&,
                          Rng& rng) const override {
    return select_random_all(state, rng);
  }
  std::string name() const override { return "randomall"; }
};

// Top cuts by normalized violation, then a uniformly random order.
class RandomNvSelector final : public CutSelector {
 public:
  explicit RandomNvSelector(double ratio = 0.2) : ratio_(ratio) {}
  std::vector<int> select(const CutSelState& state, const std::vector<Cut>&,
                          Rng& rng) const override {
    return select_random_nv(state, ratio_, rng);
  }
  std::string name() const override { return "randomnv"; }

 private:
  double ratio_;
};

// Score-based policy: an independent per-cut MLP scorer (13 -> 128 -> 128 -> 1,
// tanh hidden layers), top ratio by score in descending-score order.
struct SbpParams {
  Mlp scorer;
  double ratio = 0.2;

  SbpParams() = default;
  explicit SbpParams(Rng& rng, int hidden = 128);
  ParamList params() { return scorer.params(); }
  ParamList params() const { return scorer.params(); }

  double score(const CutFeatures& f) const;
};

std::vector<int> sbp_select(const SbpParams& params, const CutSelState& state);

class SbpSelector final : public CutSelector {
 public:
  explicit SbpSelector(std::shared_ptr<const SbpParams> params)
      : params_(std::move(params)) {}
  std::vector<int> select(const CutSelState& state, const std::vector<Cut>&,
                          Rng&) const override {
    return sbp_select(*params_, state);
  }
  std::string name() const override { return "sbp"; }

 private:
  std::shared_ptr<const SbpParams> params_;
};

}  // namespace cutsel
