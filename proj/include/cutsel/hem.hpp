#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cutsel/features.hpp"
#include "cutsel/layers.hpp"
#include "cutsel/selector.hpp"

namespace cutsel {

inline constexpr double kLogSigmaMin = -6.907755278982137;  // log 1e-3
inline constexpr double kLogSigmaMax = 0.0;                 // log 1

// Hierarchical sequence model. theta1 is the ratio policy (sequence encoder
// plus a head producing mu and log sigma of a tanh-Gaussian); theta2 is the
// pointer network (encoder/decoder LSTMs, additive attention, learned decode
// start embedding).
struct HemParams {
  int feat_dim = kFeatureDim;
  int hidden = 128;

  Lstm ratio_encoder;
  Mlp ratio_head;  // hidden -> hidden -> hidden -> 2 (mu, log sigma)
  Lstm encoder;
  Lstm decoder;  // input: encoder embedding of the previously selected cut
  AdditiveAttention attention;
  Parameter start_token;

  HemParams() = default;
  explicit HemParams(Rng& rng, int hidden = 128, int feat_dim = kFeatureDim);

  ParamList theta1();
  ParamList theta2();
  ParamList all();
  ParamList theta1() const { return const_cast<HemParams*>(this)->theta1(); }
  ParamList theta2() const { return const_cast<HemParams*>(this)->theta2(); }
  ParamList all() const { return const_cast<HemParams*>(this)->all(); }
};

enum class DecodeMode { Sample, Greedy };

struct RatioSample {
  double k = 0.0;      // 0.5 * tanh(K) + 0.5
  double big_k = 0.0;  // the Gaussian draw
  double mu = 0.0;
  double sigma = 0.0;
  double logp = 0.0;  // tanh-Gaussian log-density of k
};

struct PointerResult {
  std::vector<int> indices;
  double logp = 0.0;
};

struct HemAction {
  double k = 0.0;
  double big_k = 0.0;
  int m = 0;  // floor(N * k)
  std::vector<int> indices;
  double logp_h = 0.0;
  double logp_l = 0.0;
};

// log-density of k = 0.5*tanh(K)+0.5 at the sampled K under N(mu, sigma),
// including the change-of-variables term for the squashing map.
double tanh_gauss_logpdf(double big_k, double mu, double sigma);

inline int ratio_to_count(int n, double k) { return ratio_count_floor(n, k); }

// Higher-level policy. Throws DegenerateState when the state is empty.
RatioSample sample_ratio(const HemParams& params, const CutSelState& state, Rng& rng);
RatioSample greedy_ratio(const HemParams& params, const CutSelState& state);

// Lower-level pointer decode of an ordered subset of exactly m indices.
PointerResult pointer_decode(const HemParams& params, const CutSelState& state, int m,
                             DecodeMode mode, Rng& rng);

// End-token variant: the input sequence is augmented with an all-ones token
// whose selection terminates decoding (the token itself is not reported).
PointerResult pointer_decode_end_token(const HemParams& params, const CutSelState& state,
                                       DecodeMode mode, Rng& rng);

// Full hierarchical action: sample (or take greedily) a ratio, then decode.
HemAction hem_select(const HemParams& params, const CutSelState& state, Rng& rng,
                     DecodeMode mode);

// Tape builders used by the trainer (score-function gradients).
// ratio_logp_tape returns the log-density node of a recorded draw big_k;
// pointer_logp_tape the log-probability node of a recorded ordered subset.
int ratio_logp_tape(const HemParams& params, Tape& tape, const CutSelState& state,
                    double big_k);
int pointer_logp_tape(const HemParams& params, Tape& tape, const CutSelState& state,
                      const std::vector<int>& action);

// Mean and sigma of the ratio head, forward only (used by tests/eval).
void ratio_head_values(const HemParams& params, const CutSelState& state, double* mu,
                       double* sigma);

class HemSelector final : public CutSelector {
 public:
  HemSelector(std::shared_ptr<const HemParams> params, DecodeMode mode)
      : params_(std::move(params)), mode_(mode) {}
  std::vector<int> select(const CutSelState& state, const std::vector<Cut>&,
                          Rng& rng) const override {
    if (state.size() == 0) return {};
    return hem_select(*params_, state, rng, mode_).indices;
  }
  std::string name() const override { return "hem"; }

 private:
  std::shared_ptr<const HemParams> params_;
  DecodeMode mode_;
};

// Fixed-ratio ablation: the pointer network selects floor(ratio * N) cuts.
class HemRatioSelector final : public CutSelector {
 public:
  HemRatioSelector(std::shared_ptr<const HemParams> params, DecodeMode mode,
                   double ratio = 0.2)
      : params_(std::move(params)), mode_(mode), ratio_(ratio) {}
  std::vector<int> select(const CutSelState& state, const std::vector<Cut>&,
                          Rng& rng) const override {
    if (state.size() == 0) return {};
    const int m = ratio_count_floor(state.size(), ratio_);
    return pointer_decode(*params_, state, m, mode_, rng).indices;
  }
  std::string name() const override { return "hem-ratio"; }

 private:
  std::shared_ptr<const HemParams> params_;
  DecodeMode mode_;
  double ratio_;
};

// Same selection as HemRatioSelector, re-sorted by the original cut index.
class HemRatioOrderSelector final : public CutSelector {
 public:
  HemRatioOrderSelector(std::shared_ptr<const HemParams> params, DecodeMode mode,
                        double ratio = 0.2)
      : inner_(std::move(params), mode, ratio) {}
  std::vector<int> select(const CutSelState& state, const std::vector<Cut>& cuts,
                          Rng& rng) const override;
  std::string name() const override { return "hem-ratio-order"; }

 private:
  HemRatioSelector inner_;
};

// End-token ablation (no higher-level model).
class HemNoHSelector final : public CutSelector {
 public:
  HemNoHSelector(std::shared_ptr<const HemParams> params, DecodeMode mode)
      : params_(std::move(params)), mode_(mode) {}
  std::vector<int> select(const CutSelState& state, const std::vector<Cut>&,
                          Rng& rng) const override {
    if (state.size() == 0) return {};
    return pointer_decode_end_token(*params_, state, mode_, rng).indices;
  }
  std::string name() const override { return "hem-no-h"; }

 private:
  std::shared_ptr<const HemParams> params_;
  DecodeMode mode_;
};

}  // namespace cutsel
