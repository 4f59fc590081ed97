#include "cutsel/hem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cutsel/errors.hpp"

namespace cutsel {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727;

std::vector<int> feature_constants(Tape& tape, const CutSelState& state) {
  std::vector<int> xs;
  xs.reserve(state.features.size());
  for (const CutFeatures& f : state.features) {
    const auto arr = f.to_array();
    xs.push_back(tape.constant(Tensor::column({arr.begin(), arr.end()})));
  }
  return xs;
}

// log(1 - tanh(K)^2) without catastrophic cancellation for large |K|.
double log_one_minus_tanh_sq(double big_k) {
  const double a = std::abs(big_k);
  return 2.0 * (std::numbers::ln2 - a - std::log1p(std::exp(-2.0 * a)));
}

}  // namespace

HemParams::HemParams(Rng& rng, int hidden_, int feat_dim_) {
  feat_dim = feat_dim_;
  hidden = hidden_;
  ratio_encoder = Lstm("theta1/encoder", feat_dim, hidden, rng);
  ratio_head = Mlp("theta1/head", {hidden, hidden, hidden, 2}, rng);
  // Start log sigma near -1 so the clamp passes gradients from the outset.
  ratio_head.biases.back().value.v[1] = -1.0;
  encoder = Lstm("theta2/encoder", feat_dim, hidden, rng);
  decoder = Lstm("theta2/decoder", hidden, hidden, rng);
  attention = AdditiveAttention("theta2/attention", hidden, rng);
  start_token = Parameter("theta2/start_token", hidden, 1);
  init_uniform(start_token, 1.0 / std::sqrt(static_cast<double>(hidden)), rng);
}

ParamList HemParams::theta1() {
  ParamList out = ratio_encoder.params();
  append_params(out, ratio_head.params());
  return out;
}

ParamList HemParams::theta2() {
  ParamList out = encoder.params();
  append_params(out, decoder.params());
  append_params(out, attention.params());
  out.push_back(&start_token);
  return out;
}

ParamList HemParams::all() {
  ParamList out = theta1();
  append_params(out, theta2());
  return out;
}

double tanh_gauss_logpdf(double big_k, double mu, double sigma) {
  const double z = (big_k - mu) / sigma;
  const double log_normal = -0.5 * z * z - std::log(sigma) - kHalfLog2Pi;
  // dk/dK = 0.5 * (1 - tanh(K)^2)
  const double log_jacobian = std::numbers::ln2 * -1.0 + log_one_minus_tanh_sq(big_k);
  return log_normal - log_jacobian;
}

namespace {

struct RatioForward {
  int mu = -1;
  int log_sigma = -1;
};

RatioForward ratio_forward(const HemParams& params, Tape& tape,
                           const CutSelState& state) {
  if (state.size() == 0) throw DegenerateState("ratio policy needs a nonempty state");
  const std::vector<int> xs = feature_constants(tape, state);
  const auto [hiddens, last] = params.ratio_encoder.run(tape, xs);
  (void)hiddens;
  const int head = params.ratio_head.forward(tape, last.h);
  RatioForward out;
  out.mu = tape.pick(head, 0);
  out.log_sigma = tape.clamp_op(tape.pick(head, 1), kLogSigmaMin, kLogSigmaMax);
  return out;
}

}  // namespace

void ratio_head_values(const HemParams& params, const CutSelState& state, double* mu,
                       double* sigma) {
  Tape tape;
  const RatioForward rf = ratio_forward(params, tape, state);
  if (mu != nullptr) *mu = tape.val(rf.mu).v[0];
  if (sigma != nullptr) *sigma = std::exp(tape.val(rf.log_sigma).v[0]);
}

RatioSample sample_ratio(const HemParams& params, const CutSelState& state, Rng& rng) {
  RatioSample s;
  ratio_head_values(params, state, &s.mu, &s.sigma);
  s.big_k = s.mu + s.sigma * rng.normal();
  s.k = std::clamp(0.5 * std::tanh(s.big_k) + 0.5, 1e-12, 1.0 - 1e-12);
  s.logp = tanh_gauss_logpdf(s.big_k, s.mu, s.sigma);
  return s;
}

RatioSample greedy_ratio(const HemParams& params, const CutSelState& state) {
  RatioSample s;
  ratio_head_values(params, state, &s.mu, &s.sigma);
  s.big_k = s.mu;
  s.k = std::clamp(0.5 * std::tanh(s.big_k) + 0.5, 1e-12, 1.0 - 1e-12);
  s.logp = tanh_gauss_logpdf(s.big_k, s.mu, s.sigma);
  return s;
}

int ratio_logp_tape(const HemParams& params, Tape& tape, const CutSelState& state,
                    double big_k) {
  const RatioForward rf = ratio_forward(params, tape, state);
  // log N(K; mu, sigma) with K constant; the squashing Jacobian does not
  // depend on the parameters and enters as a constant.
  const int k_const = tape.scalar(big_k);
  const int neg_log_sigma = tape.scale(rf.log_sigma, -1.0);
  const int inv_sigma = tape.exp_op(neg_log_sigma);
  const int z = tape.mul(tape.sub(k_const, rf.mu), inv_sigma);
  int logp = tape.scale(tape.mul(z, z), -0.5);
  logp = tape.add(logp, neg_log_sigma);
  logp = tape.add_scalar(logp, -kHalfLog2Pi);
  const double log_jacobian = -std::numbers::ln2 + log_one_minus_tanh_sq(big_k);
  return tape.add_scalar(logp, -log_jacobian);
}

namespace {

enum class StepChoice { Sample, Greedy, Forced };

struct DecodeSetup {
  std::vector<int> hiddens;     // encoder states (per position)
  std::vector<int> ref_projs;   // attention projections of the encoder states
  Lstm::State dec_state;
  int input = -1;
};

DecodeSetup decode_setup(const HemParams& params, Tape& tape,
                         const std::vector<int>& xs) {
  DecodeSetup setup;
  auto [hiddens, last] = params.encoder.run(tape, xs);
  setup.hiddens = std::move(hiddens);
  setup.dec_state = last;
  if (setup.hiddens.empty()) setup.dec_state = params.encoder.initial(tape);
  setup.ref_projs = params.attention.project_refs(tape, setup.hiddens);
  setup.input = tape.leaf(const_cast<Parameter&>(params.start_token));
  return setup;
}

// One decode step: runs the decoder cell, scores the positions, picks one
// (sampled, greedy, or forced) and returns (choice, logp node).
std::pair<int, int> decode_step(const HemParams& params, Tape& tape, DecodeSetup& setup,
                                const std::vector<char>& mask, StepChoice mode,
                                Rng* rng, int forced) {
  setup.dec_state = params.decoder.step(tape, setup.input, setup.dec_state);
  const int logits = params.attention.scores(tape, setup.ref_projs, setup.dec_state.h);
  const Tensor& lv = tape.val(logits);
  int choice = -1;
  if (mode == StepChoice::Forced) {
    choice = forced;
  } else if (mode == StepChoice::Greedy) {
    double best = -kInf;
    for (int i = 0; i < lv.rows; ++i) {
      if (!mask[static_cast<std::size_t>(i)]) continue;
      if (lv.v[static_cast<std::size_t>(i)] > best) {
        best = lv.v[static_cast<std::size_t>(i)];
        choice = i;
      }
    }
  } else {
    double max_logit = -kInf;
    for (int i = 0; i < lv.rows; ++i)
      if (mask[static_cast<std::size_t>(i)])
        max_logit = std::max(max_logit, lv.v[static_cast<std::size_t>(i)]);
    double z = 0.0;
    for (int i = 0; i < lv.rows; ++i)
      if (mask[static_cast<std::size_t>(i)])
        z += std::exp(lv.v[static_cast<std::size_t>(i)] - max_logit);
    double u = rng->uniform() * z;
    for (int i = 0; i < lv.rows; ++i) {
      if (!mask[static_cast<std::size_t>(i)]) continue;
      u -= std::exp(lv.v[static_cast<std::size_t>(i)] - max_logit);
      choice = i;
      if (u <= 0.0) break;
    }
  }
  const int logp = tape.masked_log_softmax_pick(logits, mask, choice);
  setup.input = setup.hiddens[static_cast<std::size_t>(choice)];
  return {choice, logp};
}

}  // namespace

PointerResult pointer_decode(const HemParams& params, const CutSelState& state, int m,
                             DecodeMode mode, Rng& rng) {
  const int n = state.size();
  require_shape(m >= 0 && m <= n, "pointer decode length");
  PointerResult result;
  if (m == 0) return result;
  Tape tape;
  DecodeSetup setup = decode_setup(params, tape, feature_constants(tape, state));
  std::vector<char> mask(static_cast<std::size_t>(n), 1);
  for (int step = 0; step < m; ++step) {
    const auto [choice, logp_node] =
        decode_step(params, tape, setup, mask,
                    mode == DecodeMode::Sample ? StepChoice::Sample : StepChoice::Greedy,
                    &rng, -1);
    result.indices.push_back(choice);
    result.logp += tape.val(logp_node).v[0];
    mask[static_cast<std::size_t>(choice)] = 0;
  }
  return result;
}

PointerResult pointer_decode_end_token(const HemParams& params, const CutSelState& state,
                                       DecodeMode mode, Rng& rng) {
  const int n = state.size();
  PointerResult result;
  if (n == 0) return result;
  Tape tape;
  std::vector<int> xs = feature_constants(tape, state);
  Tensor end_token(params.feat_dim, 1);
  end_token.fill(1.0);
  xs.push_back(tape.constant(std::move(end_token)));
  DecodeSetup setup = decode_setup(params, tape, xs);
  std::vector<char> mask(static_cast<std::size_t>(n) + 1, 1);
  const int end_index = n;
  for (int step = 0; step < n + 1; ++step) {
    const auto [choice, logp_node] =
        decode_step(params, tape, setup, mask,
                    mode == DecodeMode::Sample ? StepChoice::Sample : StepChoice::Greedy,
                    &rng, -1);
    result.logp += tape.val(logp_node).v[0];
    if (choice == end_index) break;
    result.indices.push_back(choice);
    mask[static_cast<std::size_t>(choice)] = 0;
  }
  return result;
}

HemAction hem_select(const HemParams& params, const CutSelState& state, Rng& rng,
                     DecodeMode mode) {
  HemAction action;
  if (state.size() == 0) return action;
  const RatioSample rs =
      mode == DecodeMode::Sample ? sample_ratio(params, state, rng) : greedy_ratio(params, state);
  action.k = rs.k;
  action.big_k = rs.big_k;
  action.logp_h = rs.logp;
  action.m = ratio_to_count(state.size(), rs.k);
  const PointerResult pr = pointer_decode(params, state, action.m, mode, rng);
  action.indices = pr.indices;
  action.logp_l = pr.logp;
  return action;
}

int pointer_logp_tape(const HemParams& params, Tape& tape, const CutSelState& state,
                      const std::vector<int>& action) {
  const int n = state.size();
  if (action.empty()) return tape.scalar(0.0);
  DecodeSetup setup = decode_setup(params, tape, feature_constants(tape, state));
  std::vector<char> mask(static_cast<std::size_t>(n), 1);
  std::vector<int> logps;
  logps.reserve(action.size());
  for (int forced : action) {
    require_shape(forced >= 0 && forced < n && mask[static_cast<std::size_t>(forced)],
                  "recorded action index invalid");
    const auto [choice, logp_node] =
        decode_step(params, tape, setup, mask, StepChoice::Forced, nullptr, forced);
    (void)choice;
    logps.push_back(logp_node);
    mask[static_cast<std::size_t>(forced)] = 0;
  }
  return tape.sum(tape.stack(logps));
}

std::vector<int> HemRatioOrderSelector::select(const CutSelState& state,
                                               const std::vector<Cut>& cuts,
                                               Rng& rng) const {
  std::vector<int> indices = inner_.select(state, cuts, rng);
  std::sort(indices.begin(), indices.end());
  return indices;
}

}  // namespace cutsel
