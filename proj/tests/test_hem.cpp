#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <set>

#include "cutsel/errors.hpp"
#include "cutsel/hem.hpp"
#include "oracles.hpp"

using namespace cutsel;

namespace {

CutSelState toy_state(int n, std::uint64_t seed = 11) {
  Rng rng(seed);
  CutSelState state;
  for (int i = 0; i < n; ++i) {
    std::array<double, kFeatureDim> a{};
    for (double& v : a) v = rng.normal();
    state.features.push_back(CutFeatures::from_array(a));
  }
  return state;
}

// theta1 with zero weights: mu = 0 and log sigma = bias.
HemParams zeroed_theta1(int hidden, double log_sigma_bias) {
  Rng rng(21);
  HemParams params(rng, hidden, kFeatureDim);
  for (Parameter* p : params.theta1()) p->value.fill(0.0);
  params.ratio_head.biases.back().value.v[1] = log_sigma_bias;
  return params;
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double total = f(a) + f(b);
  for (int i = 1; i < n; ++i) total += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return total * h / 3.0;
}

double normal_cdf_value(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

TEST_CASE("sigma at the floor pins k near one half") {
  const HemParams params = zeroed_theta1(8, -100.0);  // clamps to log 1e-3
  const CutSelState state = toy_state(3);
  double mu = 1.0, sigma = 0.0;
  ratio_head_values(params, state, &mu, &sigma);
  CHECK(mu == doctest::Approx(0.0));
  CHECK(sigma == doctest::Approx(1e-3));
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const RatioSample s = sample_ratio(params, state, rng);
    CHECK(std::abs(s.k - 0.5) < 0.01);
  }
}

TEST_CASE("sampled ratios lie strictly inside (0,1)") {
  Rng init(3);
  const HemParams params(init, 8);
  const CutSelState state = toy_state(4);
  Rng rng(17);
  for (int t = 0; t < 20000; ++t) {
    const RatioSample s = sample_ratio(params, state, rng);
    CHECK(s.k > 0.0);
    CHECK(s.k < 1.0);
  }
}

TEST_CASE("monte carlo mean of k matches quadrature") {
  const HemParams params = zeroed_theta1(8, 0.0);  // mu = 0, sigma = 1
  const CutSelState state = toy_state(3);
  Rng rng(29);
  double total = 0.0;
  const int draws = 100000;
  for (int t = 0; t < draws; ++t) total += sample_ratio(params, state, rng).k;
  const double mc_mean = total / draws;
  const double quad = simpson(
      [](double x) {
        const double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        return (0.5 * std::tanh(x) + 0.5) * phi;
      },
      -9.0, 9.0, 4000);
  CHECK(std::abs(mc_mean - quad) < 0.01);
}

TEST_CASE("log density matches a numerically integrated kernel") {
  Rng init(7);
  const HemParams params(init, 8);
  const CutSelState state = toy_state(5);
  double mu = 0, sigma = 0;
  ratio_head_values(params, state, &mu, &sigma);
  Rng rng(41);
  for (int t = 0; t < 25; ++t) {
    const RatioSample s = sample_ratio(params, state, rng);
    const double delta = 1e-6;
    const double k_lo = s.k - delta, k_hi = s.k + delta;
    if (k_lo <= 0.0 || k_hi >= 1.0) continue;
    const double big_lo = std::atanh(2.0 * k_lo - 1.0);
    const double big_hi = std::atanh(2.0 * k_hi - 1.0);
    const double prob = normal_cdf_value((big_hi - mu) / sigma) -
                        normal_cdf_value((big_lo - mu) / sigma);
    const double density = prob / (2.0 * delta);
    if (density <= 0.0) continue;
    CHECK(std::abs(std::log(density) - s.logp) < 1e-3);
  }
}

TEST_CASE("degenerate state is rejected by the ratio policy") {
  Rng init(9);
  const HemParams params(init, 8);
  CutSelState empty;
  Rng rng(1);
  CHECK_THROWS_AS(sample_ratio(params, empty, rng), DegenerateState);
}

TEST_CASE("pointer decode with m = 0 is empty with log-probability zero") {
  Rng init(10);
  const HemParams params(init, 8);
  Rng rng(2);
  const PointerResult r = pointer_decode(params, toy_state(4), 0, DecodeMode::Sample, rng);
  CHECK(r.indices.empty());
  CHECK(r.logp == 0.0);
}

TEST_CASE("uniform logits give the masked-uniform chain rule") {
  Rng init(11);
  HemParams params(init, 8);
  params.attention.v.value.fill(0.0);  // all logits zero
  const CutSelState state = toy_state(3);
  Rng rng(3);
  for (int t = 0; t < 30; ++t) {
    const PointerResult r = pointer_decode(params, state, 2, DecodeMode::Sample, rng);
    REQUIRE(r.indices.size() == 2);
    CHECK(r.indices[0] != r.indices[1]);
    CHECK(r.logp == doctest::Approx(std::log(1.0 / 6.0)));
  }
  const PointerResult greedy = pointer_decode(params, state, 2, DecodeMode::Greedy, rng);
  CHECK(greedy.indices == std::vector<int>{0, 1});  // argmax ties take the lowest index
}

TEST_CASE("pointer probabilities sum to one over all ordered subsets") {
  for (std::uint64_t draw = 0; draw < 6; ++draw) {
    Rng init(100 + draw);
    const HemParams params(init, 6);
    const int n = 4, m = 3;
    const CutSelState state = toy_state(n, 50 + draw);
    double total = 0.0;
    std::vector<int> action(m);
    std::function<void(int)> rec = [&](int depth) {
      if (depth == m) {
        Tape tape;
        const int node = pointer_logp_tape(params, tape, state, action);
        total += std::exp(tape.val(node).v[0]);
        return;
      }
      for (int i = 0; i < n; ++i) {
        bool used = false;
        for (int d = 0; d < depth; ++d) used |= action[d] == i;
        if (used) continue;
        action[depth] = i;
        rec(depth + 1);
      }
    };
    rec(0);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("sampled pointer log-probability matches the forced re-evaluation") {
  Rng init(13);
  const HemParams params(init, 8);
  const CutSelState state = toy_state(5);
  Rng rng(7);
  const PointerResult r = pointer_decode(params, state, 3, DecodeMode::Sample, rng);
  Tape tape;
  const int node = pointer_logp_tape(params, tape, state, r.indices);
  CHECK(tape.val(node).v[0] == doctest::Approx(r.logp).epsilon(1e-12));
}

TEST_CASE("ratio-to-count floors") {
  CHECK(ratio_to_count(100, 0.105) == 10);
  CHECK(ratio_to_count(45, 0.2) == 9);
  CHECK(ratio_to_count(10, 0.999) == 9);
  CHECK(ratio_to_count(0, 0.5) == 0);
}

TEST_CASE("hem_select composes ratio and pointer") {
  Rng init(14);
  const HemParams params(init, 8);
  const CutSelState state = toy_state(6);
  Rng rng(9);
  const HemAction act = hem_select(params, state, rng, DecodeMode::Sample);
  CHECK(act.m == ratio_to_count(6, act.k));
  CHECK(static_cast<int>(act.indices.size()) == act.m);
  CHECK(std::isfinite(act.logp_h));
  Rng rng2(9);
  const HemAction again = hem_select(params, state, rng2, DecodeMode::Sample);
  CHECK(again.indices == act.indices);
  CHECK(again.k == act.k);

  CutSelState empty;
  Rng rng3(1);
  const HemAction none = hem_select(params, empty, rng3, DecodeMode::Sample);
  CHECK(none.indices.empty());
  CHECK(none.m == 0);
}

TEST_CASE("hem-ratio selects exactly floor(0.2 N) and the order variant sorts it") {
  Rng init(15);
  auto params = std::make_shared<HemParams>(HemParams(init, 8));
  const CutSelState state = toy_state(45);
  const std::vector<Cut> cuts;
  const HemRatioSelector ratio_sel(params, DecodeMode::Greedy, 0.2);
  const HemRatioOrderSelector order_sel(params, DecodeMode::Greedy, 0.2);
  Rng r1(1), r2(1);
  const std::vector<int> picked = ratio_sel.select(state, cuts, r1);
  const std::vector<int> ordered = order_sel.select(state, cuts, r2);
  CHECK(picked.size() == 9);
  CHECK(std::is_sorted(ordered.begin(), ordered.end()));
  std::vector<int> sorted_picked = picked;
  std::sort(sorted_picked.begin(), sorted_picked.end());
  CHECK(sorted_picked == ordered);
}

TEST_CASE("end-token decoding terminates and can stop immediately") {
  Rng init(16);
  const HemParams params(init, 6);
  const CutSelState state = toy_state(4);
  bool saw_immediate_stop = false;
  for (std::uint64_t seed = 0; seed < 400 && !saw_immediate_stop; ++seed) {
    Rng rng(seed);
    const PointerResult r = pointer_decode_end_token(params, state, DecodeMode::Sample, rng);
    CHECK(r.indices.size() <= 4);
    for (int i : r.indices) CHECK(i < 4);  // the end token itself is never reported
    std::set<int> uniq(r.indices.begin(), r.indices.end());
    CHECK(uniq.size() == r.indices.size());
    if (r.indices.empty()) {
      saw_immediate_stop = true;
      CHECK(r.logp < 0.0);  // the stop step itself carries probability mass
    }
  }
  CHECK(saw_immediate_stop);
}

TEST_CASE("hem log-probability gradients match finite differences") {
  Rng init(18);
  HemParams params(init, 4);
  const CutSelState state = toy_state(3);
  Rng rng(12);
  const HemAction act = hem_select(params, state, rng, DecodeMode::Sample);
  const std::vector<int> action =
      act.indices.empty() ? std::vector<int>{1, 0} : act.indices;

  auto value = [&]() {
    Tape t1, t2;
    const double a = t1.val(ratio_logp_tape(params, t1, state, act.big_k)).v[0];
    const double b = t2.val(pointer_logp_tape(params, t2, state, action)).v[0];
    return a + b;
  };
  zero_grads(params.all());
  {
    Tape t1;
    t1.backward(ratio_logp_tape(params, t1, state, act.big_k));
    Tape t2;
    t2.backward(pointer_logp_tape(params, t2, state, action));
  }
  CHECK(oracle::max_gradient_error(params.all(), value, 1e-5) < 1e-4);
}

TEST_CASE("greedy hem selector is deterministic across rng states") {
  Rng init(19);
  auto params = std::make_shared<HemParams>(HemParams(init, 8));
  const HemSelector sel(params, DecodeMode::Greedy);
  const CutSelState state = toy_state(7);
  Rng r1(1), r2(999);
  CHECK(sel.select(state, {}, r1) == sel.select(state, {}, r2));
}
