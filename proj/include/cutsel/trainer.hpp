#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cutsel/adam.hpp"
#include "cutsel/engine.hpp"
#include "cutsel/hem.hpp"
#include "cutsel/rule_policies.hpp"

namespace cutsel {

enum class RewardKind { NegSolveTime, NegPdIntegral, NegDualBoundImprovement };

struct RolloutSample {
  CutSelState state;
  double k = 0.0;
  double big_k = 0.0;
  std::vector<int> action;
  double reward = 0.0;
  double logp_h = 0.0;
  double logp_l = 0.0;
  int instance_index = -1;
};

struct TrainConfig {
  int batch_size = 32;    // N_b
  int epochs = 100;       // N_e
  double lr_low = 1e-4;   // alpha1, lower-level (theta2)
  double lr_high = 5e-4;  // alpha2, higher-level (theta1)
  int delay_freq = 2;     // d: theta1 updates on epochs with e % d == d-1
  RewardKind reward = RewardKind::NegPdIntegral;
  bool baseline = true;            // batch-mean advantage baseline
  bool normalize_rewards = true;   // divide by a NoCuts probe constant
  std::uint64_t seed = 1;
  SolveConfig solve;               // per-rollout solver limits
  int workers = 1;
  int eval_size = 8;               // held-out slice for the greedy metric
  int eval_every = 10;             // epochs between held-out evaluations
  int checkpoint_every = 25;
  std::string out_dir;             // empty: nothing written to disk
};

struct EpochMetrics {
  int epoch = 0;
  double mean_reward = 0.0;
  double eval_metric = 0.0;  // mean greedy cost on the held-out slice (NaN if skipped)
  double wall_time = 0.0;
};

struct TrainResult {
  std::vector<EpochMetrics> metrics;
  int best_epoch = -1;
  double best_mean_reward = -kInf;
};

// Injects a fixed ordered subset at the (single) root separation round.
class ReplaySelector final : public CutSelector {
 public:
  explicit ReplaySelector(std::vector<int> indices) : indices_(std::move(indices)) {}
  std::vector<int> select(const CutSelState&, const std::vector<Cut>&, Rng&) const override {
    return indices_;
  }
  std::string name() const override { return "replay"; }

 private:
  std::vector<int> indices_;
};

// Reward of one solve under the configured kind (higher is better).
double compute_reward(const MilpInstance& instance, const std::vector<int>& action,
                      RewardKind kind, const SolveConfig& solve);

// One policy rollout on one instance; nullopt when the candidate pool is
// empty (the caller resamples another instance).
std::optional<RolloutSample> rollout_one(const HemParams& params,
                                         const MilpInstance& instance,
                                         const TrainConfig& config, Rng& rng);

// N_b rollouts with instance resampling; deterministic for a given seed
// independent of the worker count.
std::vector<RolloutSample> collect_batch(const HemParams& params,
                                         const std::vector<MilpInstance>& pool,
                                         const TrainConfig& config, std::uint64_t epoch);

// Accumulates score-function gradients of the (negated) objective into the
// parameter grad slots: loss = -mean_i advantage_i * log pi(action_i).
// Gradients for theta1 are only touched when with_theta1 is set.
void accumulate_pg_gradients(const HemParams& params,
                             const std::vector<RolloutSample>& batch, bool baseline,
                             double reward_scale, bool with_theta1);

// One training step (Proposition-style estimator + Adam); theta1 is updated
// only on epochs where epoch_index % delay_freq == delay_freq - 1.
void hierarchical_pg_step(HemParams& params, const std::vector<RolloutSample>& batch,
                          AdamState& adam_high, AdamState& adam_low,
                          const TrainConfig& config, int epoch_index,
                          double reward_scale);

// NoCuts probe constant: mean |reward| over a slice of the pool (>= 1e-9).
double reward_normalizer(const std::vector<MilpInstance>& pool, const TrainConfig& config);

// Full training loop; params are left at the best-train-reward epoch.
TrainResult train(HemParams& params, const std::vector<MilpInstance>& train_pool,
                  const std::vector<MilpInstance>& eval_pool, const TrainConfig& config);

// Mean greedy-evaluation cost (the positive counterpart of the reward) of a
// selector over a pool.
double evaluate_mean_cost(const CutSelector& selector,
                          const std::vector<MilpInstance>& pool, RewardKind kind,
                          const SolveConfig& solve, std::uint64_t seed);

// ---- Evolution strategies (SBP) ----

struct EsConfig {
  int population = 16;  // even; antithetic pairs
  double sigma = 0.05;
  double step = 0.01;
  int generations = 100;
  std::uint64_t seed = 1;
  int fitness_pool = 8;
  RewardKind reward = RewardKind::NegPdIntegral;
  SolveConfig solve;
  int sbp_hidden = 128;
};

using FitnessFn = std::function<double(const SbpParams&)>;

// Isotropic-Gaussian ES with antithetic pairs and rank-normalized updates;
// returns the best-fitness center parameters seen.
SbpParams es_optimize(SbpParams initial, const FitnessFn& fitness, const EsConfig& config,
                      std::vector<double>* fitness_trace = nullptr);

// Fitness = mean reward over a fixed mini-pool solved with the SBP selector.
SbpParams es_train_sbp(const std::vector<MilpInstance>& pool, const EsConfig& config);

}  // namespace cutsel
