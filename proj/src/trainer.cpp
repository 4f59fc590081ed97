#include "cutsel/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <thread>

#include "cutsel/checkpoint.hpp"
#include "cutsel/gomory.hpp"

namespace cutsel {

namespace {

double reward_from_stats(const SolveStats& stats, RewardKind kind,
                         const SolveConfig& solve) {
  switch (kind) {
    case RewardKind::NegSolveTime:
      return solve.time_mode == TimeMode::WallClock ? -stats.solve_time
                                                    : -stats.work_units;
    case RewardKind::NegPdIntegral:
      return -stats.pd_integral;
    case RewardKind::NegDualBoundImprovement:
      return 0.0;  // computed from the two root LP values in compute_reward
  }
  return 0.0;
}

}  // namespace

double compute_reward(const MilpInstance& instance, const std::vector<int>& action,
                      RewardKind kind, const SolveConfig& solve) {
  if (kind == RewardKind::NegDualBoundImprovement) {
    SimplexOptions opt;
    opt.want_tableau = true;
    const LpSolution before = solve_lp(instance, opt);
    if (before.status != LpStatus::Optimal) return 0.0;
    const std::vector<Cut> pool = generate_cuts(instance, before);
    std::vector<Cut> chosen;
    for (int idx : action) chosen.push_back(pool.at(static_cast<std::size_t>(idx)));
    opt.want_tableau = false;
    const LpSolution after = solve_lp(add_rows(instance, chosen), opt);
    if (after.status != LpStatus::Optimal) return 0.0;
    return -(after.objective - before.objective);
  }
  ReplaySelector selector{action};
  SolveConfig cfg = solve;
  cfg.separation_rounds = 1;
  const SolveStats stats = branch_and_cut(instance, selector, cfg);
  return reward_from_stats(stats, kind, cfg);
}

std::optional<RolloutSample> rollout_one(const HemParams& params,
                                         const MilpInstance& instance,
                                         const TrainConfig& config, Rng& rng) {
  SimplexOptions opt;
  opt.want_tableau = true;
  LpSolution lp;
  try {
    lp = solve_lp(instance, opt);
  } catch (const NumericalFailure&) {
    return std::nullopt;
  }
  if (lp.status != LpStatus::Optimal) return std::nullopt;
  const std::vector<Cut> pool = generate_cuts(instance, lp);
  if (pool.empty()) return std::nullopt;

  RolloutSample sample;
  sample.state = featurize(instance, lp, pool);
  const HemAction act = hem_select(params, sample.state, rng, DecodeMode::Sample);
  sample.k = act.k;
  sample.big_k = act.big_k;
  sample.action = act.indices;
  sample.logp_h = act.logp_h;
  sample.logp_l = act.logp_l;
  sample.reward = compute_reward(instance, sample.action, config.reward, config.solve);
  return sample;
}

std::vector<RolloutSample> collect_batch(const HemParams& params,
                                         const std::vector<MilpInstance>& pool,
                                         const TrainConfig& config, std::uint64_t epoch) {
  if (pool.empty()) throw ConfigError("empty instance pool");
  const int nb = config.batch_size;
  std::vector<std::optional<RolloutSample>> out(static_cast<std::size_t>(nb));

  auto run_slot = [&](int slot) {
    const Rng base = Rng(config.seed).child(0xba7c, epoch, static_cast<std::uint64_t>(slot));
    for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
      Rng rng = base.child(attempt);
      const auto idx = static_cast<std::size_t>(rng.uniform_int(pool.size()));
      auto sample = rollout_one(params, pool[idx], config, rng);
      if (sample.has_value()) {
        sample->instance_index = static_cast<int>(idx);
        out[static_cast<std::size_t>(slot)] = std::move(sample);
        return;
      }
      std::cerr << "[trainer] empty candidate pool on " << pool[idx].name
                << ", resampling\n";
    }
  };

  const int workers = std::max(1, config.workers);
  if (workers == 1) {
    for (int slot = 0; slot < nb; ++slot) run_slot(slot);
  } else {
    std::vector<std::thread> threads;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w) {
      threads.emplace_back([&]() {
        while (true) {
          const int slot = next.fetch_add(1);
          if (slot >= nb) return;
          run_slot(slot);
        }
      });
    }
    for (std::thread& t : threads) t.join();
  }

  std::vector<RolloutSample> batch;
  batch.reserve(static_cast<std::size_t>(nb));
  for (auto& s : out) {
    if (!s.has_value())
      throw ConfigError("could not collect a rollout: candidate pools are empty");
    batch.push_back(std::move(*s));
  }
  return batch;
}

void accumulate_pg_gradients(const HemParams& params,
                             const std::vector<RolloutSample>& batch, bool baseline,
                             double reward_scale, bool with_theta1) {
  if (batch.empty()) return;
  double mean_reward = 0.0;
  for (const RolloutSample& s : batch) mean_reward += s.reward;
  mean_reward /= static_cast<double>(batch.size());
  const double b = baseline ? mean_reward : 0.0;
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  for (const RolloutSample& s : batch) {
    const double advantage = (s.reward - b) / reward_scale;
    if (advantage == 0.0) continue;
    const double coef = -advantage * inv_n;  // loss = -J estimate
    if (!s.action.empty()) {
      Tape tape;
      const int logp = pointer_logp_tape(params, tape, s.state, s.action);
      tape.backward(tape.scale(logp, coef));
    }
    if (with_theta1) {
      Tape tape;
      const int logp = ratio_logp_tape(params, tape, s.state, s.big_k);
      tape.backward(tape.scale(logp, coef));
    }
  }
}

void hierarchical_pg_step(HemParams& params, const std::vector<RolloutSample>& batch,
                          AdamState& adam_high, AdamState& adam_low,
                          const TrainConfig& config, int epoch_index,
                          double reward_scale) {
  if (batch.empty()) return;
  const bool update_theta1 =
      epoch_index % config.delay_freq == config.delay_freq - 1;
  const ParamList theta1 = params.theta1();
  const ParamList theta2 = params.theta2();
  zero_grads(theta2);
  if (update_theta1) zero_grads(theta1);
  accumulate_pg_gradients(params, batch, config.baseline, reward_scale, update_theta1);
  adam_step(theta2, adam_low);
  if (update_theta1) adam_step(theta1, adam_high);
}

double reward_normalizer(const std::vector<MilpInstance>& pool,
                         const TrainConfig& config) {
  // A NoCuts probe carries no signal for the bound-improvement reward.
  if (config.reward == RewardKind::NegDualBoundImprovement) return 1.0;
  const NoCutsSelector nocuts;
  const std::size_t probe = std::min<std::size_t>(pool.size(), 16);
  double total = 0.0;
  SolveConfig cfg = config.solve;
  for (std::size_t i = 0; i < probe; ++i) {
    cfg.seed = Rng(config.seed).child(0xf00, i).next_u64();
    const SolveStats stats = branch_and_cut(pool[i], nocuts, cfg);
    total += std::abs(reward_from_stats(stats, config.reward, cfg));
  }
  return std::max(1e-9, total / static_cast<double>(probe));
}

double evaluate_mean_cost(const CutSelector& selector,
                          const std::vector<MilpInstance>& pool, RewardKind kind,
                          const SolveConfig& solve, std::uint64_t seed) {
  if (pool.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    SolveConfig cfg = solve;
    cfg.seed = Rng(seed).child(0xe7a1, i).next_u64();
    const SolveStats stats = branch_and_cut(pool[i], selector, cfg);
    total += -reward_from_stats(stats, kind, cfg);
  }
  return total / static_cast<double>(pool.size());
}

TrainResult train(HemParams& params, const std::vector<MilpInstance>& train_pool,
                  const std::vector<MilpInstance>& eval_pool, const TrainConfig& config) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  TrainResult result;
  if (config.epochs <= 0) return result;

  AdamState adam_high(config.lr_high);
  AdamState adam_low(config.lr_low);
  const double scale =
      config.normalize_rewards ? reward_normalizer(train_pool, config) : 1.0;

  std::vector<MilpInstance> eval_slice(
      eval_pool.begin(),
      eval_pool.begin() + std::min<std::size_t>(eval_pool.size(),
                                                static_cast<std::size_t>(config.eval_size)));
  // Model selection runs greedy decoding on a fixed train-set slice.
  std::vector<MilpInstance> select_slice(
      train_pool.begin(),
      train_pool.begin() + std::min<std::size_t>(train_pool.size(),
                                                 static_cast<std::size_t>(config.eval_size)));

  const bool write_files = !config.out_dir.empty();
  std::ofstream metrics_csv;
  if (write_files) {
    std::filesystem::create_directories(config.out_dir);
    metrics_csv.open(config.out_dir + "/metrics.csv", std::ios::binary);
    metrics_csv << "epoch,mean_reward,eval_metric,wall_time\n";
  }

  std::vector<double> best_flat = flatten_values(params.all());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const std::vector<RolloutSample> batch =
        collect_batch(params, train_pool, config, static_cast<std::uint64_t>(epoch));
    double mean_reward = 0.0;
    for (const RolloutSample& s : batch) mean_reward += s.reward;
    mean_reward /= static_cast<double>(batch.size());

    try {
      hierarchical_pg_step(params, batch, adam_high, adam_low, config, epoch, scale);
    } catch (const NonFiniteDetected&) {
      if (write_files)
        save_checkpoint(config.out_dir + "/checkpoint_last_good.json",
                        params.all());
      throw;
    }

    EpochMetrics em;
    em.epoch = epoch;
    em.mean_reward = mean_reward;
    em.eval_metric = std::numeric_limits<double>::quiet_NaN();
    const bool eval_now = epoch % config.eval_every == config.eval_every - 1 ||
                          epoch + 1 == config.epochs;
    if (eval_now) {
      auto shared = std::make_shared<HemParams>(params);
      const HemSelector greedy(shared, DecodeMode::Greedy);
      if (!eval_slice.empty())
        em.eval_metric = evaluate_mean_cost(greedy, eval_slice, config.reward,
                                            config.solve, config.seed);
      const double train_cost = evaluate_mean_cost(greedy, select_slice, config.reward,
                                                   config.solve, config.seed);
      if (-train_cost > result.best_mean_reward) {
        result.best_mean_reward = -train_cost;
        result.best_epoch = epoch;
        best_flat = flatten_values(params.all());
      }
    }
    em.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
    result.metrics.push_back(em);
    if (write_files) {
      metrics_csv << em.epoch << "," << em.mean_reward << "," << em.eval_metric << ","
                  << em.wall_time << "\n";
      metrics_csv.flush();
      if (config.checkpoint_every > 0 && (epoch + 1) % config.checkpoint_every == 0)
        save_checkpoint(config.out_dir + "/checkpoint_" + std::to_string(epoch + 1) +
                            ".json",
                        params.all());
    }
  }
  // Model selection: the epoch with the best greedy train-slice cost.
  load_values(params.all(), best_flat);
  if (write_files) save_checkpoint(config.out_dir + "/checkpoint_best.json", params.all());
  return result;
}

namespace {

// Centered ranks in [-0.5, 0.5]; ties share the average rank so that equal
// fitness contributes no update.
std::vector<double> centered_ranks(const std::vector<double>& fitness) {
  const std::size_t n = fitness.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return fitness[a] < fitness[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && fitness[order[j + 1]] == fitness[order[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j));
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k)
    out[k] = n > 1 ? ranks[k] / static_cast<double>(n - 1) - 0.5 : 0.0;
  return out;
}

}  // namespace

SbpParams es_optimize(SbpParams initial, const FitnessFn& fitness, const EsConfig& config,
                      std::vector<double>* fitness_trace) {
  SbpParams center = std::move(initial);
  std::vector<double> flat = flatten_values(center.params());
  const std::size_t dim = flat.size();
  const int pairs = config.population / 2;

  SbpParams best = center;
  double best_fitness = fitness(center);
  if (fitness_trace != nullptr) fitness_trace->push_back(best_fitness);

  Rng rng = Rng(config.seed).child(0xe5);
  SbpParams scratch = center;
  for (int gen = 0; gen < config.generations; ++gen) {
    std::vector<std::vector<double>> eps(static_cast<std::size_t>(pairs));
    std::vector<double> fit(static_cast<std::size_t>(2 * pairs), 0.0);
    for (int p = 0; p < pairs; ++p) {
      auto& e = eps[static_cast<std::size_t>(p)];
      e.resize(dim);
      for (double& x : e) x = rng.normal();
      std::vector<double> plus = flat, minus = flat;
      for (std::size_t i = 0; i < dim; ++i) {
        plus[i] += config.sigma * e[i];
        minus[i] -= config.sigma * e[i];
      }
      load_values(scratch.params(), plus);
      fit[static_cast<std::size_t>(2 * p)] = fitness(scratch);
      load_values(scratch.params(), minus);
      fit[static_cast<std::size_t>(2 * p + 1)] = fitness(scratch);
    }
    const std::vector<double> w = centered_ranks(fit);
    const double lr = config.step / (static_cast<double>(2 * pairs) * config.sigma);
    for (int p = 0; p < pairs; ++p) {
      const double coef =
          lr * (w[static_cast<std::size_t>(2 * p)] - w[static_cast<std::size_t>(2 * p + 1)]);
      if (coef == 0.0) continue;
      const auto& e = eps[static_cast<std::size_t>(p)];
      for (std::size_t i = 0; i < dim; ++i) flat[i] += coef * e[i];
    }
    load_values(center.params(), flat);
    const double center_fitness = fitness(center);
    if (fitness_trace != nullptr) fitness_trace->push_back(center_fitness);
    if (center_fitness > best_fitness) {
      best_fitness = center_fitness;
      best = center;
    }
  }
  return best;
}

SbpParams es_train_sbp(const std::vector<MilpInstance>& pool, const EsConfig& config) {
  if (pool.empty()) throw ConfigError("empty instance pool");
  std::vector<MilpInstance> mini(
      pool.begin(),
      pool.begin() + std::min<std::size_t>(pool.size(),
                                           static_cast<std::size_t>(config.fitness_pool)));
  auto fitness = [&](const SbpParams& candidate) {
    auto shared = std::make_shared<SbpParams>(candidate);
    const SbpSelector selector(shared);
    double total = 0.0;
    for (std::size_t i = 0; i < mini.size(); ++i) {
      SolveConfig cfg = config.solve;
      cfg.seed = Rng(config.seed).child(0x5bb, i).next_u64();
      const SolveStats stats = branch_and_cut(mini[i], selector, cfg);
      total += reward_from_stats(stats, config.reward, cfg);
    }
    return total / static_cast<double>(mini.size());
  };
  Rng rng = Rng(config.seed).child(0x171);
  SbpParams init(rng, config.sbp_hidden);
  return es_optimize(std::move(init), fitness, config);
}

}  // namespace cutsel
