// Command-line harness: corpus generation, policy training, evaluation
// tables, the order-sensitivity study, PCA export, and generalization runs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cutsel/checkpoint.hpp"
#include "cutsel/engine.hpp"
#include "cutsel/errors.hpp"
#include "cutsel/gomory.hpp"
#include "cutsel/hem.hpp"
#include "cutsel/instance_gen.hpp"
#include "cutsel/report.hpp"
#include "cutsel/rule_policies.hpp"
#include "cutsel/trainer.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cutsel;

namespace {

constexpr const char* kVersion = "cutbench 0.1.0";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config json: ") + e.what());
  }
}

SolveConfig solve_from_config(const json& cfg) {
  SolveConfig solve;
  const json& s = cfg.contains("solve") ? cfg.at("solve") : json::object();
  solve.time_limit = s.value("time_limit", solve.time_limit);
  solve.work_limit = s.value("work_limit", 50000.0);
  solve.node_limit = s.value("node_limit", solve.node_limit);
  solve.separation_rounds = s.value("separation_rounds", solve.separation_rounds);
  solve.gap_init = s.value("gap_init", solve.gap_init);
  const std::string mode = s.value("time_mode", std::string("work"));
  if (mode == "work" || mode == "work_units") {
    solve.time_mode = TimeMode::WorkUnits;
  } else if (mode == "wall" || mode == "wall_clock") {
    solve.time_mode = TimeMode::WallClock;
  } else {
    throw ConfigError("unknown time_mode: " + mode);
  }
  return solve;
}

void write_run_manifest(const std::string& out_dir, const std::string& command,
                        const json& config, const std::vector<std::uint64_t>& seeds) {
  json doc;
  doc["command"] = command;
  doc["version"] = kVersion;
  doc["config"] = config;
  doc["config_hash"] = fnv1a(config.dump());
  doc["seeds"] = seeds;
  write_file(out_dir + "/run_manifest.json", doc.dump(2) + "\n");
}

int infer_hidden(const std::map<std::string, Tensor>& tensors, const std::string& key) {
  const auto it = tensors.find(key);
  if (it == tensors.end()) throw IoError("checkpoint is missing tensor " + key);
  return it->second.rows;
}

std::shared_ptr<HemParams> hem_from_checkpoint(const std::string& path) {
  const auto tensors = read_checkpoint_tensors(path);
  const int hidden = infer_hidden(tensors, "theta1/encoder/wi");
  Rng rng(0);
  auto params = std::make_shared<HemParams>(rng, hidden);
  load_checkpoint(path, params->all());
  return params;
}

std::shared_ptr<SbpParams> sbp_from_checkpoint(const std::string& path) {
  const auto tensors = read_checkpoint_tensors(path);
  const int hidden = infer_hidden(tensors, "sbp/scorer/w0");
  Rng rng(0);
  auto params = std::make_shared<SbpParams>(rng, hidden);
  auto list = params->params();
  load_checkpoint(path, list);
  return params;
}

struct SelectorBag {
  std::vector<NamedSelector> selectors;
  std::shared_ptr<HemParams> hem;
  std::shared_ptr<SbpParams> sbp;
};

SelectorBag build_selectors(const std::vector<std::string>& names,
                            const std::string& hem_checkpoint,
                            const std::string& sbp_checkpoint, double ratio) {
  SelectorBag bag;
  auto need_hem = [&]() {
    if (!bag.hem) {
      if (hem_checkpoint.empty())
        throw MissingCheckpoint("a HEM selector needs --hem-checkpoint");
      bag.hem = hem_from_checkpoint(hem_checkpoint);
    }
    return bag.hem;
  };
  for (const std::string& name : names) {
    if (name == "nocuts") {
      bag.selectors.push_back({name, std::make_shared<NoCutsSelector>()});
    } else if (name == "random") {
      bag.selectors.push_back({name, std::make_shared<RandomSelector>(ratio)});
    } else if (name == "nv") {
      bag.selectors.push_back({name, std::make_shared<NvSelector>(ratio)});
    } else if (name == "eff") {
      bag.selectors.push_back({name, std::make_shared<EffSelector>(ratio)});
    } else if (name == "randomall") {
      bag.selectors.push_back({name, std::make_shared<RandomAllSelector>()});
    } else if (name == "randomnv") {
      bag.selectors.push_back({name, std::make_shared<RandomNvSelector>(ratio)});
    } else if (name == "sbp") {
      if (sbp_checkpoint.empty())
        throw MissingCheckpoint("the sbp selector needs --sbp-checkpoint");
      if (!bag.sbp) bag.sbp = sbp_from_checkpoint(sbp_checkpoint);
      bag.selectors.push_back({name, std::make_shared<SbpSelector>(bag.sbp)});
    } else if (name == "hem") {
      bag.selectors.push_back(
          {name, std::make_shared<HemSelector>(need_hem(), DecodeMode::Greedy)});
    } else if (name == "hem-sample") {
      bag.selectors.push_back(
          {name, std::make_shared<HemSelector>(need_hem(), DecodeMode::Sample)});
    } else if (name == "hem-ratio") {
      bag.selectors.push_back({name, std::make_shared<HemRatioSelector>(
                                         need_hem(), DecodeMode::Greedy, ratio)});
    } else if (name == "hem-ratio-order") {
      bag.selectors.push_back({name, std::make_shared<HemRatioOrderSelector>(
                                         need_hem(), DecodeMode::Greedy, ratio)});
    } else if (name == "hem-no-h") {
      bag.selectors.push_back(
          {name, std::make_shared<HemNoHSelector>(need_hem(), DecodeMode::Greedy)});
    } else {
      throw ConfigError("unknown selector: " + name);
    }
  }
  return bag;
}

// Feature rows of the cuts each selector picks at the root, for the PCA tool.
void dump_selected_features(const std::vector<NamedSelector>& selectors,
                            const std::vector<MilpInstance>& pool,
                            const SolveConfig& solve, const std::string& out_dir) {
  for (const NamedSelector& named : selectors) {
    CutSelState chosen;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      SimplexOptions opt;
      opt.want_tableau = true;
      LpSolution lp;
      try {
        lp = solve_lp(pool[i], opt);
      } catch (const NumericalFailure&) {
        continue;
      }
      if (lp.status != LpStatus::Optimal) continue;
      const std::vector<Cut> cuts = generate_cuts(pool[i], lp);
      if (cuts.empty()) continue;
      const CutSelState state = featurize(pool[i], lp, cuts);
      Rng rng = Rng(solve.seed).child(0xfea, i);
      for (int idx : named.selector->select(state, cuts, rng))
        chosen.features.push_back(state.features[static_cast<std::size_t>(idx)]);
    }
    write_file(out_dir + "/features_" + named.name + ".csv", features_to_csv(chosen));
  }
}

void write_report(const EvalReport& report, const std::string& out_dir) {
  write_file(out_dir + "/records.csv", report_records_csv(report));
  write_file(out_dir + "/summary.csv", report_summary_csv(report));
  write_file(out_dir + "/table.txt", report_table(report));
  write_file(out_dir + "/timings.csv", report_timings_csv(report));
  std::cout << report_table(report);
}

int cmd_generate(const std::string& family, const std::string& preset, int count,
                 double scale, std::uint64_t seed, const std::string& out,
                 const json& config) {
  GenSpec spec = preset == "paper" ? paper_spec(family_from_name(family))
                                   : desk_spec(family_from_name(family));
  spec.count = count;
  spec.seed = seed;
  spec.scale = scale;
  if (config.contains("generator")) {
    const json& g = config.at("generator");
    spec.rows = g.value("rows", spec.rows);
    spec.cols = g.value("cols", spec.cols);
    spec.density = g.value("density", spec.density);
    spec.cost_lo = g.value("cost_lo", spec.cost_lo);
    spec.cost_hi = g.value("cost_hi", spec.cost_hi);
    spec.nodes = g.value("nodes", spec.nodes);
    spec.affinity = g.value("affinity", spec.affinity);
    spec.items = g.value("items", spec.items);
    spec.knapsacks = g.value("knapsacks", spec.knapsacks);
  }
  const auto instances = generate(spec);
  const std::string manifest = write_corpus(instances, out);
  write_run_manifest(out, "generate", config, {seed});
  std::cout << "wrote " << instances.size() << " instances, manifest " << manifest
            << "\n";
  return 0;
}

int cmd_train(const std::string& data, const std::string& method, std::uint64_t seed,
              const std::string& out, const json& config) {
  const Corpus corpus = load_corpus(data);
  if (corpus.train.empty()) throw ConfigError("empty training split in " + data);
  const json& t = config.contains("train") ? config.at("train") : json::object();

  if (method == "hem") {
    TrainConfig cfg;
    cfg.solve = solve_from_config(config);
    cfg.batch_size = t.value("batch_size", cfg.batch_size);
    cfg.epochs = t.value("epochs", cfg.epochs);
    cfg.lr_low = t.value("lr_low", cfg.lr_low);
    cfg.lr_high = t.value("lr_high", cfg.lr_high);
    cfg.delay_freq = t.value("delay_freq", cfg.delay_freq);
    cfg.baseline = t.value("baseline", cfg.baseline);
    cfg.normalize_rewards = t.value("normalize_rewards", cfg.normalize_rewards);
    cfg.workers = t.value("workers", cfg.workers);
    cfg.eval_size = t.value("eval_size", cfg.eval_size);
    cfg.eval_every = t.value("eval_every", cfg.eval_every);
    cfg.seed = seed;
    cfg.out_dir = out;
    const std::string reward = t.value("reward", std::string("pd_integral"));
    if (reward == "pd_integral") {
      cfg.reward = RewardKind::NegPdIntegral;
    } else if (reward == "solve_time") {
      cfg.reward = RewardKind::NegSolveTime;
    } else if (reward == "dual_bound") {
      cfg.reward = RewardKind::NegDualBoundImprovement;
    } else {
      throw ConfigError("unknown reward: " + reward);
    }
    const int hidden = t.value("hidden", 128);
    Rng init = Rng(seed).child(0x8e8);
    HemParams params(init, hidden);
    const TrainResult result = train(params, corpus.train, corpus.test, cfg);
    save_checkpoint(out + "/hem.json", params.all());
    write_run_manifest(out, "train hem", config, {seed});
    std::cout << "trained hem for " << result.metrics.size() << " epochs, best epoch "
              << result.best_epoch << ", checkpoint " << out << "/hem.json\n";
    return 0;
  }
  if (method == "sbp") {
    EsConfig cfg;
    cfg.solve = solve_from_config(config);
    cfg.population = t.value("population", cfg.population);
    cfg.sigma = t.value("sigma", cfg.sigma);
    cfg.step = t.value("step", cfg.step);
    cfg.generations = t.value("generations", cfg.generations);
    cfg.fitness_pool = t.value("fitness_pool", cfg.fitness_pool);
    cfg.sbp_hidden = t.value("hidden", cfg.sbp_hidden);
    cfg.seed = seed;
    const SbpParams params = es_train_sbp(corpus.train, cfg);
    save_checkpoint(out + "/sbp.json", params.params());
    write_run_manifest(out, "train sbp", config, {seed});
    std::cout << "trained sbp for " << cfg.generations << " generations, checkpoint "
              << out << "/sbp.json\n";
    return 0;
  }
  throw ConfigError("unknown method: " + method);
}

std::vector<std::uint64_t> seeds_from_config(const json& config) {
  if (config.contains("eval") && config.at("eval").contains("seeds"))
    return config.at("eval").at("seeds").get<std::vector<std::uint64_t>>();
  return {1, 2, 3};
}

int cmd_evaluate(const std::string& data, const std::vector<std::string>& names,
                 const std::string& hem_checkpoint, const std::string& sbp_checkpoint,
                 double ratio, const std::string& out, const json& config,
                 bool dump_features, bool on_train_split) {
  const Corpus corpus = load_corpus(data);
  const std::vector<MilpInstance>& pool = on_train_split ? corpus.train : corpus.test;
  if (pool.empty()) throw ConfigError("empty evaluation split in " + data);
  const SelectorBag bag = build_selectors(names, hem_checkpoint, sbp_checkpoint, ratio);
  EvalOptions options;
  options.solve = solve_from_config(config);
  options.seeds = seeds_from_config(config);
  options.workers = config.value("workers", 1);
  const EvalReport report = evaluate(bag.selectors, pool, options);
  write_report(report, out);
  if (dump_features) dump_selected_features(bag.selectors, pool, options.solve, out);
  write_run_manifest(out, "evaluate", config, options.seeds);
  return 0;
}

int cmd_order_study(const std::string& data, const std::string& rule, double ratio,
                    int orders, std::uint64_t seed, const std::string& out,
                    const json& config) {
  const Corpus corpus = load_corpus(data);
  if (corpus.test.empty()) throw ConfigError("empty test split in " + data);
  std::shared_ptr<CutSelector> selector;
  if (rule == "randomall") {
    selector = std::make_shared<RandomAllSelector>();
  } else if (rule == "randomnv") {
    selector = std::make_shared<RandomNvSelector>(ratio);
  } else {
    throw ConfigError("order-study rule must be randomall or randomnv");
  }
  const OrderStudyResult result =
      order_study(corpus.test, *selector, orders, solve_from_config(config), seed);
  write_file(out + "/order_study.csv", order_study_csv(result));
  write_run_manifest(out, "order-study", config, {seed});
  std::cout << "instances with >=5 candidate cuts: " << result.eligible
            << ", nonzero-spread fraction: " << result.fraction_nonzero_spread << "\n";
  return 0;
}

int cmd_pca(const std::string& features_path, const std::string& out) {
  const std::string text = read_file(features_path);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::array<double, kFeatureDim>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<double, kFeatureDim> row{};
    std::istringstream ls(line);
    std::string field;
    for (int i = 0; i < kFeatureDim; ++i) {
      if (!std::getline(ls, field, ',')) throw IoError("short feature row");
      row[static_cast<std::size_t>(i)] = std::stod(field);
    }
    rows.push_back(row);
  }
  if (rows.size() < 2) throw ConfigError("PCA needs at least two selected cuts");
  const PcaResult result = pca_project(rows);
  write_file(out + "/pca.csv", pca_csv(result));
  std::cout << "projected " << rows.size() << " cuts"
            << (result.degenerate ? " (degenerate covariance)" : "") << "\n";
  return 0;
}

int cmd_generalize(const std::string& family, const std::string& preset, double scale,
                   int count, const std::vector<std::string>& names,
                   const std::string& hem_checkpoint, const std::string& sbp_checkpoint,
                   double ratio, std::uint64_t seed, const std::string& out,
                   const json& config) {
  GenSpec spec = preset == "paper" ? paper_spec(family_from_name(family))
                                   : desk_spec(family_from_name(family));
  spec.count = count;
  spec.seed = seed + 1000003;  // a stream never used for training corpora
  spec.scale = scale;
  const auto pool = generate(spec);
  const SelectorBag bag = build_selectors(names, hem_checkpoint, sbp_checkpoint, ratio);
  EvalOptions options;
  options.solve = solve_from_config(config);
  options.seeds = seeds_from_config(config);
  options.workers = config.value("workers", 1);
  const EvalReport report = evaluate(bag.selectors, pool, options);
  write_report(report, out);
  write_run_manifest(out, "generalize", config, options.seeds);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"branch-and-cut benchmark harness with learned cut selection"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", preset = "desk";
  std::uint64_t seed = 1;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--preset", preset, "size preset")
      ->check(CLI::IsMember({"desk", "paper"}))
      ->capture_default_str();

  auto* gen = app.add_subcommand("generate", "generate a synthetic corpus");
  std::string family = "setcover";
  int count = 50;
  double scale = 1.0;
  gen->add_option("--family", family, "setcover | mis | mknapsack");
  gen->add_option("--count", count, "number of instances");
  gen->add_option("--scale", scale, "size multiplier");

  auto* tr = app.add_subcommand("train", "train a cut-selection policy");
  std::string data, method = "hem";
  tr->add_option("--data", data, "corpus manifest.json")->required();
  tr->add_option("--method", method, "hem | sbp");

  auto* ev = app.add_subcommand("evaluate", "evaluate selectors on the test split");
  std::string ev_data, hem_ckpt, sbp_ckpt;
  std::vector<std::string> selector_names = {"nocuts", "random", "nv", "eff"};
  double ratio = 0.2;
  bool dump_features = false, on_train = false;
  ev->add_option("--data", ev_data, "corpus manifest.json")->required();
  ev->add_option("--selectors", selector_names, "selector names")->delimiter(',');
  ev->add_option("--hem-checkpoint", hem_ckpt, "HEM checkpoint");
  ev->add_option("--sbp-checkpoint", sbp_ckpt, "SBP checkpoint");
  ev->add_option("--ratio", ratio, "fixed selection ratio for rule policies");
  ev->add_flag("--dump-features", dump_features, "write selected-cut feature CSVs");
  ev->add_flag("--train-split", on_train, "evaluate on the training split");

  auto* os = app.add_subcommand("order-study", "order-sensitivity study");
  std::string os_data, rule = "randomall";
  int orders = 10;
  double os_ratio = 0.2;
  os->add_option("--data", os_data, "corpus manifest.json")->required();
  os->add_option("--rule", rule, "randomall | randomnv");
  os->add_option("--ratio", os_ratio, "ratio for randomnv");
  os->add_option("--orders", orders, "orders per instance");

  auto* pc = app.add_subcommand("pca", "project selected-cut features to 2-D");
  std::string features_path;
  pc->add_option("--features", features_path, "feature CSV")->required();

  auto* gl = app.add_subcommand("generalize", "evaluate on scaled instances");
  std::string gl_family = "setcover", gl_hem, gl_sbp;
  double gl_scale = 2.0, gl_ratio = 0.2;
  int gl_count = 10;
  std::vector<std::string> gl_names = {"nocuts", "random", "hem"};
  gl->add_option("--family", gl_family, "setcover | mis | mknapsack");
  gl->add_option("--scale", gl_scale, "size multiplier");
  gl->add_option("--count", gl_count, "number of instances");
  gl->add_option("--selectors", gl_names, "selector names")->delimiter(',');
  gl->add_option("--hem-checkpoint", gl_hem, "HEM checkpoint");
  gl->add_option("--sbp-checkpoint", gl_sbp, "SBP checkpoint");
  gl->add_option("--ratio", gl_ratio, "fixed selection ratio for rule policies");

  try {
    app.parse(argc, argv);
    const json config = load_config(config_path);
    fs::create_directories(out_dir);
    if (gen->parsed())
      return cmd_generate(family, preset, count, scale, seed, out_dir, config);
    if (tr->parsed()) return cmd_train(data, method, seed, out_dir, config);
    if (ev->parsed())
      return cmd_evaluate(ev_data, selector_names, hem_ckpt, sbp_ckpt, ratio, out_dir,
                          config, dump_features, on_train);
    if (os->parsed())
      return cmd_order_study(os_data, rule, os_ratio, orders, seed, out_dir, config);
    if (pc->parsed()) return cmd_pca(features_path, out_dir);
    if (gl->parsed())
      return cmd_generalize(gl_family, preset, gl_scale, gl_count, gl_names, gl_hem,
                            gl_sbp, gl_ratio, seed, out_dir, config);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const MissingCheckpoint& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
