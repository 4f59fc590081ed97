#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <set>

#include "cutsel/engine.hpp"
#include "cutsel/gomory.hpp"
#include "cutsel/instance_gen.hpp"
#include "cutsel/rule_policies.hpp"
#include "oracles.hpp"

using namespace cutsel;

TEST_CASE("mis on a triangle has optimum 1") {
  const MilpInstance inst = mis_from_edges(3, {{0, 1}, {1, 2}, {0, 2}}, "triangle");
  const SolveStats stats = branch_and_cut(inst, NoCutsSelector{}, SolveConfig{});
  REQUIRE(stats.status == SolveStatus::OptimalProven);
  CHECK(stats.best_objective == doctest::Approx(-1.0));
}

TEST_CASE("set covering rows are always coverable") {
  GenSpec spec = desk_spec(Family::SetCovering);
  spec.rows = 5;
  spec.cols = 8;
  spec.count = 20;
  spec.seed = 3;
  for (const MilpInstance& inst : generate(spec)) {
    for (const Row& row : inst.rows) {
      CHECK(row.rhs == -1.0);
      CHECK(row.coefs.size() >= 2);
      for (const auto& [j, v] : row.coefs) {
        (void)j;
        CHECK(v == -1.0);
      }
    }
    // every column appears somewhere
    std::set<int> used;
    for (const Row& row : inst.rows)
      for (const auto& [j, v] : row.coefs) {
        (void)v;
        used.insert(j);
      }
    CHECK(static_cast<int>(used.size()) == inst.n);
  }
}

TEST_CASE("multiple knapsack optimum matches exhaustive assignment") {
  GenSpec spec = desk_spec(Family::MultipleKnapsack);
  spec.items = 6;
  spec.knapsacks = 2;
  spec.count = 4;
  spec.seed = 11;
  for (const MilpInstance& inst : generate(spec)) {
    const auto expected = oracle::milp_by_enumeration(inst);
    REQUIRE(expected.has_value());
    SolveConfig cfg;
    cfg.work_limit = 500000;
    const SolveStats stats = branch_and_cut(inst, NoCutsSelector{}, cfg);
    REQUIRE(stats.status == SolveStatus::OptimalProven);
    CHECK(stats.best_objective == doctest::Approx(*expected).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("same spec and seed produce byte-identical files") {
  for (Family fam : {Family::SetCovering, Family::MaxIndependentSet, Family::MultipleKnapsack}) {
    GenSpec spec = desk_spec(fam);
    spec.count = 3;
    spec.seed = 77;
    const auto a = generate(spec);
    const auto b = generate(spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK(instance_to_json(a[i]) == instance_to_json(b[i]));
  }
}

TEST_CASE("generated instances are feasible and bounded") {
  for (Family fam : {Family::SetCovering, Family::MaxIndependentSet, Family::MultipleKnapsack}) {
    GenSpec spec = desk_spec(fam);
    spec.count = 5;
    spec.seed = 13;
    for (const MilpInstance& inst : generate(spec)) {
      const LpSolution lp = solve_lp(inst);
      CHECK(lp.status == LpStatus::Optimal);  // binary boxes are bounded
      for (int j = 0; j < inst.n; ++j) {
        CHECK(inst.lower[static_cast<std::size_t>(j)] == 0.0);
        CHECK(inst.upper[static_cast<std::size_t>(j)] == 1.0);
      }
    }
  }
}

TEST_CASE("desk-scale instances mostly yield nonempty cut pools") {
  int total = 0, nonempty = 0;
  for (Family fam : {Family::SetCovering, Family::MaxIndependentSet, Family::MultipleKnapsack}) {
    GenSpec spec = desk_spec(fam);
    spec.count = 20;
    spec.seed = 29;
    for (const MilpInstance& inst : generate(spec)) {
      const LpSolution lp = solve_lp(inst);
      ++total;
      if (!generate_cuts(inst, lp).empty()) ++nonempty;
    }
  }
  CHECK(static_cast<double>(nonempty) >= 0.8 * total);
}

TEST_CASE("scale multiplier grows the instances") {
  GenSpec spec = desk_spec(Family::MaxIndependentSet);
  spec.count = 1;
  spec.scale = 2.0;
  const auto scaled = generate(spec);
  CHECK(scaled[0].n == 50);
  GenSpec base = desk_spec(Family::MaxIndependentSet);
  base.count = 1;
  CHECK(generate(base)[0].n == 25);
}

TEST_CASE("corpus write and load round trips with an 80/20 split") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "cutsel_corpus_test";
  fs::remove_all(dir);
  GenSpec spec = desk_spec(Family::SetCovering);
  spec.rows = 6;
  spec.cols = 10;
  spec.count = 10;
  const auto instances = generate(spec);
  const std::string manifest = write_corpus(instances, dir.string());
  const Corpus corpus = load_corpus(manifest);
  CHECK(corpus.train.size() == 8);
  CHECK(corpus.test.size() == 2);
  CHECK(instance_to_json(corpus.train[0]) == instance_to_json(instances[0]));
  CHECK(instance_to_json(corpus.test[1]) == instance_to_json(instances[9]));
  fs::remove_all(dir);
}

TEST_CASE("paper preset carries the full-scale sizes") {
  const GenSpec sc = paper_spec(Family::SetCovering);
  CHECK(sc.rows == 500);
  CHECK(sc.cols == 1000);
  CHECK(sc.density == 0.05);
  const GenSpec mis = paper_spec(Family::MaxIndependentSet);
  CHECK(mis.nodes == 500);
  CHECK(mis.affinity == 4);
  const GenSpec mk = paper_spec(Family::MultipleKnapsack);
  CHECK(mk.items == 60);
  CHECK(mk.knapsacks == 12);
}

TEST_CASE("invalid spec is rejected") {
  GenSpec spec = desk_spec(Family::SetCovering);
  spec.count = 0;
  CHECK_THROWS_AS(generate(spec), ConfigError);
  spec.count = 1;
  spec.density = 0.0;
  CHECK_THROWS_AS(generate(spec), ConfigError);
}
