#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "cutsel/errors.hpp"
#include "cutsel/milp.hpp"
#include "cutsel/simplex.hpp"
#include "oracles.hpp"

using namespace cutsel;

namespace {

MilpInstance box_lp() {
  MilpInstance inst;
  inst.name = "box";
  inst.n = 2;
  inst.objective = {-1.0, -1.0};
  inst.lower = {0.0, 0.0};
  inst.upper = {kInf, kInf};
  inst.rows.push_back({{{0, 1.0}}, 1.0});
  inst.rows.push_back({{{1, 1.0}}, 1.0});
  return inst;
}

}  // namespace

TEST_CASE("box LP optimum at the corner") {
  const LpSolution sol = solve_lp(box_lp());
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(-2.0));
  CHECK(sol.x[0] == doctest::Approx(1.0));
  CHECK(sol.x[1] == doctest::Approx(1.0));
}

TEST_CASE("empty feasible set is infeasible") {
  MilpInstance inst;
  inst.name = "empty";
  inst.n = 1;
  inst.objective = {0.0};
  inst.lower = {0.0};
  inst.upper = {kInf};
  inst.rows.push_back({{{0, 1.0}}, -1.0});
  CHECK(solve_lp(inst).status == LpStatus::Infeasible);
}

TEST_CASE("unbounded detection") {
  MilpInstance inst;
  inst.name = "unb";
  inst.n = 1;
  inst.objective = {-1.0};
  inst.lower = {0.0};
  inst.upper = {kInf};
  CHECK(solve_lp(inst).status == LpStatus::Unbounded);
}

TEST_CASE("random LPs match basis enumeration") {
  Rng rng(2024);
  int solved = 0;
  for (int t = 0; t < 60; ++t) {
    const int n = 2 + static_cast<int>(rng.uniform_int(4));
    const int m = 2 + static_cast<int>(rng.uniform_int(4));
    const MilpInstance inst = oracle::random_lp(rng, n, m, t % 4 == 0);
    const auto expected = oracle::lp_by_basis_enumeration(inst);
    const LpSolution sol = solve_lp(inst);
    if (expected.has_value()) {
      REQUIRE(sol.status == LpStatus::Optimal);
      CHECK(sol.objective == doctest::Approx(*expected).epsilon(1e-9).scale(1.0));
      ++solved;
    } else {
      CHECK(sol.status == LpStatus::Infeasible);
    }
  }
  CHECK(solved > 30);  // the generator mostly produces feasible LPs
}

TEST_CASE("re-solving is deterministic") {
  Rng rng(7);
  const MilpInstance inst = oracle::random_lp(rng, 5, 5, false);
  const LpSolution a = solve_lp(inst);
  const LpSolution b = solve_lp(inst);
  CHECK(a.objective == b.objective);
  CHECK(a.pivots == b.pivots);
  CHECK(a.x == b.x);
}

TEST_CASE("optimal solutions satisfy rows and the objective identity") {
  Rng rng(99);
  for (int t = 0; t < 20; ++t) {
    const MilpInstance inst = oracle::random_lp(rng, 4, 4, false);
    const LpSolution sol = solve_lp(inst);
    REQUIRE(sol.status == LpStatus::Optimal);
    for (const Row& row : inst.rows) {
      double act = 0.0;
      for (const auto& [j, v] : row.coefs) act += v * sol.x[static_cast<std::size_t>(j)];
      CHECK(act <= row.rhs + 1e-7);
    }
    double z = 0.0;
    for (int j = 0; j < inst.n; ++j) z += inst.objective[static_cast<std::size_t>(j)] * sol.x[static_cast<std::size_t>(j)];
    CHECK(std::abs(z - sol.objective) <= 1e-7 * (1.0 + std::abs(z)));
  }
}

TEST_CASE("finite variable bounds are honored") {
  MilpInstance inst;
  inst.name = "bounds";
  inst.n = 2;
  inst.objective = {-3.0, 2.0};
  inst.lower = {0.0, -2.0};
  inst.upper = {2.5, 4.0};
  inst.rows.push_back({{{0, 1.0}, {1, 1.0}}, 3.0});
  const LpSolution sol = solve_lp(inst);
  REQUIRE(sol.status == LpStatus::Optimal);
  // x0 -> 2.5 (upper bound), x1 -> -2 (lower bound)
  CHECK(sol.x[0] == doctest::Approx(2.5));
  CHECK(sol.x[1] == doctest::Approx(-2.0));
}

TEST_CASE("add_rows appends cuts in order") {
  const MilpInstance inst = box_lp();
  Cut a;
  a.alpha = {{0, 1.0}, {1, 1.0}};
  a.beta = 1.5;
  a.id = 0;
  Cut b;
  b.alpha = {{0, 2.0}};
  b.beta = 0.5;
  b.id = 1;

  SUBCASE("two cuts land at rows m and m+1") {
    const MilpInstance out = add_rows(inst, {a, b});
    REQUIRE(out.num_rows() == inst.num_rows() + 2);
    CHECK(out.rows[2].rhs == 1.5);
    CHECK(out.rows[3].rhs == 0.5);
    CHECK(out.rows[0].rhs == inst.rows[0].rhs);
  }
  SUBCASE("empty sequence is the identity") {
    const MilpInstance out = add_rows(inst, {});
    CHECK(out.num_rows() == inst.num_rows());
    CHECK(instance_to_json(out) == instance_to_json(inst));
  }
  SUBCASE("swapped order permutes the appended block") {
    const MilpInstance ab = add_rows(inst, {a, b});
    const MilpInstance ba = add_rows(inst, {b, a});
    CHECK(ab.rows[2].rhs == ba.rows[3].rhs);
    CHECK(ab.rows[3].rhs == ba.rows[2].rhs);
  }
  SUBCASE("out-of-range index is rejected") {
    Cut bad;
    bad.alpha = {{7, 1.0}};
    bad.beta = 0.0;
    CHECK_THROWS_AS(add_rows(inst, {bad}), DimensionMismatch);
  }
}

TEST_CASE("adding a valid cut never lowers the LP optimum") {
  Rng rng(31);
  for (int t = 0; t < 10; ++t) {
    const MilpInstance inst = oracle::random_lp(rng, 4, 3, false);
    const LpSolution before = solve_lp(inst);
    REQUIRE(before.status == LpStatus::Optimal);
    // A redundant-ish cut through a feasible direction still cannot expand
    // the region; use sum x_j <= big so it stays valid.
    Cut cut;
    for (int j = 0; j < inst.n; ++j) cut.alpha.emplace_back(j, 1.0);
    cut.beta = 100.0;
    const LpSolution after = solve_lp(add_rows(inst, {cut}));
    REQUIRE(after.status == LpStatus::Optimal);
    CHECK(after.objective >= before.objective - 1e-7);
  }
}

TEST_CASE("instance json round trip is byte exact") {
  MilpInstance inst = box_lp();
  inst.integer_set = {0};
  inst.upper[1] = 7.0;
  inst.lower[1] = -1.0;
  const std::string once = instance_to_json(inst);
  const MilpInstance reread = instance_from_json(once);
  const std::string twice = instance_to_json(reread);
  CHECK(once == twice);
}

TEST_CASE("json load normalizes >= and = rows") {
  const std::string doc = R"({
    "name": "rel",
    "n": 2,
    "m": 2,
    "c": [1.0, 2.0],
    "rows": [
      {"coefs": [[0, 1.0]], "rhs": 2.0, "rel": ">="},
      {"coefs": [[0, 1.0], [1, 1.0]], "rhs": 3.0, "rel": "="}
    ],
    "integers": [],
    "bounds": [[0.0, "inf"], [0.0, "inf"]]
  })";
  const MilpInstance inst = instance_from_json(doc);
  REQUIRE(inst.num_rows() == 3);  // >= negated, = split into two rows
  CHECK(inst.rows[0].rhs == -2.0);
  CHECK(inst.rows[0].coefs[0].second == -1.0);
  CHECK(inst.rows[1].rhs == 3.0);
  CHECK(inst.rows[2].rhs == -3.0);
}

TEST_CASE("infinite bounds encode as strings") {
  const MilpInstance inst = box_lp();
  const std::string text = instance_to_json(inst);
  CHECK(text.find("\"inf\"") != std::string::npos);
  const MilpInstance back = instance_from_json(text);
  CHECK(back.upper[0] == kInf);
}

TEST_CASE("file round trip") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "cutsel_milp_test";
  fs::create_directories(dir);
  const MilpInstance inst = box_lp();
  const std::string path = (dir / "inst.json").string();
  write_instance(inst, path);
  const MilpInstance back = read_instance(path);
  CHECK(instance_to_json(back) == instance_to_json(inst));
  fs::remove_all(dir);
}

TEST_CASE("iteration cap raises NumericalFailure and still reports work") {
  Rng rng(55);
  const MilpInstance inst = oracle::random_lp(rng, 6, 6, false);
  SimplexOptions opt;
  opt.max_iterations = 1;
  long work = 0;
  CHECK_THROWS_AS(solve_lp_bounded(inst, inst.lower, inst.upper, opt, &work),
                  NumericalFailure);
  CHECK(work >= 1);
}

TEST_CASE("validate rejects malformed instances") {
  MilpInstance inst = box_lp();
  inst.rows.push_back({{{5, 1.0}}, 1.0});
  CHECK_THROWS_AS(inst.validate(), DimensionMismatch);
  MilpInstance inst2 = box_lp();
  inst2.lower[0] = 2.0;
  inst2.upper[0] = 1.0;
  CHECK_THROWS_AS(inst2.validate(), DimensionMismatch);
}
