#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cutsel/instance_gen.hpp"
#include "cutsel/report.hpp"
#include "cutsel/rule_policies.hpp"
#include "oracles.hpp"

using namespace cutsel;

namespace {

std::vector<MilpInstance> small_pool(int count, std::uint64_t seed = 5) {
  GenSpec spec = desk_spec(Family::SetCovering);
  spec.rows = 10;
  spec.cols = 20;
  spec.density = 0.2;
  spec.count = count;
  spec.seed = seed;
  return generate(spec);
}

EvalOptions fast_options() {
  EvalOptions opt;
  opt.solve.time_mode = TimeMode::WorkUnits;
  opt.solve.work_limit = 20000;
  return opt;
}

}  // namespace

TEST_CASE("nocuts against itself shows zero improvement") {
  std::vector<NamedSelector> selectors;
  selectors.push_back({"nocuts", std::make_shared<NoCutsSelector>()});
  selectors.push_back({"nocuts2", std::make_shared<NoCutsSelector>()});
  const EvalReport report = evaluate(selectors, small_pool(3), fast_options());
  REQUIRE(report.rows.size() == 2);
  CHECK(!report.rows[0].has_improvement);
  CHECK(report.rows[1].has_improvement);
  CHECK(report.rows[1].improvement_time == doctest::Approx(0.0));
  CHECK(report.rows[1].improvement_pdi == doctest::Approx(0.0));
}

TEST_CASE("injected means reproduce the reference improvements") {
  EvalReport report;
  auto push = [&](const std::string& method, double time) {
    EvalRecord r;
    r.method = method;
    r.instance = "inst";
    r.seed = 1;
    r.time = time;
    r.pd_integral = 1.0;
    report.records.push_back(r);
  };
  push("nocuts", 6.31);
  push("hem", 1.85);
  report.rows = aggregate_records(report.records);
  REQUIRE(report.rows.size() == 2);
  const double imp = 100.0 * report.rows[1].improvement_time;
  CHECK(std::abs(imp - 70.6) <= 0.1);  // reference value at table precision
  const std::string table = report_table(report);
  CHECK(table.find("70.7") != std::string::npos);  // exact ratio rounds to 70.7
}

TEST_CASE("deterministic selectors give zero stdev across seeds") {
  std::vector<NamedSelector> selectors;
  selectors.push_back({"nv", std::make_shared<NvSelector>()});
  EvalOptions opt = fast_options();
  opt.seeds = {1, 2};
  const EvalReport report = evaluate(selectors, small_pool(1), opt);
  REQUIRE(report.records.size() == 2);
  CHECK(report.rows[0].time_sd == doctest::Approx(0.0));
  CHECK(report.rows[0].pdi_sd == doctest::Approx(0.0));
}

TEST_CASE("csv reload reproduces the aggregate rows within 1e-9") {
  std::vector<NamedSelector> selectors;
  selectors.push_back({"nocuts", std::make_shared<NoCutsSelector>()});
  selectors.push_back({"random", std::make_shared<RandomSelector>()});
  selectors.push_back({"nv", std::make_shared<NvSelector>()});
  const EvalReport report = evaluate(selectors, small_pool(4), fast_options());
  const std::string csv = report_records_csv(report);
  const std::vector<EvalRecord> reloaded = records_from_csv(csv);
  REQUIRE(reloaded.size() == report.records.size());
  const std::vector<MethodRow> rows = aggregate_records(reloaded);
  REQUIRE(rows.size() == report.rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].time_mean == doctest::Approx(report.rows[i].time_mean).epsilon(1e-9));
    CHECK(rows[i].time_sd == doctest::Approx(report.rows[i].time_sd).epsilon(1e-9));
    CHECK(rows[i].pdi_mean == doctest::Approx(report.rows[i].pdi_mean).epsilon(1e-9));
    CHECK(rows[i].pdi_sd == doctest::Approx(report.rows[i].pdi_sd).epsilon(1e-9));
  }
}

TEST_CASE("evaluation is bit-identical across runs in work-unit mode") {
  std::vector<NamedSelector> selectors;
  selectors.push_back({"nocuts", std::make_shared<NoCutsSelector>()});
  selectors.push_back({"random", std::make_shared<RandomSelector>()});
  const auto pool = small_pool(3);
  const EvalReport a = evaluate(selectors, pool, fast_options());
  const EvalReport b = evaluate(selectors, pool, fast_options());
  CHECK(report_records_csv(a) == report_records_csv(b));
  CHECK(report_summary_csv(a) == report_summary_csv(b));
}

TEST_CASE("parallel evaluation matches the single-threaded records") {
  std::vector<NamedSelector> selectors;
  selectors.push_back({"nocuts", std::make_shared<NoCutsSelector>()});
  selectors.push_back({"randomall", std::make_shared<RandomAllSelector>()});
  const auto pool = small_pool(3);
  EvalOptions seq = fast_options();
  EvalOptions par = fast_options();
  par.workers = 4;
  CHECK(report_records_csv(evaluate(selectors, pool, seq)) ==
        report_records_csv(evaluate(selectors, pool, par)));
}

TEST_CASE("order study: one candidate cut means zero spread") {
  // 2x <= 3 yields exactly one Gomory cut, so every order is identical.
  MilpInstance inst;
  inst.name = "single";
  inst.n = 1;
  inst.objective = {-1.0};
  inst.lower = {0.0};
  inst.upper = {kInf};
  inst.integer_set = {0};
  inst.rows.push_back({{{0, 2.0}}, 3.0});
  const RandomAllSelector rule;
  const OrderStudyResult res = order_study({inst}, rule, 6, fast_options().solve, 1);
  REQUIRE(res.instances.size() == 1);
  CHECK(res.instances[0].pool_size == 1);
  CHECK(res.instances[0].stdev_pdi == doctest::Approx(0.0));
}

TEST_CASE("order study is deterministic given the seed") {
  const auto pool = small_pool(2);
  const RandomAllSelector rule;
  const OrderStudyResult a = order_study(pool, rule, 4, fast_options().solve, 9);
  const OrderStudyResult b = order_study(pool, rule, 4, fast_options().solve, 9);
  REQUIRE(a.instances.size() == b.instances.size());
  for (std::size_t i = 0; i < a.instances.size(); ++i) {
    CHECK(a.instances[i].mean_pdi == b.instances[i].mean_pdi);
    CHECK(a.instances[i].stdev_pdi == b.instances[i].stdev_pdi);
  }
}

TEST_CASE("pca: two distinct cuts land on the first axis") {
  std::vector<std::array<double, kFeatureDim>> rows(2);
  rows[0].fill(0.0);
  rows[1].fill(0.0);
  rows[1][0] = 2.0;
  rows[1][4] = 1.0;
  const PcaResult res = pca_project(rows);
  CHECK(!res.degenerate);
  CHECK(res.coords[0][1] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(res.coords[1][1] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(std::abs(res.coords[0][0] - res.coords[1][0]) > 1.0);
}

TEST_CASE("pca: identical cuts are degenerate") {
  std::vector<std::array<double, kFeatureDim>> rows(3);
  for (auto& r : rows) {
    r.fill(1.25);
  }
  const PcaResult res = pca_project(rows);
  CHECK(res.degenerate);
  for (const auto& c : res.coords) {
    CHECK(c[0] == 0.0);
    CHECK(c[1] == 0.0);
  }
  CHECK(pca_csv(res).find("degenerate") != std::string::npos);
}

TEST_CASE("pca reconstruction error equals the discarded eigenvalue mass") {
  Rng rng(33);
  std::vector<std::array<double, kFeatureDim>> rows(10);
  for (auto& r : rows)
    for (double& v : r) v = rng.normal();
  const PcaResult res = pca_project(rows);
  // residual Frobenius norm / (n-1) must equal the sum of eigenvalues 3..13
  std::array<double, kFeatureDim> mean{};
  for (const auto& r : rows)
    for (int j = 0; j < kFeatureDim; ++j) mean[static_cast<std::size_t>(j)] += r[static_cast<std::size_t>(j)] / 10.0;
  double total_var = 0.0;
  for (const auto& r : rows)
    for (int j = 0; j < kFeatureDim; ++j) {
      const double d = r[static_cast<std::size_t>(j)] - mean[static_cast<std::size_t>(j)];
      total_var += d * d;
    }
  total_var /= 9.0;
  double captured = 0.0;
  for (const auto& c : res.coords) captured += (c[0] * c[0] + c[1] * c[1]) / 9.0;
  double discarded = 0.0;
  for (std::size_t i = 2; i < res.eigenvalues.size(); ++i) discarded += res.eigenvalues[i];
  CHECK(total_var - captured == doctest::Approx(discarded).epsilon(1e-9));
}

TEST_CASE("pca needs at least two cuts") {
  std::vector<std::array<double, kFeatureDim>> rows(1);
  rows[0].fill(0.0);
  CHECK_THROWS_AS(pca_project(rows), ConfigError);
}

TEST_CASE("pca extremes flag the hull anchor points") {
  std::vector<std::array<double, kFeatureDim>> rows(5);
  for (int i = 0; i < 5; ++i) {
    rows[static_cast<std::size_t>(i)].fill(0.0);
    rows[static_cast<std::size_t>(i)][0] = i;        // spread along one axis
    rows[static_cast<std::size_t>(i)][1] = (i % 2);  // some second-direction noise
  }
  const PcaResult res = pca_project(rows);
  // min-x and max-x flags must be the two extreme points of the line.
  const int lo = res.extremes[0], hi = res.extremes[1];
  CHECK(((lo == 0 && hi == 4) || (lo == 4 && hi == 0)));
}
