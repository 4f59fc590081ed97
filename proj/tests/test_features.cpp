#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cutsel/errors.hpp"
#include "cutsel/features.hpp"
#include "cutsel/gomory.hpp"
#include "oracles.hpp"

using namespace cutsel;

namespace {

// Fixed instance/solution pair for hand-checked feature values.
struct Fixture {
  MilpInstance inst;
  LpSolution lp;
};

Fixture make_fixture(int n, std::vector<double> c, std::vector<double> x,
                     std::vector<int> integers = {}) {
  Fixture f;
  f.inst.name = "fix";
  f.inst.n = n;
  f.inst.objective = std::move(c);
  f.inst.lower.assign(n, 0.0);
  f.inst.upper.assign(n, kInf);
  f.inst.integer_set = std::move(integers);
  f.lp.status = LpStatus::Optimal;
  f.lp.x = std::move(x);
  return f;
}

Cut make_cut(std::vector<std::pair<int, double>> alpha, double beta, long id = 0) {
  Cut cut;
  cut.alpha = std::move(alpha);
  cut.beta = beta;
  cut.id = id;
  return cut;
}

}  // namespace

TEST_CASE("parallelism is 1 for a cut parallel to the objective") {
  Fixture f = make_fixture(3, {1.0, 2.0, 3.0}, {0.0, 0.0, 0.0});
  const CutSelState state =
      featurize(f.inst, f.lp, {make_cut({{0, 1.0}, {1, 2.0}, {2, 3.0}}, 1.0)});
  CHECK(state.features[0].parallelism == doctest::Approx(1.0));
}

TEST_CASE("efficacy and normalized violation on an axis-aligned hyperplane") {
  Fixture f = make_fixture(2, {1.0, 1.0}, {0.0, 3.0});
  const CutSelState state = featurize(f.inst, f.lp, {make_cut({{1, 1.0}}, 1.0)});
  CHECK(state.features[0].efficacy == doctest::Approx(2.0));
  CHECK(state.features[0].normalized_violation == doctest::Approx(2.0));
}

TEST_CASE("support counting") {
  Fixture f = make_fixture(4, {1.0, 1.0, 1.0, 1.0}, {0.0, 0.0, 0.0, 0.0}, {0, 1});
  const CutSelState state = featurize(f.inst, f.lp, {make_cut({{0, 1.0}, {1, 1.0}}, 1.0)});
  CHECK(state.features[0].support == doctest::Approx(0.5));
  CHECK(state.features[0].integral_support == doctest::Approx(1.0));
}

TEST_CASE("coefficient and objective statistics are support-restricted") {
  Fixture f = make_fixture(3, {5.0, -1.0, 9.0}, {0.0, 0.0, 0.0});
  const CutSelState state = featurize(f.inst, f.lp, {make_cut({{0, 2.0}, {2, -4.0}}, 1.0)});
  const CutFeatures& ft = state.features[0];
  CHECK(ft.coef_mean == doctest::Approx(-1.0));
  CHECK(ft.coef_max == doctest::Approx(2.0));
  CHECK(ft.coef_min == doctest::Approx(-4.0));
  CHECK(ft.coef_std == doctest::Approx(3.0));
  CHECK(ft.obj_mean == doctest::Approx(7.0));  // over {5, 9}
  CHECK(ft.obj_max == doctest::Approx(9.0));
  CHECK(ft.obj_min == doctest::Approx(5.0));
}

TEST_CASE("beta near zero uses denominator one") {
  Fixture f = make_fixture(2, {1.0, 1.0}, {1.0, 0.0});
  const CutSelState state = featurize(f.inst, f.lp, {make_cut({{0, 1.0}}, 0.0)});
  CHECK(state.features[0].normalized_violation == doctest::Approx(1.0));
}

TEST_CASE("zero-norm cut is rejected") {
  Fixture f = make_fixture(2, {1.0, 1.0}, {0.0, 0.0});
  CHECK_THROWS_AS(featurize(f.inst, f.lp, {make_cut({{0, 0.0}}, 1.0)}), ZeroNormCut);
}

TEST_CASE("positive scaling leaves scale-free features unchanged") {
  Fixture f = make_fixture(3, {1.0, 2.0, -1.0}, {0.5, 1.5, 0.25}, {0, 2});
  const Cut base = make_cut({{0, 1.0}, {1, -2.0}, {2, 0.5}}, 0.75);
  Cut scaled = base;
  const double lambda = 3.5;
  for (auto& [j, v] : scaled.alpha) {
    (void)j;
    v *= lambda;
  }
  scaled.beta *= lambda;
  const CutSelState a = featurize(f.inst, f.lp, {base});
  const CutSelState b = featurize(f.inst, f.lp, {scaled});
  CHECK(b.features[0].parallelism == doctest::Approx(a.features[0].parallelism));
  CHECK(b.features[0].efficacy == doctest::Approx(a.features[0].efficacy));
  CHECK(b.features[0].support == doctest::Approx(a.features[0].support));
  CHECK(b.features[0].integral_support == doctest::Approx(a.features[0].integral_support));
  CHECK(b.features[0].normalized_violation == doctest::Approx(a.features[0].normalized_violation));
  CHECK(b.features[0].coef_mean == doctest::Approx(lambda * a.features[0].coef_mean));
  CHECK(b.features[0].coef_std == doctest::Approx(lambda * a.features[0].coef_std));
}

TEST_CASE("permuting the pool permutes feature rows identically") {
  Fixture f = make_fixture(3, {1.0, 2.0, 3.0}, {0.5, 0.5, 0.5});
  const std::vector<Cut> cuts = {make_cut({{0, 1.0}}, 1.0, 0), make_cut({{1, 2.0}}, 1.0, 1),
                                 make_cut({{2, 3.0}}, 2.0, 2)};
  const std::vector<Cut> permuted = {cuts[2], cuts[0], cuts[1]};
  const CutSelState a = featurize(f.inst, f.lp, cuts);
  const CutSelState b = featurize(f.inst, f.lp, permuted);
  CHECK(b.features[0].to_array() == a.features[2].to_array());
  CHECK(b.features[1].to_array() == a.features[0].to_array());
  CHECK(b.features[2].to_array() == a.features[1].to_array());
}

TEST_CASE("all thirteen entries finite for generated cuts") {
  Rng rng(77);
  for (int t = 0; t < 10; ++t) {
    const MilpInstance inst = oracle::random_integer_milp(rng, 6, 4);
    const LpSolution lp = solve_lp(inst);
    if (lp.status != LpStatus::Optimal) continue;
    const std::vector<Cut> cuts = generate_cuts(inst, lp);
    const CutSelState state = featurize(inst, lp, cuts);
    for (const CutFeatures& ft : state.features)
      for (double v : ft.to_array()) CHECK(std::isfinite(v));
  }
}

TEST_CASE("csv export has the fixed header and one row per cut") {
  Fixture f = make_fixture(2, {1.0, 1.0}, {0.5, 0.5});
  const CutSelState state =
      featurize(f.inst, f.lp, {make_cut({{0, 1.0}}, 1.0), make_cut({{1, 1.0}}, 1.0)});
  const std::string csv = features_to_csv(state);
  CHECK(csv.find(kFeatureCsvHeader) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
