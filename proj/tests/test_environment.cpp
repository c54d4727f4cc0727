#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "hydrolab/environment.hpp"
#include "test_util.hpp"

using namespace hydrolab;
using hydrolab::testing::throws_with;

namespace {

DeterministicEnvSpec example_power(DisorderLaw law, double kappa = 2.0) {
  DeterministicEnvSpec s;
  s.defects = SequenceSpec::power(kappa);
  s.uniform = SequenceSpec::power(kappa);
  s.law = std::move(law);
  return s;
}

// Geometric defects, power-law uniform sequence.
DeterministicEnvSpec example_sparse_defects() {
  DeterministicEnvSpec s;
  s.defects = SequenceSpec::geometric(2.0);
  s.uniform = SequenceSpec::power(2.0);
  s.law = DisorderLaw::uniform(0.6, 1.0, 0.5);
  return s;
}

// Geometric uniform sequence, power-law defects.
DeterministicEnvSpec example_sparse_uniform() {
  DeterministicEnvSpec s;
  s.defects = SequenceSpec::power(2.0);
  s.uniform = SequenceSpec::geometric(2.0);
  s.law = DisorderLaw::uniform(0.6, 1.0, 0.5);
  return s;
}

SequenceSpec explicit_sequence(std::int64_t first, std::vector<std::int64_t> values) {
  SequenceSpec s;
  s.kind = SequenceSpec::Kind::explicit_list;
  s.first_index = first;
  s.values = std::move(values);
  return s;
}

}  // namespace

TEST(SampleIid, DiracGivesOnes) {
  const auto env = sample_iid(DisorderLaw::dirac(1.0), 3, {-50, 50});
  for (double a : env.values()) EXPECT_EQ(a, 1.0);
  EXPECT_EQ(env.floor(), 1.0);
}

TEST(SampleIid, MixtureFrequency) {
  const DisorderLaw mix({{0.5, 0.5}, {1.0, 0.5}}, {});
  const auto env = sample_iid(mix, 11, {0, 99999});
  const auto slow = std::count(env.values().begin(), env.values().end(), 0.5);
  const double freq = static_cast<double>(slow) / 1e5;
  EXPECT_GE(freq, 0.49);
  EXPECT_LE(freq, 0.51);
  EXPECT_EQ(env.floor(), 0.5);
}

TEST(SampleIid, Deterministic) {
  const auto law = DisorderLaw::uniform(0.3, 1.0);
  const auto a = sample_iid(law, 42, {-1000, 1000});
  const auto b = sample_iid(law, 42, {-1000, 1000});
  EXPECT_EQ(a.values(), b.values());
  EXPECT_NE(a.values(), sample_iid(law, 43, {-1000, 1000}).values());
  // Site values do not depend on the window.
  const auto c = sample_iid(law, 42, {0, 10});
  for (std::int64_t x = 0; x <= 10; ++x) EXPECT_EQ(c(x), a(x));
}

TEST(SampleIid, RejectsInvalidLaw) {
  EXPECT_TRUE(throws_with([] { DisorderLaw({}, {}); }, "invalid Q0"));
  EXPECT_TRUE(throws_with([] { sample_iid(DisorderLaw::dirac(1.0), 1, {5, 4}); }, "empty window"));
}

TEST(SampleIid, KolmogorovSmirnovBound) {
  const DisorderLaw mix({{0.4, 0.2}, {0.7, 0.3}, {1.0, 0.5}}, {});
  const auto env = sample_iid(mix, 5, {-100000, 100000});
  const auto emp = empirical_law(env, 100000);
  const double bound = 2.0 / std::sqrt(1e5) * (1.0 + 3.0);
  EXPECT_LT(emp.ks_right, bound);
  EXPECT_LT(emp.ks_left, bound);
}

TEST(SampleIid, FloorOverride) {
  const auto env = sample_iid(DisorderLaw::dirac(1.0), 1, {0, 9}, 0.5);
  EXPECT_EQ(env.floor(), 0.5);
  EXPECT_TRUE(throws_with([] { sample_iid(DisorderLaw::uniform(0.5, 1.0), 1, {0, 9}, 0.7); }, "floor"));
}

TEST(BuildDeterministic, PowerExampleDefects) {
  auto spec = example_power(DisorderLaw::dirac(1.0, 0.5));
  spec.defect_values.kind = DefectValues::Kind::constant;
  spec.defect_values.value = 0.5;
  const auto env = build_deterministic(spec, {-100, 100});
  EXPECT_EQ(env(4), 0.5);
  EXPECT_EQ(env(3), 1.0);
  EXPECT_EQ(env(-9), 0.5);
  EXPECT_EQ(env(0), 0.5);
}

TEST(BuildDeterministic, NoDefectsWhenFloorEqualsSupport) {
  const auto env = build_deterministic(example_power(DisorderLaw::dirac(1.0)), {-300, 300});
  for (double a : env.values()) EXPECT_EQ(a, 1.0);
}

TEST(BuildDeterministic, UniformFieldMidpoint) {
  std::vector<std::int64_t> even;
  for (int n = -10; n <= 10; ++n) even.push_back(2 * n);
  const auto u = uniform_field(explicit_sequence(-10, even), {-5, 5});
  EXPECT_EQ(u[static_cast<std::size_t>(3 + 5)], 0.5);
  EXPECT_EQ(u[static_cast<std::size_t>(4 + 5)], 0.0);
}

TEST(BuildDeterministic, RejectsNonMonotoneSequence) {
  DeterministicEnvSpec spec = example_power(DisorderLaw::dirac(1.0));
  spec.uniform = explicit_sequence(-2, {-10, -3, 5, 4, 20});
  EXPECT_TRUE(throws_with([&] { build_deterministic(spec, {-5, 5}); }, "invalid spec"));
  spec.uniform = SequenceSpec::power(0.5);
  EXPECT_TRUE(throws_with([&] { build_deterministic(spec, {-5, 5}); }, "invalid spec"));
}

TEST(BuildDeterministic, ValuesRespectFloorAndDefects) {
  const auto spec = example_power(DisorderLaw::uniform(0.6, 1.0, 0.5));
  const auto env = build_deterministic(spec, {-5000, 5000});
  for (double a : env.values()) {
    EXPECT_GE(a, 0.5);
    EXPECT_LE(a, 1.0);
  }
  std::vector<bool> is_defect(env.size(), false);
  for (std::int64_t n = -70; n <= 70; ++n) {
    const std::int64_t x = spec.defects.term(n);
    if (!env.contains(x)) continue;
    is_defect[static_cast<std::size_t>(x - env.x_min())] = true;
    EXPECT_EQ(env(x), spec.defect_values.at(n, 0.5));
  }
  for (std::int64_t x = env.x_min(); x <= env.x_max(); ++x)
    if (!is_defect[static_cast<std::size_t>(x - env.x_min())]) EXPECT_GE(env(x), 0.6);
}

TEST(EmpiricalLaw, ExactMatch) {
  const Environment ones({-20, 20}, std::vector<double>(41, 1.0), DisorderLaw::dirac(1.0));
  const auto emp = empirical_law(ones, 20);
  EXPECT_EQ(emp.ks_left, 0.0);
  EXPECT_EQ(emp.ks_right, 0.0);
}

TEST(EmpiricalLaw, PowerExampleConverges) {
  const auto env = build_deterministic(example_power(DisorderLaw::uniform(0.6, 1.0)), {-100000, 100000});
  const auto emp = empirical_law(env, 100000);
  EXPECT_LT(emp.ks_right, 0.05);
  EXPECT_LT(emp.ks_left, 0.05);
}

TEST(EmpiricalLaw, GeometricUniformSequenceBiasesMean) {
  // Mean of u over [0, z_n], z_n = (y_n + y_{n+1}) / 2, tends to (a + 3) / (4 (a + 1)) for ratio a.
  const double a = 2.0;
  const auto y = SequenceSpec::geometric(a);
  const std::int64_t z = (y.term(20) + y.term(21)) / 2;
  const auto u = uniform_field(y, {0, z});
  double mean = 0.0;
  for (double v : u) mean += v;
  mean /= static_cast<double>(u.size());
  EXPECT_NEAR(mean, (a + 3.0) / (4.0 * (a + 1.0)), 2e-3);
  EXPECT_LT(mean, 0.45);
}

TEST(DefectRadii, Examples) {
  const Environment flat({-10, 10}, std::vector<double>(21, 0.5), DisorderLaw::dirac(0.5));
  const auto r0 = defect_radii(flat, 3, 0.2);
  EXPECT_EQ(r0.left, 0.0);
  EXPECT_EQ(r0.right, 0.0);

  const auto env = build_deterministic(example_power(DisorderLaw::dirac(1.0, 0.5)), {-200, 200});
  EXPECT_EQ(defect_radii(env, 5, 0.1).right, 4.0);

  const Environment ones({-10, 10}, std::vector<double>(21, 1.0), DisorderLaw::dirac(1.0, 0.5));
  const auto none = defect_radii(ones, 0, 0.1);
  EXPECT_TRUE(std::isinf(none.left) && none.left < 0);
  EXPECT_TRUE(std::isinf(none.right) && none.right > 0);
}

TEST(DefectRadii, MonotoneInEps) {
  const auto env = build_deterministic(example_power(DisorderLaw::uniform(0.6, 1.0, 0.5)), {-20000, 20000});
  for (std::int64_t x0 : {-777, 0, 5, 1234}) {
    double prev_left = -INFINITY, prev_right = INFINITY;
    for (double eps = 0.01; eps < 0.2; eps += 0.004) {
      const auto r = defect_radii(env, x0, eps);
      EXPECT_LE(r.right, prev_right);
      EXPECT_GE(r.left, prev_left);
      EXPECT_TRUE(std::isfinite(r.left) && std::isfinite(r.right));
      prev_left = r.left;
      prev_right = r.right;
    }
  }
}

TEST(CheckAssumptions, PaperExamplesClassified) {
  const auto good = check_assumptions(example_power(DisorderLaw::uniform(0.6, 1.0, 0.5)));
  EXPECT_TRUE(good.empirical_law_condition);
  EXPECT_TRUE(good.dense_defects);
  EXPECT_TRUE(good.all_pass());

  const auto sparse_defects = check_assumptions(example_sparse_defects());
  EXPECT_FALSE(sparse_defects.dense_defects);
  EXPECT_TRUE(sparse_defects.empirical_law_condition);

  const auto sparse_uniform = check_assumptions(example_sparse_uniform());
  EXPECT_FALSE(sparse_uniform.empirical_law_condition);
  EXPECT_TRUE(sparse_uniform.dense_defects);
}

TEST(CheckAssumptions, RealisedWindow) {
  const auto good = build_deterministic(example_power(DisorderLaw::uniform(0.6, 1.0, 0.5)), {-200000, 200000});
  EXPECT_TRUE(check_assumptions(good, 0.05).all_pass());
  const auto sparse = build_deterministic(example_sparse_defects(), {-200000, 200000});
  EXPECT_FALSE(check_assumptions(sparse, 0.05).dense_defects);
}

TEST(EnvironmentJson, RoundTrip) {
  const auto env = build_deterministic(example_power(DisorderLaw::uniform(0.6, 1.0, 0.5)), {-300, 300});
  const auto back = Environment::from_json(env.to_json());
  EXPECT_EQ(back.values(), env.values());
  EXPECT_EQ(back.window(), env.window());
  EXPECT_EQ(back.floor(), env.floor());
  EXPECT_EQ(back.defects(), env.defects());

  const auto spec = example_sparse_uniform();
  const auto spec_back = deterministic_spec_from_json(to_json(spec));
  EXPECT_EQ(build_deterministic(spec_back, {-100, 100}).values(), build_deterministic(spec, {-100, 100}).values());
}
