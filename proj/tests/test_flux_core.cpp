#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "hydrolab/flux.hpp"
#include "hydrolab/rates.hpp"
#include "test_util.hpp"

using namespace hydrolab;
using hydrolab::testing::throws_with;

namespace {

struct Brute {
  long double z = 0, m1 = 0, m2 = 0;
};

// Direct summation of beta^n / g(n)! until the terms are negligible.
Brute brute_series(const JumpRateSpec& g, double beta) {
  Brute b;
  long double w = 1.0L;
  for (int n = 0; n < 200000; ++n) {
    if (n > 0) w *= static_cast<long double>(beta) / g(n);
    b.z += w;
    b.m1 += n * w;
    b.m2 += static_cast<long double>(n) * n * w;
    if (n > 50 && w < 1e-30L * b.z) break;
  }
  return b;
}

double brute_mean(const JumpRateSpec& g, double beta) {
  const Brute b = brute_series(g, beta);
  return static_cast<double>(b.m1 / b.z);
}

double brute_variance(const JumpRateSpec& g, double beta) {
  const Brute b = brute_series(g, beta);
  const long double r = b.m1 / b.z;
  return static_cast<double>(b.m2 / b.z - r * r);
}

const JumpRateSpec kHalfFirst({0.5});

}  // namespace

TEST(PartitionFunction, ClosedForms) {
  EXPECT_NEAR(partition_function(JumpRateSpec::mm1(), 0.5), 2.0, 1e-12);
  EXPECT_EQ(partition_function(JumpRateSpec::mm1(), 0.0), 1.0);
  EXPECT_NEAR(partition_function(kHalfFirst, 0.5), 3.0, 1e-12);
}

TEST(PartitionFunction, RejectsFugacityAtOne) {
  EXPECT_TRUE(throws_with([] { partition_function(JumpRateSpec::mm1(), 1.0); }, "fugacity too close to 1"));
  EXPECT_TRUE(throws_with([] { partition_function(JumpRateSpec::mm1(), 1.0 - 1e-10); }, "fugacity"));
  EXPECT_TRUE(throws_with([] { partition_function(JumpRateSpec::mm1(), -0.1); }, "negative fugacity"));
}

TEST(MeanDensity, ClosedForms) {
  EXPECT_NEAR(mean_density(JumpRateSpec::mm1(), 0.5), 1.0, 1e-12);
  EXPECT_EQ(mean_density(JumpRateSpec::mm1(), 0.0), 0.0);
  EXPECT_NEAR(mean_density(kHalfFirst, 0.5), 4.0 / 3.0, 1e-12);
}

TEST(MeanDensity, MatchesBruteSeries) {
  const std::vector<JumpRateSpec> rates{JumpRateSpec::mm1(), kHalfFirst, JumpRateSpec::k_server(3),
                                        JumpRateSpec({0.2, 0.7, 0.9})};
  for (const auto& g : rates)
    for (double beta : {0.01, 0.1, 0.3, 0.5, 0.8, 0.95, 0.999}) {
      EXPECT_NEAR(mean_density(g, beta), brute_mean(g, beta), 1e-10 * (1.0 + brute_mean(g, beta)));
      EXPECT_NEAR(occupancy_variance(g, beta), brute_variance(g, beta),
                  1e-9 * (1.0 + brute_variance(g, beta)));
    }
}

TEST(OccupancyVariance, Values) {
  EXPECT_NEAR(occupancy_variance(JumpRateSpec::mm1(), 0.5), 2.0, 1e-12);
  EXPECT_EQ(occupancy_variance(JumpRateSpec::mm1(), 0.0), 0.0);
  // Frozen from direct summation.
  EXPECT_NEAR(occupancy_variance(kHalfFirst, 0.3), brute_variance(kHalfFirst, 0.3), 1e-12);
  EXPECT_NEAR(occupancy_variance(kHalfFirst, 0.3), 0.789759690858592, 1e-12);
}

TEST(MeanDensity, MonotoneWithConsistentDerivative) {
  for (const auto& g : {JumpRateSpec::mm1(), kHalfFirst, JumpRateSpec::k_server(4)}) {
    double prev = -1.0;
    for (double beta = 0.02; beta < 0.97; beta += 0.02) {
      const double r = mean_density(g, beta);
      EXPECT_GT(r, prev);
      prev = r;
      EXPECT_GE(occupancy_variance(g, beta), 0.0);
      const double h = 1e-5;
      const double numeric = (mean_density(g, beta + h) - mean_density(g, beta - h)) / (2 * h);
      EXPECT_NEAR(numeric, mean_density_derivative(g, beta), 1e-6 * (1.0 + numeric));
      EXPECT_NEAR(mean_density_derivative(g, beta), occupancy_variance(g, beta) / beta, 1e-9 * (1.0 + numeric));
    }
  }
}

TEST(MeanDensity, InverseRoundTrip) {
  for (double rho : {0.0, 0.01, 0.5, 1.0, 7.0, 150.0}) {
    const double beta = inverse_mean_density(kHalfFirst, rho);
    EXPECT_NEAR(mean_density(kHalfFirst, beta), rho, 1e-9 * (1.0 + rho));
  }
}

TEST(AveragedDensity, Examples) {
  const auto g = JumpRateSpec::mm1();
  EXPECT_NEAR(averaged_density(g, DisorderLaw::dirac(1.0), 0.5), 1.0, 1e-12);
  const DisorderLaw mix({{0.5, 0.5}, {1.0, 0.5}}, {});
  EXPECT_NEAR(averaged_density(g, mix, 0.25), 2.0 / 3.0, 1e-12);
  EXPECT_EQ(averaged_density(g, mix, 0.0), 0.0);
  EXPECT_EQ(averaged_density(g, DisorderLaw::uniform(0.5, 1.0), 0.0), 0.0);
}

TEST(AveragedDensity, UniformLawClosedForm) {
  // R-bar(beta) = beta / (b - a) * log((b - beta) / (a - beta)) for g = min(n, 1).
  const double a = 0.4, b = 0.9;
  const auto law = DisorderLaw::uniform(a, b);
  for (double beta : {0.05, 0.2, 0.35, 0.399, 0.39999}) {
    const double exact = beta / (b - a) * std::log((b - beta) / (a - beta));
    EXPECT_NEAR(averaged_density(JumpRateSpec::mm1(), law, beta), exact, 1e-10 * exact);
  }
}

TEST(AveragedDensity, PowerLawCriticalValues) {
  // Density (k+1)(t-c)^k/(1-c)^(k+1) on [c, 1]: rho_c = c(k+1)/(k(1-c)),
  // R-bar'(c) = (k+1)[1/(k(1-c)) + c/((k-1)(1-c)^2)] for k > 1.
  const double c = 0.5;
  for (double k : {0.5, 1.0, 2.0, 3.5}) {
    const auto law = DisorderLaw::power_law(c, 1.0, k);
    EXPECT_NEAR(critical_density(JumpRateSpec::mm1(), law), c * (k + 1) / (k * (1 - c)), 1e-8);
  }
  const auto law = DisorderLaw::power_law(c, 1.0, 2.0);
  EXPECT_NEAR(averaged_density_derivative(JumpRateSpec::mm1(), law, c), 9.0, 1e-7);
  EXPECT_TRUE(std::isinf(averaged_density_derivative(JumpRateSpec::mm1(), DisorderLaw::power_law(c, 1.0, 0.5), c)));
}

TEST(AveragedDensity, DiracLawMatchesMeanDensity) {
  for (const auto& g : {JumpRateSpec::mm1(), kHalfFirst})
    for (double beta = 0.0; beta < 0.99; beta += 0.033)
      EXPECT_NEAR(averaged_density(g, DisorderLaw::dirac(1.0), beta), mean_density(g, beta), 1e-10);
}

TEST(AveragedDensity, RejectsFugacityAboveFloor) {
  EXPECT_TRUE(throws_with(
      [] { averaged_density(JumpRateSpec::mm1(), DisorderLaw::dirac(1.0, 0.5), 0.6); },
      "fugacity above environment floor"));
}

TEST(CriticalDensity, Examples) {
  const auto g = JumpRateSpec::mm1();
  EXPECT_NEAR(critical_density(g, DisorderLaw::dirac(1.0, 0.5)), 1.0, 1e-12);
  EXPECT_EQ(critical_density(g, DisorderLaw::dirac(1.0, 0.0)), 0.0);
  EXPECT_TRUE(std::isinf(critical_density(g, DisorderLaw::uniform(0.5, 1.0))));
}

TEST(CriticalDensity, NondecreasingInFloor) {
  const auto law = DisorderLaw::power_law(0.6, 1.0, 1.5);
  double prev = 0.0;
  for (double c = 0.0; c <= 0.6; c += 0.05) {
    const double rc = critical_density(JumpRateSpec::mm1(), law.with_floor(c));
    EXPECT_GE(rc, prev);
    prev = rc;
  }
}

TEST(FluxValue, DiluteExamples) {
  const auto table = hydrolab::testing::dilute_table();
  EXPECT_NEAR(flux_value(*table, 0.5), 1.0 / 3.0, 1e-10);
  EXPECT_NEAR(flux_value(*table, 2.0), 0.5, 1e-15);
  EXPECT_EQ(flux_value(*table, 0.0), 0.0);
  for (double rho = 0.0; rho < 1.0; rho += 0.0625)
    EXPECT_NEAR(flux_value(*table, rho), rho / (1 + rho), 1e-10);
}

TEST(FluxValue, InfiniteCriticalDensityStopsAtTableEdge) {
  const FluxModel model{JumpRateSpec::mm1(), DisorderLaw::uniform(0.5, 1.0), 1.0};
  const auto table = FluxTable::from_model(model, {.grid_points = 256, .max_density = 4.0});
  EXPECT_FALSE(table.critical_density_finite());
  EXPECT_GT(flux_value(table, 3.0), 0.0);
  EXPECT_TRUE(throws_with([&] { flux_value(table, 5.0); }, "outside flux table"));
}

TEST(FluxValue, LipschitzAndPlateau) {
  const FluxModel model{JumpRateSpec({0.3, 0.8}), DisorderLaw::power_law(0.4, 1.0, 2.0), 0.8};
  const auto table = FluxTable::from_model(model, {.grid_points = 1024, .max_density = {}});
  const double drift = model.drift();
  const auto rho = table.densities();
  const auto f = table.values();
  for (std::size_t i = 1; i < rho.size(); ++i)
    EXPECT_LE(std::abs(f[i] - f[i - 1]), drift * (rho[i] - rho[i - 1]) + 1e-12);
  const double plateau = drift * 0.4;
  EXPECT_EQ(table.plateau(), plateau);
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (rho[i] >= table.critical_density()) EXPECT_EQ(f[i], plateau);
}

TEST(FluxValue, ConcaveForConcaveIncrements) {
  for (const auto& g : {JumpRateSpec::mm1(), JumpRateSpec::k_server(3), JumpRateSpec({0.5, 0.8, 0.95})}) {
    ASSERT_TRUE(g.has_concave_increments());
    const FluxModel model{g, DisorderLaw::power_law(0.5, 1.0, 2.5), 1.0};
    EXPECT_TRUE(FluxTable::from_model(model).tabulated_concave(1e-9));
  }
}

TEST(FluxValue, FugacityRoundTrip) {
  const FluxModel model{JumpRateSpec::k_server(2), DisorderLaw::power_law(0.5, 1.0, 2.0), 1.0};
  const auto table = FluxTable::from_model(model);
  const double rc = table.critical_density();
  for (double rho = 0.0; rho < rc; rho += rc / 37.0) {
    const double beta = table.fugacity(rho);
    EXPECT_NEAR(averaged_density(model.rate, model.disorder, beta), rho, 1e-8);
  }
}

TEST(CriticalSpeed, Examples) {
  EXPECT_NEAR(critical_speed(*hydrolab::testing::dilute_table()), 0.25, 1e-8);
  const std::vector<double> r{0.0, 0.5, 1.0, 1.5, 2.0};
  EXPECT_NEAR(critical_speed(FluxTable::from_samples(r, r)), 1.0, 1e-15);
}

TEST(CriticalSpeed, PowerLawFloorOrder) {
  const auto g = JumpRateSpec::mm1();
  // kappa = 2: v_c = 1 / R-bar'(c) = 1/9.
  const auto steep = FluxTable::from_model({g, DisorderLaw::power_law(0.5, 1.0, 2.0), 1.0});
  EXPECT_NEAR(critical_speed(steep), 1.0 / 9.0, 1e-6);
  // kappa = 1/2: finite rho_c with vanishing left derivative.
  const auto flat = FluxTable::from_model({g, DisorderLaw::power_law(0.5, 1.0, 0.5), 1.0});
  EXPECT_NEAR(flat.critical_density(), 3.0, 1e-8);
  EXPECT_LT(critical_speed(flat), 5e-3);
  // kappa = 0: rho_c is infinite and there is no front.
  const auto uniform = FluxTable::from_model({g, DisorderLaw::uniform(0.5, 1.0), 1.0},
                                             {.grid_points = 256, .max_density = 8.0});
  EXPECT_TRUE(throws_with([&] { critical_speed(uniform); }, "no critical front"));
}

TEST(CriticalSpeed, ChordInfimumOracle) {
  const auto table = FluxTable::from_model({JumpRateSpec({0.4, 0.9}), DisorderLaw::power_law(0.5, 1.0, 1.5), 1.0});
  const double rc = table.critical_density();
  for (double rho : {0.0, 0.3, 0.8}) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 800; ++i) {
      const double r = rho + (rc - rho) * i / 800.0;
      best = std::min(best, (table.plateau() - flux_value(table, r)) / (rc - r));
    }
    EXPECT_LE(critical_speed(table, rho), best + 1e-9);
    EXPECT_GE(critical_speed(table, rho), best - 1e-2);
  }
}
