#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fplab/langevin.hpp"
#include "fplab/tolerances.hpp"
#include "oracles.hpp"

using namespace fplab;

namespace {

SamplerSpec spec_with(std::size_t n, std::uint64_t seed, double t0, double t_end, std::size_t steps) {
  SamplerSpec s;
  s.n = n;
  s.seed = seed;
  s.t0 = t0;
  s.t_end = t_end;
  s.dt = (t_end - t0) / static_cast<double>(steps);
  s.threads = 1;
  return s;
}

const DriftPotential& linear_u1() {
  static const auto u = DriftPotential::power_law(1.0, 1.0, -0.5);
  return u;
}

const DriftPotential& quadratic_u1() {
  static const auto u = DriftPotential::power_law(0.5, 2.0, -1.0);
  return u;
}

}  // namespace

TEST(Rng, UniformIsOpenUnitInterval) {
  const rng::PathStream s(1, 2);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  for (std::uint64_t c = 0; c < 100000; ++c) {
    const double u = s.uniform(c);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(sum / 1e5, 0.5, 3 * std::sqrt(1.0 / 12 / 1e5));
  EXPECT_NE(rng::PathStream(1, 2).bits(0), rng::PathStream(1, 3).bits(0));
  EXPECT_NE(rng::PathStream(1, 2).bits(0), rng::PathStream(2, 2).bits(0));
  EXPECT_EQ(rng::PathStream(1, 2).bits(17), s.bits(17));
}

TEST(Rng, NormalQuantileMatchesReference) {
  // mpmath: sqrt(2) erfinv(2p - 1)
  EXPECT_EQ(rng::normal_quantile(0.5), 0.0);
  EXPECT_NEAR(rng::normal_quantile(0.975), 1.9599639845400542, 1e-15);
  EXPECT_NEAR(rng::normal_quantile(0.025), -1.9599639845400542, 1e-15);
  EXPECT_NEAR(rng::normal_quantile(0.3), -0.52440051270804078, 1e-15);
  EXPECT_NEAR(rng::normal_quantile(0.9), 1.2815515655446005, 1e-15);
  EXPECT_NEAR(rng::normal_quantile(1e-10), -6.3613409024040562, 1e-14);
  EXPECT_NEAR(rng::normal_quantile(0.999999), 4.7534243088228989, 1e-9);
  for (double p : {1e-5, 0.01, 0.2, 0.45, 0.49})
    EXPECT_NEAR(oracle::normal_cdf(rng::normal_quantile(p), 0.0, 1.0), p, 1e-15 + 1e-13 * p);
  // Dyadic p so that 1 - p is exact.
  for (double p : {0x1p-20, 0.0625, 0.25, 0.4375})
    EXPECT_EQ(rng::normal_quantile(p), -rng::normal_quantile(1.0 - p));
}

TEST(TimeSchedule, UniformAndGeometric) {
  SamplerSpec s;
  const auto uni = time_schedule(s);
  ASSERT_EQ(uni.size(), SamplerSpec::default_steps + 1);
  EXPECT_DOUBLE_EQ(uni.front(), 0.25);
  EXPECT_DOUBLE_EQ(uni.back(), 1.0);
  EXPECT_NEAR(uni[1] - uni[0], 0.75 / 2000, 1e-15);
  s.schedule = Schedule::geometric;
  s.t0 = 0.01;
  s.dt = 0.99 / 100;
  const auto geo = time_schedule(s);
  ASSERT_EQ(geo.size(), 101u);
  EXPECT_DOUBLE_EQ(geo.back(), 1.0);
  EXPECT_NEAR(geo[1] / geo[0], geo[100] / geo[99], 1e-12);
  s.dt = -1.0;
  EXPECT_THROW(time_schedule(s), ArgumentError);
  s.dt = 0.0;
  s.t_end = s.t0;
  EXPECT_THROW(time_schedule(s), ArgumentError);
}

TEST(SimulateEm, EmptyEnsemble) {
  auto s = spec_with(0, 1, 0.25, 1.0, 10);
  const auto ens = simulate_em(linear_u1(), PhysParams(1.0, 0.1), s, InitialLaw::point(0.0));
  EXPECT_EQ(ens.n, 0u);
  EXPECT_TRUE(ens.positions.empty());
  EXPECT_DOUBLE_EQ(ens.t, 1.0);
}

TEST(SimulateEm, DeterministicAcrossThreadCounts) {
  const PhysParams params(1.0, 0.2);
  const auto sol = solution_p2(params);
  const auto law = InitialLaw::from_solution(sol, 0.25);
  auto s = spec_with(1003, 77, 0.25, 1.0, 50);
  const auto one = simulate_em(quadratic_u1(), params, s, law);
  for (unsigned th : {2u, 3u, 8u}) {
    s.threads = th;
    EXPECT_EQ(simulate_em(quadratic_u1(), params, s, law).positions, one.positions) << th << " threads";
  }
  s.seed = 78;
  EXPECT_NE(simulate_em(quadratic_u1(), params, s, law).positions, one.positions);
}

TEST(SimulateEm, GenericDriftMatchesPowerLawFastPath) {
  const PhysParams params(1.0, 0.1);
  const auto generic = DriftPotential::from_profile(SimilarityProfile::power_law(0.5, 2.0));
  ASSERT_FALSE(generic.power_form().has_value());
  const auto s = spec_with(200, 3, 0.25, 1.0, 100);
  const auto a = simulate_em(quadratic_u1(), params, s, InitialLaw::point(0.5));
  const auto b = simulate_em(generic, params, s, InitialLaw::point(0.5));
  for (std::size_t i = 0; i < a.positions.size(); ++i) EXPECT_NEAR(a.positions[i], b.positions[i], 1e-12);
}

TEST(SimulateEm, SweepEqualsSeparateRuns) {
  const PhysParams params(1.0, 0.1);
  const std::vector<double> lambdas{0.0, 0.1, 0.2};
  std::vector<InitialLaw> laws;
  for (double l : lambdas) laws.push_back(InitialLaw::from_solution(solution_p2(params.with_lambda(l)), 0.25));
  const auto s = spec_with(300, 11, 0.25, 1.0, 80);
  const auto sweep = simulate_em_sweep(quadratic_u1(), params, lambdas, s, laws);
  ASSERT_EQ(sweep.size(), 3u);
  for (std::size_t l = 0; l < 3; ++l)
    EXPECT_EQ(sweep[l].positions, simulate_em(quadratic_u1(), params.with_lambda(lambdas[l]), s, laws[l]).positions);
  EXPECT_THROW(simulate_em_sweep(quadratic_u1(), params, lambdas, s, {laws[0]}), ArgumentError);
  EXPECT_THROW(simulate_em_sweep(quadratic_u1(), params, {0.7}, s, {laws[0]}), InvariantError);
}

TEST(SimulateEm, Errors) {
  const PhysParams params(1.0, 0.4);
  auto s = spec_with(10, 1, 0.25, 1.0, 10);
  s.dt = -0.1;
  EXPECT_THROW(simulate_em(linear_u1(), params, s, InitialLaw::point(0.0)), ArgumentError);
  s = spec_with(10, 1, 1.0, 0.5, 10);
  EXPECT_THROW(simulate_em(linear_u1(), params, s, InitialLaw::point(0.0)), ArgumentError);
  s = spec_with(10, 1, 0.0, 1.0, 10);
  EXPECT_THROW(simulate_em(linear_u1(), params, s, InitialLaw::point(0.0)), ArgumentError);
  // An inverted quartic pushes paths outward faster than any step can follow.
  const auto repulsive = DriftPotential::power_law(-1.0, 4.0, -2.0);
  s = spec_with(10, 1, 0.25, 20.25, 40);
  EXPECT_THROW(simulate_em(repulsive, params, s, InitialLaw::point(3.0)), DivergenceError);
}

TEST(SimulateEm, PureDiffusionVariance) {
  // Point mass at the origin just after t = 0; Brownian increments are exact
  // for any step, so a coarse schedule suffices.
  const PhysParams params(1.0, 0.0);
  const auto s = spec_with(100000, 42, 1e-9, 1.0, 20);
  const auto ens = simulate_em(DriftPotential::zero(), params, s, InitialLaw::point(0.0));
  const double mean = std::accumulate(ens.positions.begin(), ens.positions.end(), 0.0) / 1e5;
  double ss = 0.0;
  for (double x : ens.positions) ss += (x - mean) * (x - mean);
  EXPECT_NEAR(ss / (1e5 - 1), 2.0, 0.03 * 2.0);
}

TEST(SimulateEm, LinearPotentialMean) {
  const PhysParams params(1.0, 0.1);
  const auto sol = solution_p1(params);
  const auto s = spec_with(100000, 42, 0.25, 1.0, 200);
  const auto ens = simulate_em(linear_u1(), params, s, InitialLaw::from_solution(sol, 0.25));
  const auto m = compare_distribution(ens, sol, 1.0);
  EXPECT_DOUBLE_EQ(m.analytic_mean, -0.2);
  EXPECT_LE(std::abs(m.sample_mean + 0.2), 3.0 * std::sqrt(2.0 / 1e5));
  EXPECT_LT(m.sample_mean, 0.0);
  EXPECT_LE(m.ks, tol::ks_critical_99 / std::sqrt(1e5));
}

TEST(SimulateEm, QuadraticVarianceFromEarlyStart) {
  const PhysParams params(1.0, 0.1);
  const auto sol = solution_p2(params);
  auto s = spec_with(100000, 42, 0.01, 1.0, 2000);
  s.schedule = Schedule::geometric;
  const auto ens = simulate_em(quadratic_u1(), params, s, InitialLaw::from_solution(sol, 0.01));
  const auto m = compare_distribution(ens, sol, 1.0);
  EXPECT_NEAR(m.analytic_variance, 2.0 / 1.2, 1e-15);
  const double se = m.analytic_variance * std::sqrt(2.0 / (1e5 - 1));
  EXPECT_LE(m.variance_gap, tol::mc_variance_sigmas * se);
}

TEST(CompareDistribution, ExactDrawsPassKs) {
  const auto sol = solution_p2(PhysParams(1.0, 0.1));
  const auto ens = draw_exact(sol, 1.0, 100000, 5);
  const auto m = compare_distribution(ens, sol, 1.0);
  EXPECT_LE(m.ks, tol::ks_critical_99 / std::sqrt(1e5));
  EXPECT_LE(m.l1, tol::mc_histogram_l1);
  double hist_mass = 0.0, expected_mass = 0.0;
  for (std::size_t b = 0; b < m.histogram.size(); ++b) {
    hist_mass += m.histogram[b] * m.bin_width;
    expected_mass += m.expected[b] * m.bin_width;
  }
  EXPECT_NEAR(hist_mass, 1.0, 1e-12);
  EXPECT_GT(expected_mass, 0.9999);
  EXPECT_NEAR(m.bin_width, 3.49 * std::sqrt(m.sample_variance) * std::cbrt(1e-5), 1e-15);
}

TEST(CompareDistribution, KsCalibration) {
  // sqrt(n) KS follows the Kolmogorov law, mean sqrt(pi/2) ln 2 = 0.8687.
  const auto sol = solution_p1(PhysParams(1.0, 0.1));
  double sum = 0.0;
  int above = 0;
  const int seeds = 50;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto m = compare_distribution(draw_exact(sol, 1.0, 10000, 1000 + seed), sol, 1.0);
    sum += m.ks * 100.0;
    above += m.ks * 100.0 > tol::ks_critical_99;
  }
  EXPECT_NEAR(sum / seeds, 0.8687, 0.15);
  EXPECT_LE(above, 3);
}

TEST(CompareDistribution, KsDecaysAsInverseRootN) {
  const PhysParams params(1.0, 0.1);
  const auto sol = solution_p1(params);
  const auto law = InitialLaw::from_solution(sol, 0.25);
  const std::vector<double> ns{1e3, 1e4, 1e5};
  std::vector<double> mean_log(ns.size(), 0.0);
  const int seeds = 10;
  for (std::size_t k = 0; k < ns.size(); ++k)
    for (int seed = 0; seed < seeds; ++seed) {
      // Constant drift in x: the step count does not bias the law.
      const auto s = spec_with(static_cast<std::size_t>(ns[k]), 500 + seed, 0.25, 1.0, 20);
      mean_log[k] += std::log(compare_distribution(simulate_em(linear_u1(), params, s, law), sol, 1.0).ks) / seeds;
    }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    const double lx = std::log(ns[k]);
    sx += lx;
    sy += mean_log[k];
    sxx += lx * lx;
    sxy += lx * mean_log[k];
  }
  const double m = static_cast<double>(ns.size());
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  EXPECT_NEAR(slope, -0.5, 0.15);
}

TEST(CompareDistribution, DegenerateEnsemble) {
  const auto sol = solution_p1(PhysParams(1.0, 0.1));
  for (double x0 : {-0.2, 0.0, 3.0}) {
    const Ensemble ens{0, 100, 1.0, std::vector<double>(100, x0)};
    EXPECT_GE(compare_distribution(ens, sol, 1.0).ks, 0.5);
  }
}

TEST(CompareDistribution, Errors) {
  const auto sol = solution_p1(PhysParams(1.0, 0.1));
  const Ensemble small{0, 99, 1.0, std::vector<double>(99, 0.0)};
  EXPECT_THROW(compare_distribution(small, sol, 1.0), ArgumentError);
  const auto ens = draw_exact(sol, 1.0, 1000, 1);
  EXPECT_THROW(compare_distribution(ens, sol, 2.0), ArgumentError);
  EXPECT_TRUE(draw_exact(sol, 1.0, 0, 1).positions.empty());
}

TEST(WidthControl, VarianceDecreasesWithLambda) {
  const PhysParams params(1.0, 0.0);
  const std::vector<double> lambdas{0.0, 0.1, 0.2};
  std::vector<InitialLaw> laws;
  for (double l : lambdas) laws.push_back(InitialLaw::from_solution(solution_p2(params.with_lambda(l)), 0.25));
  int votes = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto runs = simulate_em_sweep(quadratic_u1(), params, lambdas, spec_with(10000, seed, 0.25, 1.0, 200), laws);
    std::vector<double> var;
    for (const auto& e : runs) {
      const double mean = std::accumulate(e.positions.begin(), e.positions.end(), 0.0) / 1e4;
      double ss = 0.0;
      for (double x : e.positions) ss += (x - mean) * (x - mean);
      var.push_back(ss / (1e4 - 1));
    }
    votes += var[0] > var[1] && var[1] > var[2];
  }
  EXPECT_GE(votes, tol::width_monotone_min_seeds);
}
