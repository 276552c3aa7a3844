#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "fplab/perturbation.hpp"
#include "fplab/scaling.hpp"
#include "fplab/similarity.hpp"
#include "oracles.hpp"

using namespace fplab;

TEST(EffectivePotential, Examples) {
  EXPECT_EQ(effective_potential(DriftPotential::zero(), 1.0, 0.3, 2.0), 0.0);
  const double lam = 0.1;
  const auto u_lin = DriftPotential::power_law(lam, 1.0, -0.5);
  EXPECT_NEAR(effective_potential(u_lin, 1.0, 2.0, 1.0), -lam * lam / 4 - lam / 2, 1e-15);
  const auto u_quad = DriftPotential::power_law(lam / 2, 2.0, -1.0);
  EXPECT_NEAR(effective_potential(u_quad, 1.0, 0.0, 2.0), lam / 4, 1e-15);
  EXPECT_THROW(effective_potential(u_lin, 1.0, 1.0, 0.0), DomainError);
}

TEST(EffectivePotential, FiniteDifferenceFallbackAgrees) {
  const auto analytic = DriftPotential::power_law(0.3, 2.0, -1.0);
  const auto numeric = DriftPotential::from_function([](double x, double t) { return 0.3 * x * x / t; });
  EXPECT_FALSE(numeric.analytic());
  for (double x : {-1.5, 0.2, 2.0})
    for (double t : {0.5, 2.0})
      EXPECT_NEAR(effective_potential(numeric, 1.2, x, t), effective_potential(analytic, 1.2, x, t), 1e-8);
}

TEST(S0, Examples) {
  const double D = 1.0;
  const double t_unit = 1.0 / (4 * std::numbers::pi * D);
  EXPECT_NEAR(s0(0.0, t_unit, D), 0.0, 1e-16);
  EXPECT_NEAR(std::exp(s0(0.0, t_unit, D) / D), 1.0, 1e-16);
  EXPECT_NEAR(s0(0.0, 1.0, D), -1.26551212348465, 1e-14);
  EXPECT_NEAR(std::exp(s0(1.0, 1.0, D) / D), 0.219695644733861, 1e-15);
  EXPECT_THROW(s0(0.0, 0.0, D), DomainError);
}

TEST(S0, ExponentialIsUnitMassKernel) {
  for (double D : {0.5, 2.0}) {
    const double m = oracle::trapezoid([&](double x) { return std::exp(s0(x, 1.3, D) / D); }, -60, 60, 60000);
    EXPECT_NEAR(m, 1.0, 1e-12);
    for (double x : {-1.0, 0.4}) EXPECT_NEAR(std::exp(s0(x, 1.3, D) / D), oracle::heat_kernel(x, 1.3, D), 1e-15);
  }
}

TEST(S0, SolvesZerothOrderEquation) {
  // S0-dot = D S0'' + S0'^2 with U0 = 0. Centered differences on the value.
  const double D = 0.8;
  const Field numeric([D](double x, double t) { return s0(x, t, D); });
  const Field analytic = s0_field(D);
  for (double x : {-2.0, 0.0, 1.5})
    for (double t : {0.5, 2.0}) {
      const double r = analytic.dt(x, t) - D * analytic.dxx(x, t) - std::pow(analytic.dx(x, t), 2);
      EXPECT_NEAR(r, 0.0, 1e-15);
      EXPECT_NEAR(numeric.dt(x, t), analytic.dt(x, t), 1e-8);
      EXPECT_NEAR(numeric.dxx(x, t), analytic.dxx(x, t), 1e-8);
    }
}

TEST(HierarchyResidual, Examples) {
  const PhysParams params(1.0, 0.1);
  const auto u1 = DriftPotential::power_law(1.0, 1.0, -0.5);
  const auto action = SAction::similarity(params, u1);
  std::vector<Probe> probes;
  for (double x : {-3.0, -0.5, 0.0, 1.0, 4.0})
    for (double t : {0.3, 1.0, 3.0}) probes.push_back({x, t});
  for (const auto& pr : probes) {
    EXPECT_LE(std::abs(hierarchy_residual(1, action, u1, pr.x, pr.t)), 1e-7);
    EXPECT_LE(std::abs(hierarchy_residual(2, action, u1, pr.x, pr.t)), 1e-7);
  }
  const SAction bare(params, {s0_field(1.0), Field::constant(0.0)});
  EXPECT_NEAR(hierarchy_residual(1, bare, u1, 1.0, 1.0), 0.25, 1e-14);
}

TEST(HierarchyResidual, FiniteDifferenceFieldsStayBelowFloor) {
  // Same S1 but with derivatives taken numerically.
  const PhysParams params(1.0, 0.1);
  const auto u1 = DriftPotential::power_law(0.5, 2.0, -1.0);
  const Field s1([](double x, double t) { return -0.25 * x * x / t; });
  const SAction action(params, {s0_field(1.0), s1, Field::constant(0.3)});
  for (double x : {-4.0, -1.0, 0.5, 3.0})
    for (double t : {0.5, 1.0, 4.0}) {
      EXPECT_LE(std::abs(hierarchy_residual(1, action, u1, x, t)), 1e-7);
      EXPECT_LE(std::abs(hierarchy_residual(2, action, u1, x, t)), 1e-7);
    }
}

TEST(HierarchyResidual, OrderOutOfRange) {
  const PhysParams params(1.0, 0.1);
  const auto u1 = DriftPotential::power_law(1.0, 1.0, -0.5);
  const auto action = SAction::similarity(params, u1);
  EXPECT_THROW(hierarchy_residual(3, action, u1, 1.0, 1.0), RangeError);
  EXPECT_THROW(hierarchy_residual(0, action, u1, 1.0, 1.0), RangeError);
  const auto short_action = SAction::similarity(params, u1, {}, 1);
  EXPECT_THROW(hierarchy_residual(2, short_action, u1, 1.0, 1.0), RangeError);
}

TEST(HierarchyResidual, VanishesIffScaleInvariant) {
  const PhysParams params(1.0, 0.1);
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> xs(0.2, 4.0), ts(0.25, 4.0);
  for (double p : {1.0, 2.0, 3.0, 4.0}) {
    for (double dq : {0.0, 0.1, -0.3}) {
      const auto u1 = DriftPotential::power_law(1.0, p, -p / 2 + dq);
      const auto action = SAction::similarity(params, u1);
      double worst = 0.0;
      for (int i = 0; i < 20; ++i) worst = std::max(worst, std::abs(hierarchy_residual(1, action, u1, xs(gen), ts(gen))));
      if (dq == 0.0) EXPECT_LE(worst, 1e-10) << "p=" << p;
      else EXPECT_GT(worst, 1e-3) << "p=" << p << " dq=" << dq;
    }
  }
}

TEST(Order2Source, CancelsForAcceptedPotentials) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> xs(-6.0, 6.0), ts(0.1, 8.0);
  const PhysParams params(1.0, 0.1);
  for (double p : {0.0, 1.0, 2.0, 4.0, 6.0})
    for (double mu : {0.5, 2.0}) {
      const auto u1 = DriftPotential::power_law(mu, p, -p / 2);
      const auto action = SAction::similarity(params, u1, {0.4, -1.0});
      for (int i = 0; i < 100; ++i) {
        const double x = xs(gen), t = ts(gen);
        const double scale = 0.25 * std::pow(u1.dx(x, t), 2);
        EXPECT_LE(std::abs(order2_source(action, u1, x, t)), 1e-12 * std::max(scale, 1e-300));
      }
    }
}

TEST(ToSchrodinger, Examples) {
  const DensityFn w = [](double x, double t) { return std::exp(-x * x / t) + 0.1; };
  for (double x : {-1.0, 0.5}) EXPECT_EQ(to_schrodinger(w, DriftPotential::zero(), 1.0, x, 2.0), w(x, 2.0));
  const PhysParams params(1.0, 0.1);
  const auto sol = solution_p1(params);
  const auto u = DriftPotential::power_law(0.1, 1.0, -0.5);
  EXPECT_NEAR(to_schrodinger(sol.as_function(), u, 1.0, 0.0, 1.0), 0.279287901697234, 1e-15);
  const DensityFn zero = [](double, double) { return 0.0; };
  EXPECT_EQ(to_schrodinger(zero, u, 1.0, 3.0, 1.0), 0.0);
}

TEST(ToSchrodinger, OverflowGuard) {
  const auto u = DriftPotential::power_law(1.0, 2.0, -1.0);
  const DensityFn w = [](double, double) { return 1.0; };
  EXPECT_NO_THROW(to_schrodinger(w, u, 1.0, 30.0, 1.0));     // U/2D = 450
  EXPECT_THROW(to_schrodinger(w, u, 1.0, 40.0, 1.0), RangeError);  // U/2D = 800
}

TEST(SchrodingerResidual, Examples) {
  const PhysParams params(1.0, 0.1);
  const auto sol = solution_p1(params);
  const auto u = DriftPotential::power_law(0.1, 1.0, -0.5);
  const auto psi = schrodinger_field(sol.as_function(), u, 1.0);
  const auto kernel = diffusion_kernel(1.0).as_function();
  const DensityFn zero = [](double, double) { return 0.0; };
  for (double x : {-4.0, -2.0, -1.0, 0.5, 3.0})
    for (double t : {0.5, 1.0, 2.0, 4.0}) {
      EXPECT_LE(std::abs(schrodinger_residual(psi, u, 1.0, x, t)), 1e-6);
      EXPECT_LE(std::abs(schrodinger_residual(kernel, DriftPotential::zero(), 1.0, x, t)), 1e-6);
      EXPECT_EQ(schrodinger_residual(zero, u, 1.0, x, t), 0.0);
    }
  EXPECT_THROW(schrodinger_residual(psi, u, 1.0, 0.0, 0.0), DomainError);
}

TEST(SchrodingerResidual, DetectsNonSolutions) {
  const auto u = DriftPotential::power_law(0.1, 1.0, -0.5);
  const auto wrong = schrodinger_field(diffusion_kernel(1.0).as_function(), u, 1.0);
  EXPECT_GT(std::abs(schrodinger_residual(wrong, u, 1.0, 1.0, 1.0)), 1e-3);
}

TEST(AssembleDensity, ZeroLambdaIsKernel) {
  const PhysParams params(1.0, 0.0);
  const auto u1 = DriftPotential::power_law(1.0, 2.0, -1.0);
  const auto action = SAction::similarity(params, u1, {0.5, 2.0});
  for (double x : {-1.0, 0.0, 2.0}) EXPECT_NEAR(assemble_density(action, u1, x, 1.5), oracle::heat_kernel(x, 1.5, 1.0), 1e-15);
}

TEST(AssembleDensity, LinearCaseRatioIsConstant) {
  const PhysParams params(1.0, 0.1);
  const auto u1 = DriftPotential::power_law(1.0, 1.0, -0.5);
  const auto action = SAction::similarity(params, u1);
  const auto sol = solution_p1(params);
  EXPECT_NEAR(assemble_density(action, u1, 0.0, 1.0), 0.282094791773878, 1e-15);
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> xs(-5.0, 5.0), ts(0.25, 4.0);
  for (int i = 0; i < 50; ++i) {
    const double x = xs(gen), t = ts(gen);
    EXPECT_NEAR(assemble_density(action, u1, x, t) / sol(x, t), 1.01005016708417, 1e-12);
  }
}

TEST(AssembleDensity, ConstantS1ScalesUniformly) {
  const PhysParams params(1.0, 0.1);
  const auto u1 = DriftPotential::zero();
  const SAction base(params, {s0_field(1.0)});
  const SAction shifted(params, {s0_field(1.0), Field::constant(0.7)});
  for (double x : {-1.0, 0.3})
    EXPECT_NEAR(assemble_density(shifted, u1, x, 1.0) / assemble_density(base, u1, x, 1.0), std::exp(0.1 * 0.7), 1e-14);
  EXPECT_THROW(assemble_density(base, u1, 0.0, 1.0, 1), RangeError);
}

TEST(AssembleDensity, InverseOfSchrodingerTransform) {
  const PhysParams params(1.2, 0.15);
  const auto u1 = DriftPotential::power_law(1.0, 4.0, -2.0);
  const auto action = SAction::similarity(params, u1, {0.2});
  const auto u = u1.scaled(params.lambda());
  const DensityFn w = [&](double x, double t) { return assemble_density(action, u1, x, t); };
  for (double x : {-2.0, 0.0, 1.1})
    for (double t : {0.5, 2.0}) {
      const double psi = to_schrodinger(w, u, params.diffusion(), x, t);
      EXPECT_NEAR(std::exp(-u(x, t) / (2 * params.diffusion())) * psi, w(x, t), 1e-14 * std::max(1.0, w(x, t)));
    }
}

TEST(AssembleDensity, RatioToClosedFormIsConstantForAcceptedProfiles) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> xs(-4.0, 4.0), ts(0.25, 4.0);
  for (double p : {0.0, 2.0, 4.0}) {
    const PhysParams params(1.0, 0.05);
    const auto pot = PowerLawPotential::scale_invariant(1.0, p);
    const auto u1 = DriftPotential::power_law(pot);
    const auto action = SAction::similarity(params, u1);
    const auto sol = assemble_closed_form(params, pot);
    double lo = 1e300, hi = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double x = xs(gen), t = ts(gen);
      const double r = assemble_density(action, u1, x, t) / sol(x, t);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    EXPECT_LE((hi - lo) / hi, 1e-10) << "p=" << p;
  }
}
