#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "qmotor/errors.hpp"
#include "qmotor/velocity.hpp"

using namespace qmotor;
using qmotor::testing::fig2a;
using qmotor::testing::ohmic_bath;
using qmotor::testing::rel_diff;

namespace {

// Lag integral I at hbar = m = eta0 = b = 1, T1 = 1, T2 = 2.5, k = 1, from a
// separate Gauss-Legendre product rule in (w, tau) written in numpy.
constexpr double kIQuantum = 0.08881586327633705;
constexpr double kIClassical = 0.09421654606079148;

// Classical single particle, V0 = T = 0.1: closed-form kernels
// c11 = 2 b^2 T/(m g^2) (g t - 1 + e^{-g t}) integrated with scipy.quad.
constexpr double kSingleClassical[3][2] = {
    {0.1, 0.07285612406568855}, {0.2, 0.1788436356678601}, {0.4, 0.3887230785590786}};

}  // namespace

TEST(VelocityIntegral, MatchesIndependentQuadrature) {
  const LagIntegral q = compute_velocity_integral(fig2a());
  EXPECT_NEAR(q.value, kIQuantum, 1e-10);
  EXPECT_LT(q.abs_error, 1e-8 * std::abs(q.value) + 1e-12);
  const LagIntegral c = compute_velocity_integral(classical_limit(fig2a()));
  EXPECT_NEAR(c.value, kIClassical, 1e-10);
}

TEST(VelocityIntegral, HalvedTolerancesAgree) {
  VelocityOptions opt;
  const LagIntegral a = compute_velocity_integral(fig2a(), opt);
  const LagIntegral b = compute_velocity_integral(fig2a(), opt.halved());
  EXPECT_LT(rel_diff(a.value, b.value), 1e-6);
  EXPECT_LT(std::abs(a.value - b.value), 5.0 * a.abs_error + 1e-15);
}

TEST(VelocityIntegral, ExponentialTailMatchesFullLagRange) {
  // Weak corrugation wavenumber: e^{-c/2} decays on lags ~ 1/b^2. Reference
  // from the full panel integration out to tau ~ 7e3.
  MotorParams p = fig2a();
  p.b = 0.1;
  const LagIntegral r = compute_velocity_integral(p);
  EXPECT_LT(r.diagnostics.tau_truncation, 500.0);
  const double v = r.value * p.v0 * p.v0 * p.b / 2.0;
  EXPECT_LT(rel_diff(v, 2.6536714722821344e-05), 1e-9);
  EXPECT_THROW(velocity_integral_I(r.table, p), NumericalError);
}

TEST(VelocityIntegral, FromTable) {
  const MotorParams p = fig2a();
  const LagIntegral q = compute_velocity_integral(p);
  double err = 0.0;
  EXPECT_NEAR(velocity_integral_I(q.table, p, &err), q.value, 1e-15);
  EXPECT_GE(err, 0.0);
  // A table cut well inside the support must be rejected.
  const CorrelatorTable short_table = build_table(p, 2.0, 32);
  EXPECT_THROW(velocity_integral_I(short_table, p), NumericalError);
}

TEST(SteadyVelocity, Prefactor) {
  const VelocityEstimate v = steady_velocity(fig2a());
  EXPECT_NEAR(v.value, 0.25 * kIQuantum / 2.0, 1e-11);
  EXPECT_EQ(v.method, Method::Quadrature);
  EXPECT_EQ(v.params_fingerprint, fig2a().fingerprint());
  EXPECT_GE(v.abs_error, 0.0);
  EXPECT_LT(v.diagnostics.tail_fraction, 1e-8);
  EXPECT_GT(v.diagnostics.tau_truncation, 0.0);
}

TEST(SteadyVelocity, VanishesAtEquilibrium) {
  MotorParams p = fig2a();
  p.bath2.temperature = p.bath1.temperature;
  EXPECT_EQ(steady_velocity(p).value, 0.0);
  EXPECT_EQ(classical_velocity(p).value, 0.0);
}

TEST(SteadyVelocity, VanishesWithoutCoupling) {
  const VelocityEstimate v = steady_velocity(fig2a(0.0));
  EXPECT_EQ(v.value, 0.0);
  EXPECT_EQ(v.abs_error, 0.0);
}

TEST(SteadyVelocity, PhaseLaw) {
  MotorParams p = fig2a();
  const double ref = steady_velocity(p).value;
  for (double phi : {0.0, std::numbers::pi}) {
    p.phi = phi;
    EXPECT_EQ(steady_velocity(p).value, 0.0);
  }
  p.phi = -std::numbers::pi / 2;
  EXPECT_EQ(steady_velocity(p).value, -ref);
  for (double phi : {0.3, 1.0, 2.0, 4.0}) {
    p.phi = phi;
    EXPECT_NEAR(steady_velocity(p).value / std::sin(phi), ref, 1e-12 * std::abs(ref));
  }
}

TEST(SteadyVelocity, QuadraticInAmplitude) {
  MotorParams p = fig2a();
  const double ref = steady_velocity(p).value;
  p.v0 = 1.5;
  EXPECT_NEAR(steady_velocity(p).value, 9.0 * ref, 1e-14);
  p.v0 = -0.5;
  EXPECT_EQ(steady_velocity(p).value, ref);
}

TEST(SteadyVelocity, PerturbativeWarnings) {
  EXPECT_TRUE(perturbative_warnings(fig2a(1.0, 1.0, 0.1)).empty());
  EXPECT_FALSE(perturbative_warnings(fig2a(1.0, 1.0, 3.0)).empty());
  EXPECT_FALSE(steady_velocity(fig2a(1.0, 1.0, 3.0)).diagnostics.warnings.empty());
}

TEST(ClassicalVelocity, AgreesWithQuantumAtHighTemperature) {
  const MotorParams p = fig2a(1.0, 20.0);
  EXPECT_LT(rel_diff(steady_velocity(p).value, classical_velocity(p).value), 0.01);
  MotorParams q = fig2a();
  q.phi = std::numbers::pi;
  EXPECT_EQ(classical_velocity(q).value, 0.0);
}

TEST(ForcedVelocity, ZeroForceIsSteadyVelocity) {
  const MotorParams p = fig2a();
  EXPECT_EQ(forced_velocity(p, {}).value, steady_velocity(p).value);
}

TEST(ForcedVelocity, OpposingLoadExtractsWork) {
  const MotorParams p = fig2a();
  const double free = steady_velocity(p).value;
  const ForceSpec load{-0.002, -0.002};
  const VelocityEstimate v = forced_velocity(p, load);
  EXPECT_LT(v.value, free);
  EXPECT_GT(v.value, 0.0);
  EXPECT_GT(output_work_rate(p, load), 0.0);
  EXPECT_NEAR(output_work_rate(p, load), 0.002 * v.value, 1e-15);
  EXPECT_LT(output_work_rate(p, {0.01, 0.01}), 0.0);
  EXPECT_EQ(output_work_rate(p, {}), 0.0);
  EXPECT_THROW(output_work_rate(p, {0.1, 0.2}), ConfigError);
}

TEST(ForcedVelocity, UnequalForcesOnDecoupledPair) {
  // k = 0: particles move independently; the mean of the two tilted drifts.
  MotorParams p = fig2a(0.0, 0.1, 0.1);
  p.bath2.temperature = 0.1;
  const double v1 = single_particle_velocity(p.bath1, 1.0, 1.0, 0.1, 0.1).value;
  const double v2 = single_particle_velocity(p.bath1, 1.0, 1.0, 0.1, 0.3).value;
  EXPECT_NEAR(forced_velocity(p, {0.1, 0.3}).value, 0.5 * (v1 + v2), 1e-9);
}

TEST(SingleParticle, ClassicalClosedForm) {
  const BathSpec b = ohmic_bath(0.1, 0.0);
  for (const auto& [f, v] : kSingleClassical) EXPECT_NEAR(single_particle_velocity(b, 1.0, 1.0, 0.1, f).value, v, 1e-12);
  // b = 2
  EXPECT_NEAR(single_particle_velocity(b, 1.0, 2.0, 0.1, 0.2).value, 0.13940729453240078, 1e-12);
}

TEST(SingleParticle, QuantumGoldens) {
  const BathSpec b = ohmic_bath(0.1);
  EXPECT_EQ(single_particle_velocity(b, 1.0, 1.0, 0.1, 0.0).value, 0.0);
  EXPECT_NEAR(single_particle_velocity(b, 1.0, 1.0, 0.1, 0.1).value, 0.08259973721, 1e-9);
  EXPECT_NEAR(single_particle_velocity(b, 1.0, 1.0, 0.1, 0.2).value, 0.18607834204, 1e-9);
  EXPECT_NEAR(single_particle_velocity(b, 1.0, 1.0, 0.1, 0.4).value, 0.3919174578, 1e-9);
  EXPECT_NEAR(single_particle_velocity(b, 1.0, 2.0, 0.1, 0.2).value, 0.18881605555, 1e-9);
  // Drift is odd in the force.
  EXPECT_NEAR(single_particle_velocity(b, 1.0, 1.0, 0.1, -0.2).value, -0.18607834204, 1e-9);
}

TEST(Sinc, SeriesBranch) {
  EXPECT_EQ(sinc(0.0), 1.0);
  EXPECT_NEAR(sinc(1e-7), 1.0 - 1e-14 / 6.0, 1e-18);
  EXPECT_NEAR(sinc(0.5), std::sin(0.5) / 0.5, 1e-16);
  EXPECT_EQ(exact_sin(std::numbers::pi), 0.0);
  EXPECT_EQ(exact_sin(-2.0 * std::numbers::pi), 0.0);
}
