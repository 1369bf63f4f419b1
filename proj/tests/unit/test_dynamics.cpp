#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "qmotor/errors.hpp"
#include "qmotor/dynamics.hpp"

using namespace qmotor;
using qmotor::testing::fig2a;
using qmotor::testing::ohmic_bath;

namespace {

SimConfig small(SimMode mode, std::size_t traj = 32, std::size_t steps = std::size_t{1} << 14) {
  SimConfig c;
  c.mode = mode;
  c.n_traj = traj;
  c.n_steps = steps;
  c.master_seed = 2024;
  return c;
}

MotorParams equal_t(double t, double v0 = 0.0, double k = 1.0) {
  MotorParams p = fig2a(k, t, v0);
  p.bath2.temperature = t;
  return p;
}

}  // namespace

TEST(Validate, RejectsUnsimulable) {
  const System s = MotorSystem{fig2a(), {}};
  SimConfig c = small(SimMode::QMD);
  EXPECT_THROW(validate(s, c), ConfigError);  // dt must be resolved first
  c.dt = default_time_step(s);
  EXPECT_NO_THROW(validate(s, c));
  c.n_steps = 3000;
  EXPECT_THROW(validate(s, c), ConfigError);
  c = small(SimMode::QMD);
  c.dt = 0.2;
  EXPECT_THROW(validate(s, c), ConfigError);
  c = small(SimMode::QMD);
  c.dt = default_time_step(s);
  c.estimator_window = 0.0;
  EXPECT_THROW(validate(s, c), ConfigError);
  MotorParams lor = fig2a();
  lor.bath1.cutoff = lor.bath2.cutoff = Cutoff::soft_lorentzian(10.0);
  c = small(SimMode::QMD);
  c.dt = default_time_step(s);
  EXPECT_THROW(validate(MotorSystem{lor, {}}, c), ConfigError);
  c = small(SimMode::QMD);
  c.n_traj = 1;
  EXPECT_THROW(run_ensemble(s, c), ConfigError);
}

TEST(TimeStep, Default) {
  const System s = MotorSystem{fig2a(1.0), {}};
  EXPECT_NEAR(max_frequency(s), std::sqrt(2.5), 1e-15);
  EXPECT_NEAR(default_time_step(s), 0.05 / std::sqrt(2.5), 1e-15);
}

TEST(LeastSquares, Slope) {
  std::vector<double> x{0, 1, 2, 3, 4}, y{1, 3, 5, 7, 9};
  EXPECT_NEAR(least_squares_slope(x, y), 2.0, 1e-14);
  y[0] = 100.0;
  EXPECT_NEAR(least_squares_slope(x, y, 1), 2.0, 1e-14);
}

TEST(Ensemble, Deterministic) {
  const System s = MotorSystem{fig2a(), {}};
  SimConfig c = small(SimMode::QMD, 8, 1 << 12);
  const auto a = run_ensemble(s, c);
  const auto b = run_ensemble(s, c);
  EXPECT_EQ(a.per_traj_slopes, b.per_traj_slopes);
  EXPECT_EQ(a.mean_com_trajectory, b.mean_com_trajectory);
  c.workers = 3;
  const auto w = run_ensemble(s, c);
  EXPECT_EQ(a.per_traj_slopes, w.per_traj_slopes);
  EXPECT_EQ(a.velocity.value, w.velocity.value);
  c.master_seed = 2025;
  EXPECT_NE(a.per_traj_slopes, run_ensemble(s, c).per_traj_slopes);
}

TEST(Ensemble, FlatPotentialHasNoDrift) {
  for (SimMode mode : {SimMode::QMD, SimMode::MD}) {
    const auto r = run_ensemble(MotorSystem{fig2a(1.0, 1.0, 0.0), {}}, small(mode));
    EXPECT_LT(std::abs(r.velocity.value), 3.0 * r.velocity.abs_error) << to_string(mode);
  }
}

TEST(Ensemble, ZeroPhaseHasNoDrift) {
  MotorParams p = fig2a();
  p.phi = 0.0;
  const auto r = run_ensemble(MotorSystem{p, {}}, small(SimMode::QMD));
  EXPECT_LT(std::abs(r.velocity.value), 3.0 * r.velocity.abs_error);
}

TEST(Ensemble, EquilibriumNull) {
  int within = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SimConfig c = small(seed % 2 ? SimMode::QMD : SimMode::MD, 16, 1 << 12);
    c.master_seed = seed;
    const auto r = run_ensemble(MotorSystem{equal_t(1.0, 0.5), {}}, c);
    if (std::abs(r.velocity.value) < 2.0 * r.velocity.abs_error) ++within;
  }
  EXPECT_GE(within, 17);
}

TEST(Ensemble, Equipartition) {
  const double t = 0.7;
  const auto r = run_ensemble(MotorSystem{equal_t(t), {}}, small(SimMode::MD, 64));
  EXPECT_LT(std::abs(r.mean_kinetic - t / 2), 3.0 * r.mean_kinetic_error + 0.01 * t);
  // Coupling (k/2) y^2 gives <y^2> = T/k.
  EXPECT_LT(std::abs(r.mean_y2 - t), 3.0 * r.mean_y2_error + 0.02 * t);
}

TEST(Ensemble, QuantumRelativeSpread) {
  // At T = 0.1 the zero-point motion dominates the classical T/k.
  const auto q = run_ensemble(MotorSystem{equal_t(0.1), {}}, small(SimMode::QMD, 64));
  const auto c = run_ensemble(MotorSystem{equal_t(0.1), {}}, small(SimMode::MD, 64));
  EXPECT_GT(q.mean_y2, c.mean_y2 + 3.0 * std::hypot(q.mean_y2_error, c.mean_y2_error));
}

TEST(Ensemble, StandardErrorScaling) {
  const System s = MotorSystem{fig2a(), {}};
  const auto a = run_ensemble(s, small(SimMode::MD, 32, 1 << 12));
  const auto b = run_ensemble(s, small(SimMode::MD, 128, 1 << 12));
  EXPECT_NEAR(a.velocity.abs_error / b.velocity.abs_error, 2.0, 0.6);
}

TEST(Single, HighTemperatureMobility) {
  // Weak corrugation against kT: drift approaches F / eta0.
  SingleSystem s{ohmic_bath(5.0, 0.0), 1.0, 1.0, 0.05, 0.3};
  const auto r = run_ensemble(s, small(SimMode::MD, 32));
  EXPECT_NEAR(r.velocity.value, 0.3, 3.0 * r.velocity.abs_error + 0.01);
}

TEST(Single, SavedTrajectoryShape) {
  SingleSystem s{ohmic_bath(0.1), 1.0, 1.0, 0.1, 0.2};
  SimConfig c = small(SimMode::QMD, 1, 1 << 12);
  c.saved_points = 256;
  const auto rec = integrate_single(s.bath, s.m, s.b, s.v0, s.force, [&] {
    SimConfig d = c;
    d.dt = default_time_step(System{s});
    return d;
  }(), 0);
  EXPECT_EQ(rec.times.size(), rec.com.size());
  EXPECT_LE(rec.times.size(), 257u);
  EXPECT_TRUE(std::is_sorted(rec.times.begin(), rec.times.end()));
  EXPECT_TRUE(std::isfinite(rec.com.back()));
}
