#pragma once

// Langevin dynamics of the motor (two particles) and of a single particle in
// a tilted washboard, with Ohmic friction and pre-synthesized noise:
//
//   m Q''_i = -eta0 Q'_i - V0 b sin(b Q_i + phi_i) - k (Q_i - Q_j) + F_i + xi_i(t)
//
// QMD draws xi_i with the quantum symmetrized spectrum of bath i, MD with the
// classical one (white, variance 2 eta0 T / dt per step).
//
// One step is B A O A B: half kick, half drift, exact Ohmic relaxation under
// the noise force held constant over the step, half drift, half kick.

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "qmotor/bath.hpp"
#include "qmotor/velocity.hpp"

namespace qmotor {

enum class SimMode { QMD, MD };
enum class InitialConditions { Origin, Thermal };

std::string to_string(SimMode m);

struct SimConfig {
  double dt = 0.0;  // 0 selects default_time_step()
  std::size_t n_steps = std::size_t{1} << 18;
  std::size_t n_traj = 512;
  std::uint64_t master_seed = 1;
  SimMode mode = SimMode::QMD;
  double estimator_window = 0.5;  // trailing fraction used for slopes and averages
  InitialConditions initial = InitialConditions::Origin;
  std::size_t workers = 1;
  std::size_t saved_points = 4096;

  std::uint64_t fingerprint() const;
};

struct MotorSystem {
  MotorParams params;
  ForceSpec forces;
};

struct SingleSystem {
  BathSpec bath;
  double m = 1.0;
  double b = 1.0;
  double v0 = 0.0;
  double force = 0.0;
};

using System = std::variant<MotorSystem, SingleSystem>;

/// Fastest linear frequency: max(sqrt(2k/m + |V0| b^2/m), eta0/m).
double max_frequency(const System& s);
/// 0.05 / max_frequency, half the stability bound.
double default_time_step(const System& s);
/// Throws ConfigError when the system or configuration is not simulable:
/// non-Ohmic bath, dt * max_frequency >= 0.1, n_steps not a power of two
/// (>= 1024), estimator window outside (0, 1].
void validate(const System& s, const SimConfig& cfg);

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> com;       // center of mass (Q1 + Q2)/2, or Q for one particle
  double slope = 0.0;            // least-squares velocity over the estimator window
  double mean_kinetic = 0.0;     // <P^2/2m> per particle, window average
  double mean_y2 = 0.0;          // <(Q1 - Q2)^2>, window average (motor only)
};

TrajectoryRecord integrate_motor(const MotorParams& p, const ForceSpec& f, const SimConfig& cfg,
                                 std::size_t traj_index);
TrajectoryRecord integrate_single(const BathSpec& bath, double m, double b, double v0, double force,
                                  const SimConfig& cfg, std::size_t traj_index);

struct EnsembleResult {
  std::vector<double> times;
  std::vector<double> mean_com_trajectory;
  std::vector<double> per_traj_slopes;
  VelocityEstimate velocity;  // mean slope +- standard error
  double mean_kinetic = 0.0;
  double mean_kinetic_error = 0.0;
  double mean_y2 = 0.0;
  double mean_y2_error = 0.0;
  std::uint64_t config_fingerprint = 0;
  double dt = 0.0;
};

/// Runs cfg.n_traj trajectories (n_traj >= 2) on cfg.workers threads. The
/// result does not depend on the worker count.
EnsembleResult run_ensemble(const System& s, const SimConfig& cfg);

/// Least-squares slope of y against x.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t first = 0);

}  // namespace qmotor
