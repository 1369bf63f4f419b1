#pragma once

// Second-order steady-state velocity of the center of mass.
//
//   I   = (1/4) int_0^inf dt (Gx - Gy) (sin a12 / A12) (e^{-c12/2} - e^{-c21/2}),   A12 = a12/b^2
//   v   = V0^2 b sin(phi) I / (2 eta~(0))
//
// With constant forces F1, F2 the zeroth-order motion drifts: the center of
// mass by u t with u = b (F1+F2)/(2 eta~(0)) and the relative coordinate by
// the static offset yS = b (F1-F2)/(2k). Then
//
//   I_F = (1/4) int_0^inf dt { (Gx - Gy)(sin a12/A12)[sin(phi - yS - u t) e^{-c12/2} - sin(phi - yS + u t) e^{-c21/2}]
//                             - (Gx + Gy)(sin a11/A11) (sin(u1 t) e^{-c11/2} + sin(u2 t) e^{-c22/2}) }
//
// where u1 = u2 = u for k > 0. At k = 0 the particles are free and drift
// separately, u_i = b F_i / eta~(0), and the cross term is absent.
//   v_F = (F1+F2)/(2 eta~(0)) + V0^2 b I_F / (2 eta~(0)).

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qmotor/bath.hpp"
#include "qmotor/correlators.hpp"

namespace qmotor {

enum class Method { Quadrature, QMD, MD };
std::string to_string(Method m);

struct VelocityDiagnostics {
  double tail_fraction = 0.0;   // last-panel envelope relative to the integral scale
  double tau_truncation = 0.0;  // where the lag integral was cut
  std::size_t tau_panels = 0;
  std::size_t kernel_evaluations = 0;
  std::vector<std::string> warnings;
};

struct VelocityEstimate {
  double value = 0.0;
  double abs_error = 0.0;
  Method method = Method::Quadrature;
  std::uint64_t params_fingerprint = 0;
  VelocityDiagnostics diagnostics;
};

struct VelocityOptions {
  double rel_tol = 1e-8;        // lag-integral target
  double truncation = 1e-10;    // envelope threshold relative to the accumulated integral
  KernelOptions kernel;         // frequency quadrature tolerances
  std::size_t max_panels = 20000;
  double tau_limit = 0.0;       // hard cap on the lag range; 0 selects an automatic bound
  std::size_t workers = 1;

  /// Same options with every tolerance halved.
  VelocityOptions halved() const;
};

/// Value, error and the adaptively built table of a lag integral.
struct LagIntegral {
  double value = 0.0;
  double abs_error = 0.0;
  CorrelatorTable table;
  VelocityDiagnostics diagnostics;
};

/// I from a precomputed table (Gauss-Kronrod panels). Throws NumericalError
/// when the integrand has not decayed by the end of the table. `abs_error`
/// receives the Kronrod-Gauss difference plus propagated kernel errors.
double velocity_integral_I(const CorrelatorTable& table, const MotorParams& p, double* abs_error = nullptr);

/// I with adaptive lag panels: extends until the integrand envelope stays
/// below `truncation` for three consecutive panels, then bisects the worst
/// panels until the Kronrod-Gauss error meets rel_tol.
/// The steady integral may stop earlier: once c12 and c21 grow with a common
/// slope alpha and the rest of the integrand has settled, the remainder
/// f(tau) 2/alpha is added analytically. The returned table then ends before
/// the integrand has decayed and velocity_integral_I rejects it.
LagIntegral compute_velocity_integral(const MotorParams& p, const VelocityOptions& opt = {});
LagIntegral compute_forced_integral(const MotorParams& p, const ForceSpec& f, const VelocityOptions& opt = {});

VelocityEstimate steady_velocity(const MotorParams& p, const VelocityOptions& opt = {});
/// Total drift, zeroth-order force term included. F1 = F2 = 0 returns steady_velocity.
VelocityEstimate forced_velocity(const MotorParams& p, const ForceSpec& f, const VelocityOptions& opt = {});
/// -F v for equal forces F1 = F2 = F; throws ConfigError otherwise.
double output_work_rate(const MotorParams& p, const ForceSpec& f, const VelocityOptions& opt = {});
/// One particle in -V0 cos(bx) - F x attached to `bath`.
VelocityEstimate single_particle_velocity(const BathSpec& bath, double m, double b, double v0, double force,
                                          const VelocityOptions& opt = {});
/// steady_velocity of classical_limit(p).
VelocityEstimate classical_velocity(const MotorParams& p, const VelocityOptions& opt = {});

/// sin(x)/x with its series at small |x|.
double sinc(double x);
/// sin(phi) that vanishes exactly at integer multiples of pi.
double exact_sin(double phi);

/// Warnings for V0 outside the perturbative regime.
std::vector<std::string> perturbative_warnings(const MotorParams& p);

}  // namespace qmotor
