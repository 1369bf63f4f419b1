#pragma once

// Response functions of the center-of-mass (x) and relative (y) coordinates,
//   G~x(w) = -1 / (m w^2 + i w eta~(w)),
//   G~y(w) = -1 / (m w^2 + i w eta~(w) - 2k),
// with the convention q(t) = int dw/2pi e^{-i w t} q~(w).

#include <complex>

#include "qmotor/bath.hpp"
#include "qmotor/spectral.hpp"

namespace qmotor {

enum class Mode { X, Y };

/// Denominators D = m w^2 + i w eta~(w) (x) and D - 2k (y), so G~ = -1/D.
struct ModeDenominators {
  std::complex<double> dx;
  std::complex<double> dy;
};
ModeDenominators mode_denominators(const MotorParams& p, double omega);
/// m w^2 - 2k in the factored form m (w - wk)(w + wk), wk = sqrt(2k/m),
/// which keeps its relative accuracy across a narrow y-mode resonance.
double y_detuning(const MotorParams& p, double omega);

/// Throws NumericalError at omega = 0 (free-particle pole).
std::complex<double> green_x(const MotorParams& p, double omega);
/// Throws NumericalError at omega = 0 when k = 0.
std::complex<double> green_y(const MotorParams& p, double omega);

/// Frequency scales that shape the response and noise integrands: friction
/// rate, y-mode frequency and its damped resonance, cutoff, thermal
/// frequencies T/hbar.
spectral::FrequencyScales frequency_scales(const MotorParams& p);

/// Causal time-domain response; zero for tau < 0.
///   Ohmic: closed forms (under-, critically and over-damped y-mode).
///   SoftLorentzian: sum over the three poles of the rational transform.
///   Exponential: numerical inversion (see green_time_numerical).
double green_x_time(const MotorParams& p, double tau);
double green_y_time(const MotorParams& p, double tau);

/// G(tau) = (2/pi) int_0^inf Im G~(w) sin(w tau) dw, for any cutoff family.
/// Accuracy is rel_tol relative to the result, or rel_tol * 1e-2 / eta0 absolute
/// (G_x saturates at 1/eta0). `error` receives the quadrature error estimate.
double green_time_numerical(const MotorParams& p, Mode mode, double tau, double rel_tol = 1e-10,
                            double* error = nullptr);

/// True when the time-domain responses have closed forms for this cutoff.
bool green_time_closed_form(const MotorParams& p);

}  // namespace qmotor
