#pragma once

#include <complex>
#include <cstdint>
#include <string>

namespace qmotor {

enum class CutoffFamily { Ohmic, SoftLorentzian, Exponential };

/// High-frequency suppression f(omega) of the bath density of states.
///   Ohmic:          f = 1
///   SoftLorentzian: f = L^2 / (omega^2 + L^2)
///   Exponential:    f = exp(-|omega| / L)
struct Cutoff {
  CutoffFamily family = CutoffFamily::Ohmic;
  double lambda = 0.0;  // angular frequency, unused for Ohmic

  static Cutoff ohmic() { return {}; }
  static Cutoff soft_lorentzian(double lambda);
  static Cutoff exponential(double lambda);

  double operator()(double omega) const;
  bool operator==(const Cutoff&) const = default;
};

std::string to_string(const Cutoff& c);

/// One Caldeira-Leggett reservoir. Units have k_B = 1; hbar = 0 selects the
/// classical fluctuation-dissipation relation.
struct BathSpec {
  double eta0 = 1.0;
  Cutoff cutoff;
  double temperature = 1.0;
  double hbar = 1.0;

  bool quantum() const { return hbar > 0.0; }
  /// Throws ConfigError unless eta0 > 0, temperature >= 0, hbar >= 0 and the
  /// cutoff scale is positive.
  void validate() const;
};

/// N(omega) = 2 eta0 f(|omega|).
double density_of_states(const BathSpec& spec, double omega);

/// One-sided transform  int_0^inf dt e^{i omega t} eta(t)  of the memory kernel
/// eta(t) = theta(t) int domega/2pi N(omega) cos(omega t).
///
/// Closed forms:
///   Ohmic:          eta(t) = 2 eta0 delta(t)          -> eta0
///   SoftLorentzian: eta(t) = eta0 L e^{-L t}          -> eta0 L / (L - i omega)
///   Exponential:    eta(t) = (2 eta0/pi) L/(1+L^2t^2) -> eta0 e^{-|w|/L}
///                        + i (2 eta0/pi) sgn(w) g(|w|/L),
///   g(a) = int_0^inf sin(a s)/(1+s^2) ds = [e^{-a} Ei(a) + e^{a} E1(a)] / 2.
/// In all cases Re eta~(omega) = N(omega)/2 and eta~(0) = eta0.
std::complex<double> memory_kernel_ft(const BathSpec& spec, double omega);

/// Sine transform  int_0^inf sin(a s)/(1+s^2) ds  for a >= 0.
double lorentz_sine_transform(double a);

/// F~(omega) = (hbar omega / 2) (1 + coth(hbar omega / 2T)).
/// Classical mode returns T. At T = 0 the quantum kernel is hbar*omega for
/// omega > 0 and 0 for omega <= 0 (coth -> sgn).
double fdt_kernel(const BathSpec& spec, double omega);

/// Even part of F~: (hbar omega / 2) coth(hbar omega / 2T), or T classically.
double symmetric_fdt_weight(const BathSpec& spec, double omega);

/// Symmetrized noise power spectrum N(omega) * symmetric_fdt_weight(omega).
/// This is the two-sided PSD S with <xi(t) xi(0)>_sym = int domega/2pi S e^{-i omega t}.
double symmetric_psd(const BathSpec& spec, double omega);

struct ForceSpec {
  double f1 = 0.0;
  double f2 = 0.0;
};

/// Two particles of mass m on the tracks -V0 cos(bQ1) and -V0 cos(bQ2 + phi),
/// coupled by (k/2)(Q1 - Q2)^2, each attached to its own bath.
struct MotorParams {
  double m = 1.0;
  double k = 1.0;
  double b = 1.0;
  double v0 = 0.5;
  double phi = 1.5707963267948966;
  BathSpec bath1;
  BathSpec bath2;

  /// Throws ConfigError on invalid values or when the two baths differ in
  /// anything but temperature.
  void validate() const;
  double hbar() const { return bath1.hbar; }
  bool quantum() const { return bath1.quantum(); }
  /// Stable 64-bit fingerprint of every field.
  std::uint64_t fingerprint() const;
};

/// Same parameters with both baths switched to the classical FDT.
MotorParams classical_limit(MotorParams p);

/// Fold a 64-bit value into a running hash (splitmix-style finalizer).
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value);
std::uint64_t hash_double(std::uint64_t seed, double value);

}  // namespace qmotor
