#pragma once

// Laboratory units of the trapped-ion figures and the reduced system used by
// the library. Base scales: mass 1 amu, energy k_B * 1 uK, length 1 um, so the
// time unit is tau0 = 1 um * sqrt(amu / (k_B uK)) ~ 1.0967e-5 s and the
// reduced hbar is ~0.6965.
//
// Frequencies quoted in kHz (Omega, Lambda) are read as angular, 1 kHz = 1e3
// rad/s. The friction rate eta0/m in Hz is a rate in 1/s.

#include "qmotor/bath.hpp"

namespace qmotor::cli {

struct UnitSystem {
  double mass_kg;
  double energy_j;
  double length_m;
  double time_s() const;
  double hbar() const;  // reduced
};

const UnitSystem& lab_units();

struct PhysicalInputs {
  double mass_amu = 40.0;
  double omega_khz = 702.5;    // sqrt(k/m)
  double b_per_um = 10.0;
  double v0_uk = 0.25;
  double phi = 1.5707963267948966;
  double gamma_hz = 10.0;      // eta0/m
  double t1_uk = 1.0;
  double t2_uk = 2.5;
  CutoffFamily cutoff = CutoffFamily::SoftLorentzian;
  double lambda_khz = 1000.0;
  bool classical = false;
};

/// Throws ConfigError on non-positive or non-finite quantities.
MotorParams convert_units(const PhysicalInputs& in);
PhysicalInputs to_physical(const MotorParams& p);

/// Force in uK/um to reduced units and back.
double force_to_reduced(double uk_per_um);
double force_to_physical(double reduced);
/// Reduced velocity to um/s.
double velocity_to_um_per_s(double reduced);

}  // namespace qmotor::cli
