#include "units.hpp"

#include <cmath>

#include "qmotor/errors.hpp"

namespace qmotor::cli {

namespace {

constexpr double kAmu = 1.66053906660e-27;
constexpr double kBoltzmann = 1.380649e-23;
constexpr double kHbar = 1.054571817e-34;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be positive and finite");
}

}  // namespace

double UnitSystem::time_s() const {
  return length_m * std::sqrt(mass_kg / energy_j);
}

double UnitSystem::hbar() const {
  return kHbar / (energy_j * time_s());
}

const UnitSystem& lab_units() {
  static const UnitSystem u{kAmu, kBoltzmann * 1e-6, 1e-6};
  return u;
}

MotorParams convert_units(const PhysicalInputs& in) {
  require_positive(in.mass_amu, "mass");
  require_positive(in.omega_khz, "Omega");
  require_positive(in.b_per_um, "b");
  require_positive(in.gamma_hz, "eta0/m");
  require_positive(in.t1_uk, "T1");
  require_positive(in.t2_uk, "T2");
  if (!(in.v0_uk >= 0.0) || !std::isfinite(in.v0_uk)) throw ConfigError("V0 must be non-negative and finite");
  if (!std::isfinite(in.phi)) throw ConfigError("phi must be finite");
  if (in.cutoff != CutoffFamily::Ohmic) require_positive(in.lambda_khz, "Lambda");

  const double t0 = lab_units().time_s();
  MotorParams p;
  p.m = in.mass_amu;
  const double omega = in.omega_khz * 1e3 * t0;
  p.k = p.m * omega * omega;
  p.b = in.b_per_um;
  p.v0 = in.v0_uk;
  p.phi = in.phi;
  BathSpec bath;
  bath.eta0 = p.m * in.gamma_hz * t0;
  bath.hbar = in.classical ? 0.0 : lab_units().hbar();
  switch (in.cutoff) {
    case CutoffFamily::Ohmic: bath.cutoff = Cutoff::ohmic(); break;
    case CutoffFamily::SoftLorentzian: bath.cutoff = Cutoff::soft_lorentzian(in.lambda_khz * 1e3 * t0); break;
    case CutoffFamily::Exponential: bath.cutoff = Cutoff::exponential(in.lambda_khz * 1e3 * t0); break;
  }
  p.bath1 = bath;
  p.bath2 = bath;
  p.bath1.temperature = in.t1_uk;
  p.bath2.temperature = in.t2_uk;
  return p;
}

PhysicalInputs to_physical(const MotorParams& p) {
  const double t0 = lab_units().time_s();
  PhysicalInputs out;
  out.mass_amu = p.m;
  out.omega_khz = std::sqrt(p.k / p.m) / t0 * 1e-3;
  out.b_per_um = p.b;
  out.v0_uk = p.v0;
  out.phi = p.phi;
  out.gamma_hz = p.bath1.eta0 / p.m / t0;
  out.t1_uk = p.bath1.temperature;
  out.t2_uk = p.bath2.temperature;
  out.cutoff = p.bath1.cutoff.family;
  out.lambda_khz = p.bath1.cutoff.family == CutoffFamily::Ohmic ? 0.0 : p.bath1.cutoff.lambda / t0 * 1e-3;
  out.classical = !p.quantum();
  return out;
}

// Energy over length is already in reduced units.
double force_to_reduced(double uk_per_um) {
  return uk_per_um;
}

double force_to_physical(double reduced) {
  return reduced;
}

double velocity_to_um_per_s(double reduced) {
  return reduced / lab_units().time_s();
}

}  // namespace qmotor::cli
