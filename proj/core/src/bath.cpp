#include "qmotor/bath.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

#include "qmotor/errors.hpp"

namespace qmotor {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

// z coth z, with the removable point z = 0 handled by its Taylor series.
double z_coth_z(double z) {
  const double az = std::abs(z);
  if (az < 1e-4) {
    const double z2 = z * z;
    return 1.0 + z2 / 3.0 - z2 * z2 / 45.0;
  }
  if (az > 20.0) return az;  // coth saturates to 1 to double precision
  return z / std::tanh(z);
}

// sum_{n>=1} x^n / (n n!)
double ei_series_tail(double x) {
  double term = 1.0;
  double sum = 0.0;
  for (int n = 1; n < 200; ++n) {
    term *= x / n;
    const double add = term / n;
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

Cutoff Cutoff::soft_lorentzian(double lambda) {
  return {CutoffFamily::SoftLorentzian, lambda};
}

Cutoff Cutoff::exponential(double lambda) {
  return {CutoffFamily::Exponential, lambda};
}

double Cutoff::operator()(double omega) const {
  const double w = std::abs(omega);
  switch (family) {
    case CutoffFamily::Ohmic:
      return 1.0;
    case CutoffFamily::SoftLorentzian:
      return lambda * lambda / (w * w + lambda * lambda);
    case CutoffFamily::Exponential:
      return std::exp(-w / lambda);
  }
  return 1.0;
}

std::string to_string(const Cutoff& c) {
  std::ostringstream os;
  os.precision(17);
  switch (c.family) {
    case CutoffFamily::Ohmic:
      return "ohmic";
    case CutoffFamily::SoftLorentzian:
      os << "soft_lorentzian(" << c.lambda << ")";
      break;
    case CutoffFamily::Exponential:
      os << "exponential(" << c.lambda << ")";
      break;
  }
  return os.str();
}

void BathSpec::validate() const {
  if (!(eta0 > 0.0) || !std::isfinite(eta0)) throw ConfigError("bath: eta0 must be positive and finite");
  if (!(temperature >= 0.0) || !std::isfinite(temperature))
    throw ConfigError("bath: temperature must be non-negative and finite");
  if (!(hbar >= 0.0) || !std::isfinite(hbar)) throw ConfigError("bath: hbar must be non-negative and finite");
  if (cutoff.family != CutoffFamily::Ohmic && (!(cutoff.lambda > 0.0) || !std::isfinite(cutoff.lambda)))
    throw ConfigError("bath: cutoff frequency must be positive and finite");
}

double density_of_states(const BathSpec& spec, double omega) {
  return 2.0 * spec.eta0 * spec.cutoff(omega);
}

double lorentz_sine_transform(double a) {
  if (a <= 0.0) return a == 0.0 ? 0.0 : -lorentz_sine_transform(-a);
  if (a < 1.0) {
    const double s = -2.0 * std::sinh(a) * (kEulerGamma + std::log(a)) + std::exp(-a) * ei_series_tail(a) -
                     std::exp(a) * ei_series_tail(-a);
    return 0.5 * s;
  }
  if (a < 40.0) {
    return 0.5 * (std::exp(-a) * std::expint(a) - std::exp(a) * std::expint(-a));
  }
  // Asymptotic: sum over even n of n! / a^{n+1}.
  double term = 1.0 / a;
  double sum = term;
  const double inv_a2 = 1.0 / (a * a);
  for (int n = 2; n < 60; n += 2) {
    const double next = term * (n - 1) * n * inv_a2;
    if (next > term) break;
    term = next;
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

std::complex<double> memory_kernel_ft(const BathSpec& spec, double omega) {
  const double eta0 = spec.eta0;
  switch (spec.cutoff.family) {
    case CutoffFamily::Ohmic:
      return {eta0, 0.0};
    case CutoffFamily::SoftLorentzian: {
      const double l = spec.cutoff.lambda;
      return eta0 * l / std::complex<double>(l, -omega);
    }
    case CutoffFamily::Exponential: {
      const double l = spec.cutoff.lambda;
      const double re = eta0 * std::exp(-std::abs(omega) / l);
      const double im = 2.0 * eta0 / std::numbers::pi * lorentz_sine_transform(omega / l);
      return {re, im};
    }
  }
  return {eta0, 0.0};
}

double symmetric_fdt_weight(const BathSpec& spec, double omega) {
  if (!spec.quantum()) return spec.temperature;
  const double half = 0.5 * spec.hbar * omega;
  if (spec.temperature == 0.0) return std::abs(half);
  return spec.temperature * z_coth_z(half / spec.temperature);
}

double fdt_kernel(const BathSpec& spec, double omega) {
  if (!spec.quantum()) return spec.temperature;
  return 0.5 * spec.hbar * omega + symmetric_fdt_weight(spec, omega);
}

double symmetric_psd(const BathSpec& spec, double omega) {
  return density_of_states(spec, omega) * symmetric_fdt_weight(spec, omega);
}

void MotorParams::validate() const {
  auto finite = [](double x) { return std::isfinite(x); };
  if (!(m > 0.0) || !finite(m)) throw ConfigError("params: mass must be positive");
  if (!(k >= 0.0) || !finite(k)) throw ConfigError("params: coupling k must be non-negative");
  if (!(b > 0.0) || !finite(b)) throw ConfigError("params: wavenumber b must be positive");
  if (!finite(v0)) throw ConfigError("params: V0 must be finite");
  if (!finite(phi)) throw ConfigError("params: phase must be finite");
  bath1.validate();
  bath2.validate();
  if (bath1.eta0 != bath2.eta0 || !(bath1.cutoff == bath2.cutoff))
    throw ConfigError("params: both baths must share eta0 and cutoff");
  if (bath1.hbar != bath2.hbar) throw ConfigError("params: both baths must share hbar");
}

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  std::uint64_t z = seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_double(std::uint64_t seed, double value) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &value, sizeof bits);
  return hash_combine(seed, bits);
}

std::uint64_t MotorParams::fingerprint() const {
  std::uint64_t h = 0x51ed270b27c4f3a1ULL;
  for (double x : {m, k, b, v0, phi}) h = hash_double(h, x);
  for (const BathSpec* s : {&bath1, &bath2}) {
    h = hash_double(h, s->eta0);
    h = hash_combine(h, static_cast<std::uint64_t>(s->cutoff.family));
    h = hash_double(h, s->cutoff.lambda);
    h = hash_double(h, s->temperature);
    h = hash_double(h, s->hbar);
  }
  return h;
}

MotorParams classical_limit(MotorParams p) {
  p.bath1.hbar = 0.0;
  p.bath2.hbar = 0.0;
  return p;
}

}  // namespace qmotor
