#include "qmotor/greens.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "qmotor/errors.hpp"

namespace qmotor {

namespace {

using cd = std::complex<double>;

// sin(sqrt(q) t)/sqrt(q), sinh(sqrt(-q) t)/sqrt(-q), or t at q = 0.
double oscillator_kernel(double q, double t) {
  const double x = q * t * t;
  if (std::abs(x) < 1e-4) return t * (1.0 - x / 6.0 + x * x / 120.0);
  if (q > 0.0) {
    const double w = std::sqrt(q);
    return std::sin(w * t) / w;
  }
  const double w = std::sqrt(-q);
  return std::sinh(w * t) / w;
}

// Overdamped sinh growth times e^{-gamma t/2}, written as a difference of
// decaying exponentials so that large t does not overflow.
double damped_oscillator(double q, double gamma, double t) {
  if (q < 0.0 && q * t * t < -1e-4) {
    const double w = std::sqrt(-q);
    const double slow = std::exp((w - 0.5 * gamma) * t);
    const double fast = std::exp((-w - 0.5 * gamma) * t);
    return 0.5 * (slow - fast) / w;
  }
  return std::exp(-0.5 * gamma * t) * oscillator_kernel(q, t);
}

// Roots and residues of (s + L) / P(s), P(s) = m s^3 + m L s^2 + (2k + eta0 L) s + 2k L.
struct PoleExpansion {
  std::array<cd, 3> pole;
  std::array<cd, 3> residue;
  bool well_separated = true;
};

PoleExpansion lorentzian_poles(double m, double eta0, double lambda, double k) {
  const double a3 = m, a2 = m * lambda, a1 = 2.0 * k + eta0 * lambda, a0 = 2.0 * k * lambda;
  auto P = [&](double s) { return ((a3 * s + a2) * s + a1) * s + a0; };
  auto dP = [&](cd s) { return (3.0 * a3 * s + 2.0 * a2) * s + a1; };

  // One real root on (-inf, 0]: P(0) = a0 >= 0 and P -> -inf.
  double r = 0.0;
  if (a0 > 0.0) {
    double lo = -(1.0 + std::max({a2 / a3, a1 / a3, a0 / a3}));
    double hi = 0.0;
    for (int it = 0; it < 400 && hi - lo > 1e-300; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (P(mid) > 0.0 ? hi : lo) = mid;
    }
    r = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {
      const double d = dP(cd(r)).real();
      if (d == 0.0) break;
      r -= P(r) / d;
    }
  }
  // Deflate to b2 s^2 + b1 s + b0.
  const double b2 = a3;
  const double b1 = a2 + r * b2;
  const double b0 = a1 + r * b1;
  const cd disc = std::sqrt(cd(b1 * b1 - 4.0 * b2 * b0));
  const cd qv = -0.5 * (cd(b1) + (b1 >= 0.0 ? disc : -disc));
  cd s1 = qv / b2;
  cd s2 = (std::abs(qv) > 0.0) ? cd(b0) / qv : cd(0.0);

  PoleExpansion out;
  out.pole = {cd(r), s1, s2};
  double scale = 0.0;
  for (const cd& s : out.pole) scale = std::max(scale, std::abs(s));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j)
      if (std::abs(out.pole[i] - out.pole[j]) < 1e-5 * scale) out.well_separated = false;
  for (std::size_t i = 0; i < 3; ++i) out.residue[i] = (out.pole[i] + lambda) / dP(out.pole[i]);
  return out;
}

double pole_sum(const PoleExpansion& pe, double t) {
  cd sum = 0.0;
  for (std::size_t i = 0; i < 3; ++i) sum += pe.residue[i] * std::exp(pe.pole[i] * t);
  return sum.real();
}

// Damped resonance of the y-mode: root of m w^2 - w Im eta~(w) - 2k near sqrt(2k/m).
double y_resonance(const MotorParams& p) {
  const double w0 = std::sqrt(2.0 * p.k / p.m);
  auto f = [&](double w) { return p.m * w * w - w * memory_kernel_ft(p.bath1, w).imag() - 2.0 * p.k; };
  double w = w0;
  for (int it = 0; it < 30; ++it) {
    const double h = 1e-6 * w;
    const double d = (f(w + h) - f(w - h)) / (2.0 * h);
    if (!(d > 0.0)) break;
    const double next = w - f(w) / d;
    if (!(next > 0.0) || !std::isfinite(next)) break;
    if (std::abs(next - w) < 1e-14 * w) {
      w = next;
      break;
    }
    w = next;
  }
  return (w > 0.0 && std::isfinite(w)) ? w : w0;
}

}  // namespace

double y_detuning(const MotorParams& p, double omega) {
  const double wk = std::sqrt(2.0 * p.k / p.m);
  return p.m * (omega - wk) * (omega + wk);
}

ModeDenominators mode_denominators(const MotorParams& p, double omega) {
  const cd eta = memory_kernel_ft(p.bath1, omega);
  const double shift = omega * eta.imag();
  const double damp = omega * eta.real();
  return {cd(p.m * omega * omega - shift, damp), cd(y_detuning(p, omega) - shift, damp)};
}

std::complex<double> green_x(const MotorParams& p, double omega) {
  if (omega == 0.0) throw NumericalError("green_x: pole at omega = 0");
  return -1.0 / mode_denominators(p, omega).dx;
}

std::complex<double> green_y(const MotorParams& p, double omega) {
  if (omega == 0.0 && p.k == 0.0) throw NumericalError("green_y: pole at omega = 0 for k = 0");
  return -1.0 / mode_denominators(p, omega).dy;
}

spectral::FrequencyScales frequency_scales(const MotorParams& p) {
  spectral::FrequencyScales s;
  s.features.push_back(p.bath1.eta0 / p.m);
  if (p.k > 0.0) {
    s.features.push_back(std::sqrt(2.0 * p.k / p.m));
    const double wr = y_resonance(p);
    s.resonance = wr;
    s.resonance_width = memory_kernel_ft(p.bath1, wr).real() / p.m;
  }
  if (p.bath1.cutoff.family != CutoffFamily::Ohmic) s.features.push_back(p.bath1.cutoff.lambda);
  if (p.quantum())
    for (const BathSpec* b : {&p.bath1, &p.bath2})
      if (b->temperature > 0.0) s.features.push_back(b->temperature / b->hbar);
  return s;
}

bool green_time_closed_form(const MotorParams& p) {
  switch (p.bath1.cutoff.family) {
    case CutoffFamily::Ohmic:
      return true;
    case CutoffFamily::SoftLorentzian: {
      const double L = p.bath1.cutoff.lambda;
      return lorentzian_poles(p.m, p.bath1.eta0, L, 0.0).well_separated &&
             (p.k == 0.0 || lorentzian_poles(p.m, p.bath1.eta0, L, p.k).well_separated);
    }
    case CutoffFamily::Exponential:
      return false;
  }
  return false;
}

double green_time_numerical(const MotorParams& p, Mode mode, double tau, double rel_tol, double* error) {
  if (error) *error = 0.0;
  if (tau <= 0.0) return 0.0;
  const double k2 = (mode == Mode::Y) ? 2.0 * p.k : 0.0;
  // Im G~ = Im D / |D|^2. For x the explicit factor w cancels against sin(w tau).
  auto im_g = [&](double w) {
    const cd d = k2 == 0.0 ? mode_denominators(p, w).dx : mode_denominators(p, w).dy;
    return d.imag() / std::norm(d);
  };
  auto full = [&](double w, quad::Vec<1>& out) {
    double v;
    if (k2 == 0.0) {
      const cd eta = memory_kernel_ft(p.bath1, w);
      const cd red(p.m * w - eta.imag(), eta.real());  // D / w
      v = red.imag() / std::norm(red) * (std::sin(w * tau) / w);
    } else {
      v = im_g(w) * std::sin(w * tau);
    }
    out[0] = 2.0 / std::numbers::pi * v;
  };
  auto tail = [&](double w, spectral::TailCoefficients<1>& c) {
    c.p[0] = 0.0;
    c.q[0] = 0.0;
    c.r[0] = 2.0 / std::numbers::pi * im_g(w);
  };
  quad::Tolerance<1> tol;
  tol.rel = rel_tol;
  tol.abs = {1e-2 * rel_tol / p.bath1.eta0};
  const auto r = spectral::fourier_half_line<1>(full, tail, tau, frequency_scales(p), tol);
  if (!r.converged)
    throw NumericalError("green_time_numerical: quadrature did not converge on omega in [" +
                         std::to_string(r.worst_lo) + ", " + std::to_string(r.worst_hi) + "]");
  if (error) *error = r.error[0];
  return r.value[0];
}

double green_x_time(const MotorParams& p, double tau) {
  if (tau <= 0.0) return 0.0;
  const double eta0 = p.bath1.eta0;
  switch (p.bath1.cutoff.family) {
    case CutoffFamily::Ohmic:
      return -std::expm1(-eta0 / p.m * tau) / eta0;
    case CutoffFamily::SoftLorentzian: {
      const auto pe = lorentzian_poles(p.m, eta0, p.bath1.cutoff.lambda, 0.0);
      if (pe.well_separated) return pole_sum(pe, tau);
      break;
    }
    case CutoffFamily::Exponential:
      break;
  }
  return green_time_numerical(p, Mode::X, tau);
}

double green_y_time(const MotorParams& p, double tau) {
  if (tau <= 0.0) return 0.0;
  if (p.k == 0.0) return green_x_time(p, tau);
  const double eta0 = p.bath1.eta0;
  switch (p.bath1.cutoff.family) {
    case CutoffFamily::Ohmic: {
      const double gamma = eta0 / p.m;
      const double q = 2.0 * p.k / p.m - 0.25 * gamma * gamma;
      return damped_oscillator(q, gamma, tau) / p.m;
    }
    case CutoffFamily::SoftLorentzian: {
      const auto pe = lorentzian_poles(p.m, eta0, p.bath1.cutoff.lambda, p.k);
      if (pe.well_separated) return pole_sum(pe, tau);
      break;
    }
    case CutoffFamily::Exponential:
      break;
  }
  return green_time_numerical(p, Mode::Y, tau);
}

}  // namespace qmotor
