#pragma once

// Half-line Fourier integrals  int_0^inf dw  h(w; tau)  where
//   h(w; tau) = P(w) + Q(w) cos(w tau) + R(w) sin(w tau)
// for integrands that are smooth power laws (or faster) beyond the largest
// physical frequency scale.
//
// [0, W] is integrated with Gauss-Kronrod panels placed on a log grid through
// the physical scales, refined around the oscillator resonance, and never
// wider than one period 2pi/|tau|. Beyond W the non-oscillatory part P is
// integrated after the substitution w = W/u, and the oscillatory part by
// three terms of the integration-by-parts expansion
//   int_W^inf g e^{i w tau} = -e^{i W tau} sum_j (-1)^j g^(j)(W) / (i tau)^{j+1},
// with g = Q - iR. W is chosen so that W|tau| >= 400, which makes the
// neglected terms smaller than 1e-6 of the retained ones.

#include <cmath>
#include <complex>
#include <vector>

#include "qmotor/quadrature.hpp"

namespace qmotor::spectral {

struct FrequencyScales {
  std::vector<double> features;  // characteristic angular frequencies, > 0
  double resonance = 0.0;        // lightly damped oscillator frequency, 0 if none
  double resonance_width = 0.0;
  double max_feature() const;
  double min_feature() const;
};

/// Upper end of the explicitly integrated range for lag tau.
double panel_limit(const FrequencyScales& scales, double tau);

/// Panel edges on [0, W] for lag tau (see file comment).
std::vector<double> frequency_breakpoints(const FrequencyScales& scales, double tau, double W);

template <std::size_t N>
struct TailCoefficients {
  quad::Vec<N> p{}, q{}, r{};
};

/// full(w, out): the complete integrand at (w, tau) written in a numerically
/// stable form. tail(w, coeffs): its P/Q/R decomposition, used only for w >= W.
template <std::size_t N, class Full, class Tail>
quad::Result<N> fourier_half_line(const Full& full, const Tail& tail, double tau, const FrequencyScales& scales,
                                  const quad::Tolerance<N>& tol) {
  const double W = panel_limit(scales, tau);
  const std::vector<double> bp = frequency_breakpoints(scales, tau, W);
  quad::Result<N> main = quad::integrate<N>(full, bp, tol);

  // Non-oscillatory tail (plus Q at tau = 0, where cos = 1).
  const bool at_zero = (tau == 0.0);
  static constexpr double kTailEdges[] = {0.0, 1e-4, 1e-3, 1e-2, 0.1, 0.3, 1.0};
  quad::Tolerance<N> ttol = tol;
  auto tail_p = [&](double u, quad::Vec<N>& out) {
    const double w = W / u;
    TailCoefficients<N> c;
    tail(w, c);
    const double jac = W / (u * u);
    for (std::size_t j = 0; j < N; ++j) out[j] = (c.p[j] + (at_zero ? c.q[j] : 0.0)) * jac;
  };
  quad::Result<N> ptail = quad::integrate<N>(tail_p, kTailEdges, ttol);

  quad::Result<N> out = main;
  out.evaluations += ptail.evaluations;
  out.converged = main.converged && ptail.converged;
  for (std::size_t j = 0; j < N; ++j) {
    out.value[j] += ptail.value[j];
    out.error[j] += ptail.error[j];
  }
  if (at_zero) return out;

  // Oscillatory tail by integration by parts.
  const double h = 1e-2 * W;
  TailCoefficients<N> c0, cm, cp;
  tail(W, c0);
  tail(W - h, cm);
  tail(W + h, cp);
  out.evaluations += 3;
  const std::complex<double> itau(0.0, tau);
  const std::complex<double> phase = std::exp(std::complex<double>(0.0, W * tau));
  for (std::size_t j = 0; j < N; ++j) {
    const std::complex<double> g0(c0.q[j], -c0.r[j]);
    const std::complex<double> gm(cm.q[j], -cm.r[j]);
    const std::complex<double> gp(cp.q[j], -cp.r[j]);
    const std::complex<double> g1 = (gp - gm) / (2.0 * h);
    const std::complex<double> g2 = (gp - 2.0 * g0 + gm) / (h * h);
    const std::complex<double> t0 = g0 / itau;
    const std::complex<double> t1 = -g1 / (itau * itau);
    const std::complex<double> t2 = g2 / (itau * itau * itau);
    const std::complex<double> sum = -phase * (t0 + t1 + t2);
    out.value[j] += sum.real();
    out.error[j] += std::abs(t2) + 1e-4 * std::abs(t1);
  }
  return out;
}

}  // namespace qmotor::spectral
