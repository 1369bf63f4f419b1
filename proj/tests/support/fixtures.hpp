#pragma once

#include <cmath>
#include <numbers>

#include "qmotor/bath.hpp"

namespace qmotor::testing {

// hbar = m = k_B = eta0 = b = 1, Ohmic, T1 = theta, T2 = 2.5 theta.
inline MotorParams fig2a(double k = 1.0, double theta = 1.0, double v0 = 0.5) {
  MotorParams p;
  p.m = 1.0;
  p.k = k;
  p.b = 1.0;
  p.v0 = v0;
  p.phi = std::numbers::pi / 2;
  p.bath1.eta0 = p.bath2.eta0 = 1.0;
  p.bath1.hbar = p.bath2.hbar = 1.0;
  p.bath1.temperature = theta;
  p.bath2.temperature = 2.5 * theta;
  return p;
}

inline BathSpec ohmic_bath(double t, double hbar = 1.0, double eta0 = 1.0) {
  BathSpec b;
  b.eta0 = eta0;
  b.temperature = t;
  b.hbar = hbar;
  return b;
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

}  // namespace qmotor::testing
