#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "qmotor/errors.hpp"
#include "qmotor/greens.hpp"

using namespace qmotor;
using qmotor::testing::fig2a;

namespace {

MotorParams with_cutoff(Cutoff c, double k = 1.0) {
  MotorParams p = fig2a(k);
  p.bath1.cutoff = p.bath2.cutoff = c;
  return p;
}

}  // namespace

TEST(GreenX, Examples) {
  const MotorParams p = fig2a();
  const auto g = green_x(p, 1.0);
  EXPECT_NEAR(g.real(), -0.5, 1e-16);
  EXPECT_NEAR(g.imag(), 0.5, 1e-16);
  EXPECT_THROW(green_x(p, 0.0), NumericalError);
  const auto a = green_x(p, 0.37), b = green_x(p, -0.37);
  EXPECT_EQ(a.real(), b.real());
  EXPECT_EQ(a.imag(), -b.imag());
  // |G~x|^2 -> 1/(m^2 w^4)
  EXPECT_NEAR(std::norm(green_x(p, 1e4)) * 1e16, 1.0, 1e-7);
}

TEST(GreenY, Examples) {
  const MotorParams p = fig2a();
  const auto s = green_y(p, 0.0);
  EXPECT_DOUBLE_EQ(s.real(), 0.5);
  EXPECT_EQ(s.imag(), 0.0);
  const auto g = green_y(p, 1.0);
  EXPECT_NEAR(g.real(), 0.5, 1e-15);
  EXPECT_NEAR(g.imag(), 0.5, 1e-15);
  const MotorParams free = fig2a(0.0);
  EXPECT_EQ(green_y(free, 1.3), green_x(free, 1.3));
  EXPECT_THROW(green_y(free, 0.0), NumericalError);
}

TEST(GreenTime, OhmicLimits) {
  const MotorParams p = fig2a();
  EXPECT_EQ(green_x_time(p, 0.0), 0.0);
  EXPECT_EQ(green_x_time(p, -1.0), 0.0);
  EXPECT_EQ(green_y_time(p, -1.0), 0.0);
  EXPECT_NEAR(green_x_time(p, 60.0), 1.0, 1e-15);
  MotorParams q = p;
  q.bath1.eta0 = q.bath2.eta0 = 2.5;
  EXPECT_NEAR(green_x_time(q, 100.0), 0.4, 1e-15);
}

TEST(GreenTime, FreeRelativeModeEqualsCenterOfMass) {
  const MotorParams p = fig2a(0.0);
  for (double t = 0.0; t <= 10.0; t += 0.25) EXPECT_NEAR(green_y_time(p, t), green_x_time(p, t), 1e-15);
}

TEST(GreenTime, YModeSatisfiesOscillatorEquation) {
  // Under-, critically and over-damped: m G'' + eta0 G' + 2k G = 0, G'(0+) = 1/m.
  for (double k : {1.0, 0.125, 0.01}) {
    const MotorParams p = fig2a(k);
    const double h = 1e-4;
    EXPECT_NEAR((green_y_time(p, h) - green_y_time(p, 0.0)) / h, 1.0, 1e-4);
    for (double t : {0.3, 1.0, 4.0}) {
      const double gm = green_y_time(p, t - h), g0 = green_y_time(p, t), gp = green_y_time(p, t + h);
      const double res = (gp - 2 * g0 + gm) / (h * h) + (gp - gm) / (2 * h) + 2 * k * g0;
      EXPECT_NEAR(res, 0.0, 1e-6) << "k=" << k << " t=" << t;
    }
  }
}

TEST(GreenTime, OhmicAgreesWithWideLorentzianInversion) {
  const MotorParams ohm = fig2a();
  // Corrections are O(eta0 / (m Lambda)).
  const MotorParams wide = with_cutoff(Cutoff::soft_lorentzian(1e3));
  for (double t : {0.01, 0.1, 1.0, 3.0, 10.0}) {
    const double gx = green_time_numerical(wide, Mode::X, t);
    const double gy = green_time_numerical(wide, Mode::Y, t);
    EXPECT_LT(std::abs(gx - green_x_time(ohm, t)), 2e-3 * green_x_time(ohm, t));
    EXPECT_LT(std::abs(gy - green_y_time(ohm, t)), 2e-4);
  }
}

TEST(GreenTime, LorentzianPolesMatchNumericalInversion) {
  // (2/pi) int Im G~ sin(2w) dw, 25-digit quadrature; eta0 = 1, Lambda = 5, k = 1.
  const MotorParams p = with_cutoff(Cutoff::soft_lorentzian(5.0));
  EXPECT_NEAR(green_x_time(p, 2.0), 0.92631052481944714, 1e-12);
  EXPECT_NEAR(green_y_time(p, 2.0), 0.063311677522165985, 1e-12);
  EXPECT_NEAR(green_time_numerical(p, Mode::Y, 2.0), 0.063311677522165985, 1e-9);
}

TEST(GreenTime, ExponentialCutoff) {
  const MotorParams p = with_cutoff(Cutoff::exponential(5.0));
  EXPECT_NEAR(green_x_time(p, 2.0), 1.0167950196955319, 1e-9);
  EXPECT_NEAR(green_y_time(p, 2.0), 0.047995621462143859, 1e-9);
}

TEST(FrequencyScales, ResonanceOfLightlyDampedMode) {
  MotorParams p = fig2a(2.0);
  p.bath1.eta0 = p.bath2.eta0 = 0.01;
  const auto s = frequency_scales(p);
  EXPECT_NEAR(s.resonance, 2.0, 1e-12);
  EXPECT_NEAR(s.resonance_width, 0.01, 1e-15);
}
