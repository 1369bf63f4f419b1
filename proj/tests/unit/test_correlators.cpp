#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <complex>
#include <numbers>

#include "fixtures.hpp"
#include "qmotor/correlators.hpp"
#include "qmotor/errors.hpp"

using namespace qmotor;
using qmotor::testing::fig2a;

namespace {

// 25-digit frequency integrals at hbar = m = eta0 = b = 1, k = 1, T1 = 1, T2 = 2.5.
constexpr double kC12At1 = 1.3001260624383118;
constexpr double kC21At1 = 2.5473891855467392;
constexpr double kC11At1 = 1.1403130789755641;
constexpr double kC22At1 = 1.4229223451676023;
constexpr double kA12At1 = 0.046911260673800079;
constexpr double kC12At0 = 1.8545439966626548;
constexpr double kC12At2p5 = 2.6513676449548017;

MotorParams swapped(MotorParams p) {
  std::swap(p.bath1.temperature, p.bath2.temperature);
  return p;
}

}  // namespace

TEST(Kernels, MatchHighPrecisionOracle) {
  const KernelEvaluator eval(fig2a());
  const KernelValues v = eval(1.0);
  EXPECT_NEAR(v.c12, kC12At1, 1e-11);
  EXPECT_NEAR(v.c21, kC21At1, 1e-11);
  EXPECT_NEAR(v.c11, kC11At1, 1e-11);
  EXPECT_NEAR(v.c22, kC22At1, 1e-11);
  EXPECT_NEAR(v.a12, kA12At1, 1e-12);
  EXPECT_NEAR(eval(0.0).c12, kC12At0, 1e-11);
  EXPECT_NEAR(eval(2.5).c12, kC12At2p5, 1e-11);
}

TEST(Kernels, WrappersAgreeWithEvaluator) {
  const MotorParams p = fig2a();
  const auto [c12, c21] = msd_cross(p, 1.0);
  EXPECT_NEAR(c12, kC12At1, 1e-11);
  EXPECT_NEAR(c21, kC21At1, 1e-11);
  EXPECT_NEAR(msd_self(p, 1.0, 1), kC11At1, 1e-11);
  EXPECT_NEAR(msd_self(p, 1.0, 2), kC22At1, 1e-11);
  EXPECT_NEAR(commutator_a12(p, 1.0), kA12At1, 1e-12);
  EXPECT_THROW(msd_self(p, 1.0, 3), ConfigError);
}

TEST(Kernels, ZeroLag) {
  const KernelValues v = KernelEvaluator(fig2a())(0.0);
  EXPECT_EQ(v.a12, 0.0);
  EXPECT_EQ(v.a11, 0.0);
  EXPECT_EQ(v.c11, 0.0);
  EXPECT_EQ(v.c22, 0.0);
  EXPECT_EQ(v.c12, v.c21);
  EXPECT_GT(v.c12, 0.0);
}

TEST(Kernels, ClassicalCommutatorVanishes) {
  const MotorParams p = classical_limit(fig2a());
  for (double t : {0.5, 3.0}) {
    EXPECT_EQ(commutator_a12(p, t), 0.0);
    EXPECT_EQ(commutator_a11(p, t), 0.0);
  }
}

TEST(Kernels, EqualTemperaturesAreSymmetric) {
  MotorParams p = fig2a();
  p.bath2.temperature = p.bath1.temperature;
  const KernelEvaluator eval(p);
  for (double t : {0.1, 1.0, 2.5, 10.0}) {
    const KernelValues v = eval(t);
    EXPECT_NEAR(v.c12, v.c21, 1e-10 * v.c12);
    EXPECT_NEAR(v.c11, v.c22, 1e-10 * v.c11);
  }
}

TEST(Kernels, OddAndReflectedUnderLagReversal) {
  const KernelEvaluator eval(fig2a());
  for (double t : {0.3, 1.7, 6.0}) {
    const KernelValues a = eval(t), b = eval(-t);
    EXPECT_NEAR(a.a12, -b.a12, 1e-12);
    EXPECT_NEAR(a.c21, b.c12, 1e-10 * a.c21);
    EXPECT_NEAR(a.c11, b.c11, 1e-10 * a.c11);
  }
}

TEST(Kernels, TemperatureSwap) {
  const KernelEvaluator eval(fig2a()), sw(swapped(fig2a()));
  for (double t : {0.4, 2.0}) {
    const KernelValues a = eval(t), b = sw(t);
    EXPECT_NEAR(a.c12, b.c21, 1e-10 * a.c12);
    EXPECT_NEAR(a.c21, b.c12, 1e-10 * a.c21);
    EXPECT_NEAR(a.c11, b.c22, 1e-10 * a.c11);
    EXPECT_NEAR(a.a12, b.a12, 1e-12);
  }
}

TEST(Kernels, SelfDisplacementIsDiffusive) {
  const KernelEvaluator eval(fig2a());
  EXPECT_GT(eval(100.0).c11, eval(10.0).c11);
  // Classical x-mode: c11 + c22 ~ 2 b^2 (T1 + T2)/(2 eta0) tau at long lags.
  const KernelEvaluator cl(classical_limit(fig2a()));
  const double slope = (cl(200.0).c11 + cl(200.0).c22 - cl(100.0).c11 - cl(100.0).c22) / 100.0;
  EXPECT_NEAR(slope, 3.5, 1e-6);
}

TEST(Kernels, DecoupledRelativeModeDiffuses) {
  const KernelValues v = KernelEvaluator(fig2a(0.0))(1.0);
  EXPECT_TRUE(std::isinf(v.c12));
  EXPECT_EQ(v.a12, 0.0);
  EXPECT_EQ(v.gx, v.gy);
}

TEST(Kernels, ClassicalCrossKernelMatchesReimplementation) {
  // Classical c12 - c21 = (2 b^2/pi) int 2 eta0 (T1 - T2) J sin(w t), J = Im G~x conj(G~y),
  // evaluated here by a plain composite Simpson rule on a truncated range.
  const MotorParams p = classical_limit(fig2a());
  const double t = 1.3;
  const KernelValues v = KernelEvaluator(p)(t);
  auto f = [&](double w) {
    const std::complex<double> dx(w * w, w), dy(w * w - 2.0, w);
    const double j = std::imag(std::conj(dx) * dy) / (std::norm(dx) * std::norm(dy));
    return 2.0 * (1.0 - 2.5) * j * std::sin(w * t);
  };
  const int n = 2000000;
  const double hi = 400.0, h = hi / n;
  double s = f(1e-12) + f(hi);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  s *= h / 3.0;
  const double ref = 2.0 / std::numbers::pi * s;
  EXPECT_NEAR(v.c12 - v.c21, ref, 1e-9);
}

TEST(Kernels, NarrowResonanceConverges) {
  // Trapped-ion setting (Omega = 1271 kHz, eta0/m = 10 Hz, Lambda = 100 kHz) in reduced
  // units; the y-mode resonance has a relative width near 2e-8.
  MotorParams p;
  p.m = 40.0;
  p.k = 7771.7157374173185;
  p.b = 10.0;
  p.v0 = 0.25;
  for (BathSpec* b : {&p.bath1, &p.bath2}) {
    b->eta0 = 0.0043867501410709501;
    b->hbar = 0.69648211837411855;
    b->cutoff = Cutoff::soft_lorentzian(1.0966875352677374);
  }
  p.bath1.temperature = 1.0;
  p.bath2.temperature = 2.5;
  const KernelEvaluator eval(p);
  EXPECT_NO_THROW(eval(0.0));
  EXPECT_NO_THROW(eval(0.5));
}

TEST(CorrelatorTable, BuildCheckAndInterpolate) {
  const MotorParams p = fig2a();
  const CorrelatorTable t = build_table(p, 20.0, 256);
  EXPECT_EQ(t.params_hash, p.fingerprint());
  EXPECT_EQ(t.tau.size(), t.panel_count() * CorrelatorTable::kNodesPerPanel + 1);
  EXPECT_NO_THROW(t.check_invariants(p));
  const KernelValues at1 = t.interpolate(1.0);
  EXPECT_NEAR(at1.c12, kC12At1, 1e-4);
  const KernelValues neg = t.interpolate(-1.0);
  EXPECT_NEAR(neg.c12, at1.c21, 1e-12);
  EXPECT_NEAR(neg.a12, -at1.a12, 1e-12);
  EXPECT_EQ(neg.gx, 0.0);
  EXPECT_THROW(build_table(p, 20.0, 8), ConfigError);
}

TEST(CorrelatorTable, EquilibriumAndDecoupled) {
  MotorParams eq = fig2a();
  eq.bath2.temperature = 1.0;
  const CorrelatorTable t = build_table(eq, 10.0, 32);
  double worst = 0.0;
  for (const auto& v : t.values) worst = std::max(worst, std::abs(v.c12 - v.c21) / std::max(1.0, v.c12));
  EXPECT_LT(worst, 1e-10);
  const CorrelatorTable free = build_table(fig2a(0.0), 10.0, 32);
  for (const auto& v : free.values) EXPECT_EQ(v.a12, 0.0);
}

TEST(CorrelatorTable, InvariantViolationIsReported) {
  const MotorParams p = fig2a();
  CorrelatorTable t = build_table(p, 5.0, 16);
  t.values[3].c11 = -1.0;
  EXPECT_THROW(t.check_invariants(p), NumericalError);
}

TEST(CorrelatorTable, JsonRoundTrip) {
  const MotorParams p = fig2a(0.0);
  const CorrelatorTable t = build_table(p, 5.0, 16);
  const auto path = std::filesystem::temp_directory_path() / "qmotor_table_roundtrip.json";
  save_table(t, path);
  const CorrelatorTable r = load_table(path);
  std::filesystem::remove(path);
  EXPECT_EQ(r.params_hash, t.params_hash);
  ASSERT_EQ(r.tau.size(), t.tau.size());
  for (std::size_t i = 0; i < t.tau.size(); ++i) {
    EXPECT_EQ(r.tau[i], t.tau[i]);
    for (std::size_t j = 0; j < KernelValues::kCount; ++j) {
      if (std::isinf(t.values[i][j]))
        EXPECT_TRUE(std::isinf(r.values[i][j]));
      else
        EXPECT_EQ(r.values[i][j], t.values[i][j]);
    }
  }
}
