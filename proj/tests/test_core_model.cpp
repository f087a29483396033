#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ring_thermo/core_model.hpp"

namespace ring_thermo {
namespace {

const RingModel kUnit = RingModel::dimensionless(1.0);

TEST(Energy, ZeroCouplingCollapsesToSquares) {
  EXPECT_DOUBLE_EQ(energy(kUnit, Coupling::anisotropic(0.0), 2, 1), 4.0);
  EXPECT_DOUBLE_EQ(energy(kUnit, Coupling::isotropic(0.0), 3, 1), 16.0);
}

TEST(Energy, AnisotropicHalfIntegerOffset) {
  // 4 xi^2 = 3 makes the splitting exactly 2.
  EXPECT_NEAR(energy(kUnit, Coupling::anisotropic(std::sqrt(3.0) / 2), 0, 1), 0.25, 1e-15);
}

TEST(Energy, ScalesWithOmega) {
  const auto m = RingModel::dimensionless(2.5);
  EXPECT_DOUBLE_EQ(energy(m, Coupling::anisotropic(0.0), 3, 1), 22.5);
}

TEST(Energy, RejectsBadQuantumNumbers) {
  const auto c = Coupling::anisotropic(0.3);
  EXPECT_THROW(energy(kUnit, c, -1, 1), DomainError);
  EXPECT_THROW(energy(kUnit, c, 0, 0), DomainError);
  EXPECT_THROW(energy(kUnit, c, 0, 3), DomainError);
  EXPECT_THROW(spin_current_eigen(kUnit, c, -2), DomainError);
}

TEST(Energy, MatchesIndependentFormula) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> strength(0.0, 3.0);
  std::uniform_int_distribution<int> level(0, 60);
  for (int i = 0; i < 500; ++i) {
    const double x = strength(rng);
    const long n = level(rng);
    for (int s = 1; s <= 2; ++s) {
      for (bool aniso : {true, false}) {
        const auto c = aniso ? Coupling::anisotropic(x) : Coupling::isotropic(x);
        const double e = energy(kUnit, c, n, s);
        EXPECT_GE(e, 0.0);
        EXPECT_NEAR(e, static_cast<double>(oracle::level_energy(aniso, x, 1.0L, n, s)),
                    1e-12 * (1.0 + e));
      }
    }
  }
}

TEST(Energy, ZeroCouplingDegeneracyPattern) {
  const auto a = Coupling::anisotropic(0.0);
  const auto i = Coupling::isotropic(0.0);
  for (long n = 0; n <= 10; ++n) {
    const double nd = static_cast<double>(n);
    EXPECT_DOUBLE_EQ(energy(kUnit, a, n, 1), nd * nd);
    EXPECT_DOUBLE_EQ(energy(kUnit, a, n, 2), (nd - 1) * (nd - 1));
    EXPECT_DOUBLE_EQ(energy(kUnit, i, n, 1), (nd + 1) * (nd + 1));
    EXPECT_DOUBLE_EQ(energy(kUnit, i, n, 2), nd * nd);
  }
}

TEST(SpinShifts, DeltaExamples) {
  EXPECT_DOUBLE_EQ(delta_s(Coupling::anisotropic(0.0), 1), 0.0);
  EXPECT_DOUBLE_EQ(delta_s(Coupling::anisotropic(0.0), 2), 2.0);
  EXPECT_NEAR(delta_s(Coupling::anisotropic(std::sqrt(3.0) / 2), 2), 3.0, 1e-15);
}

TEST(SpinShifts, PsiExamples) {
  EXPECT_DOUBLE_EQ(psi_s(Coupling::isotropic(0.0), 1), 2.0);
  EXPECT_DOUBLE_EQ(psi_s(Coupling::isotropic(0.0), 2), 0.0);
  EXPECT_NEAR(psi_s(Coupling::isotropic(std::sqrt(3.0) / 2), 2), -1.0, 1e-15);
}

TEST(SpinShifts, VariantMismatch) {
  EXPECT_THROW(delta_s(Coupling::isotropic(0.1), 1), VariantMismatch);
  EXPECT_THROW(psi_s(Coupling::anisotropic(0.1), 2), VariantMismatch);
}

TEST(SpinShifts, SignsSumsAndGapGrowth) {
  double last_gap = -1.0;
  for (int k = 0; k <= 200; ++k) {
    const double x = 0.025 * k;
    const auto a = Coupling::anisotropic(x);
    const auto i = Coupling::isotropic(x);
    EXPECT_LE(delta_s(a, 1), 0.0);
    EXPECT_GE(delta_s(a, 2), 0.0);
    EXPECT_NEAR(delta_s(a, 1) + delta_s(a, 2), 2.0, 1e-12);
    EXPECT_NEAR(psi_s(i, 1) + psi_s(i, 2), 2.0, 1e-12);
    EXPECT_GE(psi_s(i, 1), 2.0);
    if (x > 0) EXPECT_LT(psi_s(i, 2), 0.0);
    const double gap = delta_s(a, 2) - delta_s(a, 1);
    EXPECT_GT(gap, last_gap);
    last_gap = gap;
  }
}

TEST(SpinCurrent, Examples) {
  EXPECT_DOUBLE_EQ(spin_current_eigen(kUnit, Coupling::anisotropic(0.7), 0), -0.25);
  EXPECT_DOUBLE_EQ(spin_current_eigen(kUnit, Coupling::isotropic(2.0), 0), -0.25);
  EXPECT_DOUBLE_EQ(spin_current_eigen(kUnit, Coupling::anisotropic(0.0), 1), 0.25);
  EXPECT_NEAR(spin_current_eigen(kUnit, Coupling::anisotropic(std::sqrt(3.0) / 2), 1), 0.0, 1e-15);
}

TEST(SpinCurrent, PrefactorUsesMassTimesRadius) {
  const auto m = RingModel::dimensionless(1.0, 2.0, 1.0);
  EXPECT_DOUBLE_EQ(spin_current_eigen(m, Coupling::anisotropic(0.0), 0), -0.125);
}

TEST(SpinCurrent, StrictlyIncreasingInN) {
  for (double x : {0.0, 0.3, 1.2, 10.0, 1e3}) {
    for (auto c : {Coupling::anisotropic(x), Coupling::isotropic(x)}) {
      for (long n = 0; n < 50; ++n)
        EXPECT_LT(spin_current_eigen(kUnit, c, n), spin_current_eigen(kUnit, c, n + 1));
    }
  }
}

TEST(SpinCurrent, SameKernelForBothVariantsAtZeroCoupling) {
  for (long n = 0; n < 100; ++n)
    EXPECT_NEAR(spin_current_eigen(kUnit, Coupling::anisotropic(0.0), n),
                spin_current_eigen(kUnit, Coupling::isotropic(0.0), n), 1e-10);
}

TEST(RingModel, PhysicalModeDerivesOmega) {
  const auto m = RingModel::physical(kElectronMass, 50.0);
  EXPECT_EQ(m.unit_mode(), UnitMode::Physical);
  EXPECT_NEAR(m.omega() * 2.0 * m.mass() * m.radius() * m.radius(), 1.0, 1e-12);
  // 50 nm ring: omega ~ 1.5e-5 eV.
  EXPECT_NEAR(m.omega(), 1.524e-5, 1e-8);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> r(0.1, 500.0);
  for (int i = 0; i < 100; ++i) {
    const auto p = RingModel::physical(kElectronMass, r(rng));
    EXPECT_NEAR(p.omega() * 2.0 * p.mass() * p.radius() * p.radius(), 1.0, 1e-12);
  }
}

TEST(RingModel, RejectsNonPositiveParameters) {
  EXPECT_THROW(RingModel::dimensionless(0.0), DomainError);
  EXPECT_THROW(RingModel::dimensionless(1.0, -1.0), DomainError);
  EXPECT_THROW(RingModel::physical(kElectronMass, 0.0), DomainError);
  EXPECT_THROW(RingModel::dimensionless(std::nan("")), DomainError);
  EXPECT_THROW(Coupling::anisotropic(-0.1), DomainError);
}

TEST(Coupling, ThetaIsPrincipalBranch) {
  EXPECT_DOUBLE_EQ(Coupling::anisotropic(0.0).theta(), 0.0);
  EXPECT_NEAR(std::cos(Coupling::isotropic(std::sqrt(3.0) / 2).theta()), 0.5, 1e-15);
  EXPECT_LT(Coupling::anisotropic(1e9).theta(), M_PI / 2);
}

}  // namespace
}  // namespace ring_thermo
