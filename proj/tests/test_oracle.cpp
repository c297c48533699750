#include <gtest/gtest.h>

#include "qbf/bcs.hpp"
#include "qbf/oracle.hpp"

using namespace qbf;

TEST(FockHamiltonian, HarmonicOscillatorLevels) {
  const auto t = fock_hamiltonian(build_form(CMatrix::Ones(1, 1), CMatrix::Zero(1, 1)), 3);
  EXPECT_EQ(t.dim, 4);
  CMatrix want = CMatrix::Zero(4, 4);
  want.diagonal() << 0.5, 1.5, 2.5, 3.5;
  EXPECT_LT((t.H - want).norm(), 1e-15);
}

TEST(FockHamiltonian, BasisOrderingIsLexicographic) {
  const auto t = fock_hamiltonian(bcs_form({1.0, 0.3, 0.5, 0.0}), 2);
  EXPECT_EQ(t.dim, 9);
  EXPECT_EQ(t.index({1, 2}), 5);
  EXPECT_EQ(t.occupation(5), (std::vector<int>{1, 2}));
  // <1,1| Delta b_+^+ b_-^+ |0,0> = Delta
  EXPECT_NEAR(std::abs(t.H(t.index({1, 1}), 0) - 0.5), 0.0, 1e-15);
  EXPECT_LT((t.H - t.H.adjoint()).norm(), 1e-15);
}

TEST(FockHamiltonian, DimensionCap) {
  try {
    fock_hamiltonian(bcs_form({1.0, 0.3, 0.5, 0.0}), 200);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionCap);
  }
}

TEST(FockHamiltonian, PairingGroundEnergyConverges) {
  // Independent Kronecker-product reference values.
  const auto f = bcs_form({1.0, 0.3, 0.5, 0.0});
  EXPECT_NEAR(ground_energy(f, 8), 0.8660254045107382, 1e-12);
  EXPECT_NEAR(ground_energy(f, 12), 0.8660254037844666, 1e-12);
  EXPECT_NEAR(ground_energy(f, 12), std::sqrt(0.75), 2e-4);
}

TEST(FockHamiltonian, UnboundedBelowDrifts) {
  const auto f = bcs_form({1.0, 0.3, 0.97, 0.0});
  const double want[] = {0.2600277335801212, 0.20674599277069394, 0.1404964667371687,
                         0.07477111638485173};
  const int cut[] = {8, 12, 16, 20};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(ground_energy(f, cut[i]), want[i], 1e-10);
}

TEST(FockSpectrumCheck, HarmonicOscillatorExact) {
  const auto c = fock_spectrum_check(build_form(CMatrix::Ones(1, 1), CMatrix::Zero(1, 1)), 8, 4);
  EXPECT_LT(c.max_deviation, 1e-12);
}

TEST(FockSpectrumCheck, PairingLattice) {
  const auto c = fock_spectrum_check(bcs_form({1.0, 0.3, 0.5, 0.0}), 14, 6);
  ASSERT_EQ(c.levels.size(), 6u);
  const double a = std::sqrt(0.75), lp = 0.3 + a, lm = -0.3 + a;
  // 2 lambda_- < lambda_+ here, so three quanta of the soft mode come before
  // lambda_+ + lambda_-.
  const double want[] = {a, a + lm, a + 2 * lm, a + lp, a + 3 * lm, a + lp + lm};
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(c.predicted[i], want[i], 1e-12);
  EXPECT_LT(c.max_deviation, 1e-3);
  EXPECT_TRUE(c.trend_from_above);
  EXPECT_EQ(c.ground_trend.size(), 4u);
}

TEST(FockSpectrumCheck, RejectsNonPositiveForms) {
  try {
    fock_spectrum_check(bcs_form({1.0, 0.3, 0.97, 0.0}), 10, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WrongRegime);
  }
}
