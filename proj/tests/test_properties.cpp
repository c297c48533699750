#include <gtest/gtest.h>

#include <random>

#include "qbf/bcs.hpp"
#include "qbf/oracle.hpp"
#include "random_forms.hpp"

using namespace qbf;

namespace {

// Distance between two eigenvalue multisets by greedy nearest matching.
double multiset_distance(std::vector<cplx> a, std::vector<cplx> b) {
  double worst = 0.0;
  for (const auto& x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](cplx p, cplx q) {
      return std::abs(p - x) < std::abs(q - x);
    });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

std::vector<QuadraticForm> sample(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> modes(1, 4);
  std::uniform_real_distribution<double> shift(-0.2, 1.0), pairing(0.0, 1.5);
  std::vector<QuadraticForm> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(gen::random_form(rng, modes(rng), shift(rng), pairing(rng)));
  }
  return out;
}

}  // namespace

TEST(Properties, SpectrumSymmetricUnderNegationAndConjugation) {
  for (const auto& f : sample(101, 60)) {
    const auto s = eigen_pairs(dynamical_matrix(f));
    std::vector<cplx> neg, conj;
    for (auto z : s.eigenvalues) {
      neg.push_back(-z);
      conj.push_back(std::conj(z));
    }
    EXPECT_LT(multiset_distance(s.eigenvalues, neg), 1e-9 * s.scale);
    EXPECT_LT(multiset_distance(s.eigenvalues, conj), 1e-9 * s.scale);
  }
}

TEST(Properties, SquareRootIdentityOnPositiveForms) {
  std::mt19937_64 rng(202);
  for (int rep = 0; rep < 30; ++rep) {
    const auto f = gen::random_form_in(rng, 3, Stability::PositiveDefinite);
    const CMatrix h = extended_matrix(f).H;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    const CMatrix root = es.operatorSqrt();
    Eigen::SelfAdjointEigenSolver<CMatrix> hs(root * metric(3) * root, Eigen::EigenvaluesOnly);
    std::vector<cplx> a, b;
    for (double x : hs.eigenvalues()) a.push_back(x);
    const auto s = eigen_pairs(dynamical_matrix(f));
    for (auto z : s.eigenvalues) {
      EXPECT_LT(std::abs(z.imag()), 1e-9);
      b.push_back(z);
    }
    EXPECT_LT(multiset_distance(a, b), 1e-9);
  }
}

TEST(Properties, TransformIdentities) {
  int checked = 0;
  for (const auto& f : sample(303, 80)) {
    const auto r = classify(f);
    if (!r.transform) continue;
    ++checked;
    const auto& bt = *r.transform;
    const int n = bt.n_modes();
    const CMatrix m = metric(n);
    const double tol = 1e-9 * std::max(1.0, bt.W.norm() * bt.W.norm());
    EXPECT_LT(bt.symplectic_residual, tol);
    EXPECT_LT(bt.inverse_residual, tol);
    // Orthogonality: bar(W) M W = M, i.e. bar(W_j) M W_i = 0 unless j = ibar.
    EXPECT_LT((bar(bt.W) * m * bt.W - m).norm(), tol);
    // bar(W) H W = diag(lambda, lambda)
    const CMatrix d = bar(bt.W) * extended_matrix(f).H * bt.W;
    CMatrix want = CMatrix::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) want(i, i) = want(n + i, n + i) = bt.lambdas[i];
    EXPECT_LT((d - want).norm(), tol * std::max(1.0, extended_matrix(f).H.norm()));
    // Eigenvector residuals and the conjugate map.
    const CMatrix ht = dynamical_matrix(f).Ht;
    for (int i = 0; i < n; ++i) {
      const CVector w = bt.W.col(i);
      EXPECT_LT((ht * w - bt.lambdas[i] * w).norm(), tol * ht.norm());
      const CVector c = conj_swap(w);
      EXPECT_LT((ht * c + std::conj(bt.lambdas[i]) * c).norm(), tol * ht.norm());
    }
    if (r.classification != Stability::UnstableComplex) {
      EXPECT_LT((bar(bt.W) - bt.W.adjoint()).norm(), tol);
    }
  }
  EXPECT_GT(checked, 40);
}

TEST(Properties, AdjointRelationHoldsOnlyForRealModes) {
  int real_seen = 0, complex_seen = 0;
  for (const auto& f : sample(404, 80)) {
    const auto r = classify(f);
    if (!r.transform) continue;
    const auto df = diagonal_form(*r.transform);
    const int n = df.n_modes();
    for (int i = 0; i < n; ++i) {
      // b'_i^+ = Z^+ conj(row)^t, bbar'_i = Z^+ col.
      const Eigen::RowVectorXcd adj = df.extract_b.row(i).conjugate();
      const Eigen::RowVectorXcd bb = df.extract_bbar.col(i).transpose();
      const double gap = (adj - bb).norm();
      if (std::abs(df.lambdas[i].imag()) <= 1e-9) {
        ++real_seen;
        EXPECT_LT(gap, 1e-8 * std::max(1.0, bb.norm()));
        EXPECT_TRUE(df.hermitian_flags[i]);
      } else {
        ++complex_seen;
        EXPECT_GT(gap, 1e-6);
        EXPECT_FALSE(df.hermitian_flags[i]);
      }
    }
  }
  EXPECT_GT(real_seen, 10);
  EXPECT_GT(complex_seen, 10);
}

TEST(Properties, CommutatorsAndRoundTrip) {
  for (const auto& f : sample(505, 60)) {
    const auto r = classify(f);
    if (!r.transform) continue;
    const auto df = diagonal_form(*r.transform);
    const double scale = std::max(1.0, r.transform->W.squaredNorm());
    EXPECT_LT((df.commutator_b_bbar() - CMatrix::Identity(df.n_modes(), df.n_modes())).norm(),
              1e-9 * scale);
    EXPECT_LT(df.commutator_b_b().norm(), 1e-9 * scale);
    const CMatrix h = extended_matrix(f).H;
    EXPECT_LT((df.reconstruct_extended() - h).norm(), 1e-9 * scale * std::max(1.0, h.norm()));
  }
}

TEST(Properties, PropagatorIdentities) {
  for (const auto& f : sample(606, 30)) {
    const auto d = dynamical_matrix(f);
    for (cplx t : {cplx(1, 0), cplx(0, 1), cplx(1, 1), cplx(-0.4, 0.2)}) {
      Propagator p;
      try {
        p = propagate(d, t);
      } catch (const Error&) {
        continue;
      }
      EXPECT_LT(p.symplectic_residual, 1e-9 * p.norm * p.bar_norm);
      if (t.imag() == 0.0) EXPECT_LT(p.adjoint_residual, 1e-9 * p.norm);
    }
  }
}

TEST(Properties, InvariantsConserved) {
  for (const auto& f : sample(707, 40)) {
    const auto r = classify(f);
    if (!r.transform) continue;
    const auto d = dynamical_matrix(f);
    const auto set = invariants(*r.transform);
    for (double t : {0.3, 1.0}) {
      const CMatrix u = propagate(d, t).U;
      for (const auto& k : set.K) {
        EXPECT_LT(invariant_residual(k, u), 1e-9 * std::max(1.0, k.norm()) * u.squaredNorm());
      }
    }
  }
}

TEST(Properties, FockMatchesLatticeForRandomPositiveForms) {
  std::mt19937_64 rng(808);
  int tested = 0;
  while (tested < 4) {
    const auto f = gen::random_form(rng, 2, 1.0, 0.15);
    if (classify(f).classification != Stability::PositiveDefinite) continue;
    const auto c = fock_spectrum_check(f, 14, 6);
    EXPECT_LT(c.max_deviation, 1e-3);
    EXPECT_TRUE(c.trend_from_above);
    ++tested;
  }
}

TEST(Properties, FockDeviationShrinksWithCutoffForSqueezedForms) {
  // Third draw of this seed has a soft mode near 0.45 and is truncation-limited
  // at n_max = 14.
  std::mt19937_64 rng(808);
  gen::random_form_in(rng, 2, Stability::PositiveDefinite);
  gen::random_form_in(rng, 2, Stability::PositiveDefinite);
  const auto f = gen::random_form_in(rng, 2, Stability::PositiveDefinite);
  double previous = 1e300;
  for (int n_max : {14, 20, 26}) {
    const auto c = fock_spectrum_check(f, n_max, 6);
    EXPECT_LT(c.max_deviation, previous);
    previous = c.max_deviation;
  }
}

TEST(Properties, ClassifierMatchesPairingThresholds) {
  const double eps = 1.0, gamma = 0.3;
  const double pos = std::sqrt(eps * eps - gamma * gamma);
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> delta(-1.5, 1.5);
  for (int rep = 0; rep < 300; ++rep) {
    const double dl = delta(rng);
    const double a = std::abs(dl);
    if (std::abs(a - pos) < 1e-6 || std::abs(a - eps) < 1e-6) continue;
    const auto c = classify(bcs_form({eps, gamma, dl, 0.0})).classification;
    const Stability want = a < pos   ? Stability::PositiveDefinite
                           : a < eps ? Stability::StableNonPositive
                                     : Stability::UnstableComplex;
    EXPECT_EQ(c, want) << dl;
  }
}
