#pragma once

#include <vector>

#include "qbf/spectral.hpp"

namespace qbf {

/// H = sum_i lambda_i (bbar'_i b'_i + 1/2), with b'_i = extract_b.row(i) * Z
/// and bbar'_i = Z^+ * extract_bbar.col(i).
struct DiagonalForm {
  std::vector<cplx> lambdas;
  CMatrix extract_b;     // n x 2n, rows bar(W_ibar) M
  CMatrix extract_bbar;  // 2n x n, columns M W_i
  std::vector<bool> hermitian_flags;
  std::vector<bool> zero_modes;
  cplx zero_point_energy{};  // sum lambda_i / 2

  int n_modes() const { return static_cast<int>(lambdas.size()); }

  /// [b'_i, bbar'_j]; the identity for a valid transform.
  CMatrix commutator_b_bbar() const;
  /// [b'_i, b'_j]; zero for a valid transform.
  CMatrix commutator_b_b() const;
  /// Extended matrix of sum_i lambda_i (bbar'_i b'_i + 1/2).
  CMatrix reconstruct_extended() const;
};

/// H = (1/2) sum_i (T'_i p'_i^2 + V'_i q'_i^2) with q', p' linear in R = (q, p).
struct CoordinateDiagonalForm {
  std::vector<cplx> Tprime;
  std::vector<cplx> Vprime;
  std::vector<cplx> scaling;  // s_i applied (1 for zero modes)
  CMatrix extract_q;          // n x 2n, acting on R
  CMatrix extract_p;          // n x 2n
  std::vector<bool> hermitian_flags;
  std::vector<bool> zero_modes;
  double offdiag_residual = 0.0;  // size of the U' block and mixed terms

  int n_modes() const { return static_cast<int>(Tprime.size()); }
};

/// K_i with bbar'_i b'_i = Z^+ K_i Z.
struct InvariantSet {
  std::vector<CMatrix> K;
};

DiagonalForm diagonal_form(const BogoliubovTransform& bt, const Tolerances& tol = {});
/// Throws NotDiagonalizable when the report carries no transform.
DiagonalForm diagonal_form(const StabilityReport& report, const Tolerances& tol = {});

CoordinateDiagonalForm coordinate_diagonal(const BogoliubovTransform& bt,
                                           const Tolerances& tol = {});

InvariantSet invariants(const BogoliubovTransform& bt);

/// ||bar(U) K U - K||_F
double invariant_residual(const CMatrix& K, const CMatrix& U);

/// Extended matrix M W diag(lambda, lambda) bar(W) M implied by a transform.
CMatrix extended_from_transform(const BogoliubovTransform& bt);

}  // namespace qbf
