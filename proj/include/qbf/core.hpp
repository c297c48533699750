#pragma once

#include "qbf/types.hpp"

namespace qbf {

// Block convention used everywhere: a 2n vector or matrix index k < n refers
// to the annihilation operator b_k, and n + k to the creation operator b_k^+.

/// Hermitian quadratic boson form
///   H = sum_ij A_ij (b_i^+ b_j + delta_ij / 2) + (B_ij b_i^+ b_j^+ + B*_ij b_i b_j) / 2
/// with A hermitian and B symmetric. Immutable once built.
class QuadraticForm {
 public:
  /// Validates and symmetrizes. Blocks whose asymmetry is within
  /// `tol_struct` (relative Frobenius norm) are replaced by their projection
  /// onto the hermitian / symmetric subspace; anything larger is rejected.
  static QuadraticForm build(const CMatrix& A, const CMatrix& B,
                             double tol_struct = Tolerances{}.structural);

  int n_modes() const { return static_cast<int>(a_.rows()); }
  const CMatrix& A() const { return a_; }
  const CMatrix& B() const { return b_; }

 private:
  QuadraticForm(CMatrix a, CMatrix b) : a_(std::move(a)), b_(std::move(b)) {}

  CMatrix a_;
  CMatrix b_;
};

inline QuadraticForm build_form(const CMatrix& A, const CMatrix& B,
                                double tol_struct = Tolerances{}.structural) {
  return QuadraticForm::build(A, B, tol_struct);
}

/// [[A, B], [B*, A^t]], hermitian and invariant under the bar map.
struct ExtendedMatrix {
  CMatrix H;
};

/// M H = [[A, B], [-B*, -A^t]]; generator of the Heisenberg evolution.
struct DynamicalMatrix {
  CMatrix Ht;

  int n_modes() const { return static_cast<int>(Ht.rows() / 2); }
};

/// H = (1/2) sum T_ij p_i p_j + V_ij q_i q_j + U_ij q_i p_j + U^t_ij p_i q_j.
struct CoordinateForm {
  RMatrix V;
  RMatrix T;
  RMatrix U;

  /// [[V, U], [U^t, T]]
  RMatrix block() const;
};

ExtendedMatrix extended_matrix(const QuadraticForm& f);
DynamicalMatrix dynamical_matrix(const QuadraticForm& f);
CoordinateForm coordinate_form(const QuadraticForm& f);

/// diag(+1 (n times), -1 (n times))
CMatrix metric(int n);
/// [[0, 1], [1, 0]] in n x n blocks.
CMatrix swap_matrix(int n);
/// (1/sqrt 2) [[1, i], [1, -i]] in n x n blocks; Z = S R with R = (q, p).
CMatrix coordinate_transform(int n);

/// T W^t T for a 2n x 2n matrix. No complex conjugation.
CMatrix bar(const CMatrix& W);
/// Row vector v^t T for a 2n column vector.
Eigen::RowVectorXcd bar_row(const CVector& v);
/// T v*; maps an eigenvector of M H for lambda to one for -lambda*.
CVector conj_swap(const CVector& v);

/// Bilinear product x^t T M y (the generalized norm when x, y are partners).
cplx metric_product(const CVector& x, const CVector& y);

/// Left multiplication by M without forming M (negates the lower half).
CMatrix apply_metric(const CMatrix& X);

double hermiticity_residual(const CMatrix& H);
double bar_symmetry_residual(const CMatrix& H);

/// Inverse of coordinate_form: S Hc S^+.
CMatrix extended_from_coordinates(const CoordinateForm& c);

}  // namespace qbf
