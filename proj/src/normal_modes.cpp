#include "qbf/normal_modes.hpp"

#include <cmath>

namespace qbf {

CMatrix DiagonalForm::commutator_b_bbar() const {
  // [Z, Z^+] = M
  return extract_b * apply_metric(extract_bbar);
}

CMatrix DiagonalForm::commutator_b_b() const {
  // [Z_a, Z_b] = (M T)_ab
  const int n = n_modes();
  return extract_b * apply_metric(swap_matrix(n)) * extract_b.transpose();
}

CMatrix DiagonalForm::reconstruct_extended() const {
  const int n = n_modes();
  // Column i of extract_bbar is M W_i; row i of extract_b is bar(W_ibar) M.
  // The partner terms follow from the bar symmetry of the result.
  CMatrix h = CMatrix::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    h += lambdas[i] * extract_bbar.col(i) * extract_b.row(i);
  }
  return h + bar(h);
}

DiagonalForm diagonal_form(const BogoliubovTransform& bt, const Tolerances& tol) {
  const int n = bt.n_modes();
  DiagonalForm df;
  df.lambdas = bt.lambdas;
  df.extract_b.resize(n, 2 * n);
  df.extract_bbar.resize(2 * n, n);
  const double scale = std::max(1.0, bt.W.norm());
  for (int i = 0; i < n; ++i) {
    const CVector wp = bt.W.col(i);
    const CVector wm = bt.W.col(n + i);
    df.extract_b.row(i) = bar_row(wm) * metric(n);
    df.extract_bbar.col(i) = apply_metric(wp);
    df.hermitian_flags.push_back(std::abs(bt.lambdas[i].imag()) <= tol.eig * scale &&
                                 (conj_swap(wp) - wm).norm() <= tol.eig * scale);
    df.zero_modes.push_back(std::abs(bt.lambdas[i]) <= tol.eig * scale);
    df.zero_point_energy += 0.5 * bt.lambdas[i];
  }
  return df;
}

DiagonalForm diagonal_form(const StabilityReport& report, const Tolerances& tol) {
  if (!report.transform) {
    throw Error(ErrorCode::NotDiagonalizable,
                "no boson-diagonal form: M H is not diagonalizable");
  }
  return diagonal_form(*report.transform, tol);
}

CMatrix extended_from_transform(const BogoliubovTransform& bt) {
  const int n = bt.n_modes();
  CVector d(2 * n);
  for (int i = 0; i < n; ++i) d(i) = d(n + i) = bt.lambdas[i];
  return apply_metric(bt.W * d.asDiagonal() * bar(bt.W) * metric(n));
}

CoordinateDiagonalForm coordinate_diagonal(const BogoliubovTransform& bt,
                                           const Tolerances& tol) {
  const int n = bt.n_modes();
  const CMatrix s = coordinate_transform(n);
  const CMatrix wc = s.adjoint() * bt.W * s;
  const CMatrix wc_inv = s.adjoint() * bt.W_inv * s;
  const CMatrix hc = s.adjoint() * extended_from_transform(bt) * s;
  const CMatrix hpc = wc.transpose() * hc * wc;

  CoordinateDiagonalForm out;
  out.extract_q = wc_inv.topRows(n);
  out.extract_p = wc_inv.bottomRows(n);
  CMatrix diag_part = CMatrix::Zero(2 * n, 2 * n);
  diag_part.diagonal() = hpc.diagonal();
  out.offdiag_residual = (hpc - diag_part).norm();

  const double scale = std::max(1.0, bt.W.norm());
  for (int i = 0; i < n; ++i) {
    cplx vp = hpc(i, i);
    cplx tp = hpc(n + i, n + i);
    const bool zero = std::abs(bt.lambdas[i]) <= tol.eig * scale;
    cplx si = 1.0;
    if (!zero) {
      // p' -> s p', q' -> q' / s with s^4 = V'/T' (principal branch).
      si = std::pow(vp / tp, 0.25);
      out.extract_p.row(i) *= si;
      out.extract_q.row(i) /= si;
      tp /= si * si;
      vp *= si * si;
    }
    out.Tprime.push_back(tp);
    out.Vprime.push_back(vp);
    out.scaling.push_back(si);
    out.zero_modes.push_back(zero);
    const double im = out.extract_q.row(i).imag().norm() +
                      out.extract_p.row(i).imag().norm();
    out.hermitian_flags.push_back(im <= tol.eig * scale);
  }
  return out;
}

InvariantSet invariants(const BogoliubovTransform& bt) {
  const int n = bt.n_modes();
  InvariantSet set;
  for (int i = 0; i < n; ++i) {
    const CVector col = apply_metric(bt.W.col(i));
    const Eigen::RowVectorXcd row = bar_row(bt.W.col(n + i)) * metric(n);
    set.K.push_back(col * row);
  }
  return set;
}

double invariant_residual(const CMatrix& K, const CMatrix& U) {
  return (bar(U) * K * U - K).norm();
}

}  // namespace qbf
