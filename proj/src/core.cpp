#include "qbf/core.hpp"

#include <cmath>
#include <sstream>

namespace qbf {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::StructureViolation: return "StructureViolation";
    case ErrorCode::PairingFailure: return "PairingFailure";
    case ErrorCode::NullNorm: return "NullNorm";
    case ErrorCode::NotDiagonalizable: return "NotDiagonalizable";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateGap: return "DegenerateGap";
    case ErrorCode::NotDegenerate: return "NotDegenerate";
    case ErrorCode::DimensionCap: return "DimensionCap";
    case ErrorCode::WrongRegime: return "WrongRegime";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::BadRange: return "BadRange";
  }
  return "Unknown";
}

namespace {

bool all_finite(const CMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const cplx z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

// Relative asymmetry ||X - sym(X)|| / ||X||; exact zero required for X = 0.
bool within(double residual, double scale, double tol) {
  if (scale == 0.0) return residual == 0.0;
  return residual <= tol * scale;
}

}  // namespace

QuadraticForm QuadraticForm::build(const CMatrix& A, const CMatrix& B,
                                   double tol_struct) {
  if (A.rows() != A.cols() || B.rows() != B.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "A and B must be square");
  }
  if (A.rows() != B.rows()) {
    std::ostringstream os;
    os << "A is " << A.rows() << "x" << A.cols() << " but B is " << B.rows()
       << "x" << B.cols();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  if (A.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "a form needs at least one mode");
  }
  if (!all_finite(A) || !all_finite(B)) {
    throw Error(ErrorCode::StructureViolation, "non-finite matrix entry");
  }

  const double a_norm = A.norm();
  const double a_res = (A - A.adjoint()).norm();
  if (!within(a_res, a_norm, tol_struct)) {
    std::ostringstream os;
    os << "A is not hermitian: ||A - A^+|| = " << a_res << ", ||A|| = " << a_norm;
    throw Error(ErrorCode::StructureViolation, os.str());
  }
  const double b_norm = B.norm();
  const double b_res = (B - B.transpose()).norm();
  if (!within(b_res, b_norm, tol_struct)) {
    std::ostringstream os;
    os << "B is not symmetric: ||B - B^t|| = " << b_res << ", ||B|| = " << b_norm;
    throw Error(ErrorCode::StructureViolation, os.str());
  }

  CMatrix a = 0.5 * (A + A.adjoint());
  CMatrix b = 0.5 * (B + B.transpose());
  return QuadraticForm(std::move(a), std::move(b));
}

RMatrix CoordinateForm::block() const {
  const auto n = V.rows();
  RMatrix hc(2 * n, 2 * n);
  hc << V, U, U.transpose(), T;
  return hc;
}

ExtendedMatrix extended_matrix(const QuadraticForm& f) {
  const int n = f.n_modes();
  CMatrix h(2 * n, 2 * n);
  h.topLeftCorner(n, n) = f.A();
  h.topRightCorner(n, n) = f.B();
  h.bottomLeftCorner(n, n) = f.B().conjugate();
  h.bottomRightCorner(n, n) = f.A().transpose();
  return {std::move(h)};
}

DynamicalMatrix dynamical_matrix(const QuadraticForm& f) {
  return {apply_metric(extended_matrix(f).H)};
}

CoordinateForm coordinate_form(const QuadraticForm& f) {
  CoordinateForm c;
  c.V = (f.A() + f.B()).real();
  c.T = (f.A() - f.B()).real();
  c.U = (f.B() - f.A()).imag();
  return c;
}

CMatrix metric(int n) {
  CVector d(2 * n);
  d.head(n).setOnes();
  d.tail(n).setConstant(-1.0);
  return d.asDiagonal();
}

CMatrix swap_matrix(int n) {
  CMatrix t = CMatrix::Zero(2 * n, 2 * n);
  t.topRightCorner(n, n).setIdentity();
  t.bottomLeftCorner(n, n).setIdentity();
  return t;
}

CMatrix coordinate_transform(int n) {
  const double r = 1.0 / std::sqrt(2.0);
  const cplx i(0.0, 1.0);
  CMatrix s(2 * n, 2 * n);
  const CMatrix id = CMatrix::Identity(n, n);
  s << r * id, r * i * id, r * id, -r * i * id;
  return s;
}

CMatrix bar(const CMatrix& W) {
  const auto n = W.rows() / 2;
  CMatrix out(W.rows(), W.cols());
  // W = [[P, Q], [R, S]]  ->  T W^t T = [[S^t, Q^t], [R^t, P^t]]
  out.topLeftCorner(n, n) = W.bottomRightCorner(n, n).transpose();
  out.topRightCorner(n, n) = W.topRightCorner(n, n).transpose();
  out.bottomLeftCorner(n, n) = W.bottomLeftCorner(n, n).transpose();
  out.bottomRightCorner(n, n) = W.topLeftCorner(n, n).transpose();
  return out;
}

Eigen::RowVectorXcd bar_row(const CVector& v) {
  const auto n = v.size() / 2;
  Eigen::RowVectorXcd r(v.size());
  r.head(n) = v.tail(n).transpose();
  r.tail(n) = v.head(n).transpose();
  return r;
}

CVector conj_swap(const CVector& v) {
  const auto n = v.size() / 2;
  CVector out(v.size());
  out.head(n) = v.tail(n).conjugate();
  out.tail(n) = v.head(n).conjugate();
  return out;
}

cplx metric_product(const CVector& x, const CVector& y) {
  const auto n = x.size() / 2;
  // x^t T M y = x_lower . y_upper - x_upper . y_lower
  return (x.tail(n).transpose() * y.head(n)).value() -
         (x.head(n).transpose() * y.tail(n)).value();
}

CMatrix apply_metric(const CMatrix& X) {
  const auto n = X.rows() / 2;
  CMatrix out = X;
  out.bottomRows(n) *= -1.0;
  return out;
}

double hermiticity_residual(const CMatrix& H) {
  return (H - H.adjoint()).norm();
}

double bar_symmetry_residual(const CMatrix& H) { return (bar(H) - H).norm(); }

CMatrix extended_from_coordinates(const CoordinateForm& c) {
  const int n = static_cast<int>(c.V.rows());
  const CMatrix s = coordinate_transform(n);
  return s * c.block().cast<cplx>() * s.adjoint();
}

}  // namespace qbf
