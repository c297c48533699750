#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace qbf {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Numerical thresholds shared by the whole pipeline.
///
/// All values are relative: comparisons scale them by max(1, ||M H||) or by
/// the norm of the object being tested, as documented at each use site.
struct Tolerances {
  double structural = 1e-12;  // hermiticity / symmetry of input blocks
  double eig = 1e-9;          // "is real", "is zero", eigen residuals
  double pair = 1e-8;         // (lambda, -lambda) matching
  double rank = 1e-9;         // numerical rank in Jordan analysis
  double null_norm = 1e-10;   // |c| below this means no generalized norm
  double cluster = 1e-5;      // eigenvalues closer than this form one cluster
  double grid = 1e-7;         // near-defective warning threshold
  double evo = 1e-9;          // propagator identities, relative to ||U||
};

enum class ErrorCode {
  DimensionMismatch,
  StructureViolation,
  PairingFailure,
  NullNorm,
  NotDiagonalizable,
  Overflow,
  InvalidArgument,
  DegenerateGap,
  NotDegenerate,
  DimensionCap,
  WrongRegime,
  ParseError,
  BadRange,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qbf
