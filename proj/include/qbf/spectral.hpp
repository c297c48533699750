#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qbf/core.hpp"

namespace qbf {

/// One normal mode: eigenvectors of M H for +lambda (w_plus, column W_i) and
/// -lambda (w_minus, column W_ibar).
struct ModePair {
  cplx lambda{};
  CVector w_plus;
  CVector w_minus;
  bool norm_ok = false;
  /// Real lambda with w_minus = T w_plus^*, so b' and its partner are adjoints.
  bool hermitian_pair = false;
  /// For complex lambda with non-zero real part: index of the mode with
  /// frequency -lambda^*. The member with Re(lambda) < 0 is derived from it.
  int conjugate_partner = -1;
  bool derived = false;
};

/// A group of numerically coincident eigenvalues of M H.
struct EigenCluster {
  cplx value{};
  int algebraic = 0;
  int geometric = 0;
  int max_block = 1;  // largest Jordan block
  /// Smallest singular value of (M H - value) that was counted as non-zero.
  double rank_gap = 0.0;
};

struct SpectralDecomposition {
  int n_modes = 0;
  /// Mode pairs ordered by descending (Re lambda, Im lambda).
  std::vector<ModePair> pairs;
  std::vector<cplx> eigenvalues;  // raw solver output, 2n values
  std::vector<EigenCluster> clusters;
  bool diagonalizable = true;
  double scale = 1.0;              // max(1, ||M H||_F)
  double pairing_residual = 0.0;   // max |mu + mu'| over matched clusters
  std::vector<std::string> warnings;
};

/// Generalized Bogoliubov transformation Z = W Z' with W M bar(W) = M.
struct BogoliubovTransform {
  CMatrix W;      // columns: all w_plus, then all w_minus
  CMatrix W_inv;  // M bar(W) M
  std::vector<cplx> lambdas;
  std::vector<bool> hermitian;
  double symplectic_residual = 0.0;  // ||W M bar(W) - M||_F
  double inverse_residual = 0.0;     // ||W W_inv - 1||_F
  double condition = 1.0;            // 2-norm condition number of W

  int n_modes() const { return static_cast<int>(lambdas.size()); }
};

enum class Stability {
  PositiveDefinite = 0,
  StableNonPositive = 1,
  UnstableComplex = 2,
  NonDiagonalizable = 3,
};

std::string_view to_string(Stability s);

struct StabilityReport {
  Stability classification = Stability::PositiveDefinite;
  RVector h_eigenvalues;  // ascending
  std::vector<cplx> mode_frequencies;
  bool diagonalizable = true;
  int zero_mode_count = 0;
  SpectralDecomposition spectrum;
  std::optional<BogoliubovTransform> transform;
  std::vector<std::string> warnings;

  double max_imag() const;
};

/// Eigenvalues of M H grouped into (lambda, -lambda) pairs with raw
/// eigenvectors. Defective spectra are reported through `diagonalizable`
/// and the cluster table rather than thrown.
SpectralDecomposition eigen_pairs(const DynamicalMatrix& d,
                                  const Tolerances& tol = {});

/// Rescales every pair to bar(W_ibar) M W_i = 1 and assembles W.
/// Throws NotDiagonalizable or NullNorm.
BogoliubovTransform normalize_pairs(const SpectralDecomposition& s,
                                    const Tolerances& tol = {});

StabilityReport classify(const QuadraticForm& f, const Tolerances& tol = {});

/// The b' -> -bbar', bbar' -> b' relabeling for one mode (lambda -> -lambda).
/// Returns a new transform; `mode` must be in range.
BogoliubovTransform swap_mode_labeling(const BogoliubovTransform& bt, int mode);

}  // namespace qbf
