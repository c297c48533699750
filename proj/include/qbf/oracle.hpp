#pragma once

#include <utility>
#include <vector>

#include "qbf/spectral.hpp"

namespace qbf {

// Brute-force check of the normal-mode spectrum in a truncated occupation
// basis. Nothing here goes through the spectral pipeline.

inline constexpr long kDefaultFockCap = 20000;

/// Basis |n_0, ..., n_{N-1}> with 0 <= n_k <= n_max, ordered
/// lexicographically (mode 0 most significant).
struct FockTruncation {
  int n_modes = 0;
  int n_max = 0;
  long dim = 0;
  CMatrix H;

  long index(const std::vector<int>& occupation) const;
  std::vector<int> occupation(long index) const;
};

/// Matrix of H in the truncated basis, b|n> = sqrt(n)|n-1>, b^+|n_max> = 0.
/// Throws DimensionCap when (n_max + 1)^n_modes exceeds `cap`.
FockTruncation fock_hamiltonian(const QuadraticForm& f, int n_max,
                                long cap = kDefaultFockCap);

/// Lowest eigenvalue of the truncated matrix.
double ground_energy(const QuadraticForm& f, int n_max, long cap = kDefaultFockCap);

struct FockSpectrumCheck {
  int n_max = 0;
  std::vector<double> levels;     // lowest k eigenvalues of the Fock matrix
  std::vector<double> predicted;  // lowest k of sum_i lambda_i (n_i + 1/2)
  std::vector<std::vector<int>> predicted_occupations;
  double max_deviation = 0.0;
  /// (n_max, ground energy) for n_max - 6, -4, -2, 0 (those >= 1).
  std::vector<std::pair<int, double>> ground_trend;
  bool trend_from_above = true;  // ground energies non-increasing and >= sum lambda / 2
  double zero_point = 0.0;       // sum lambda / 2
};

/// Only lattice points with total occupation <= n_max / 2 are predicted.
/// Throws WrongRegime unless the form is PositiveDefinite, InvalidArgument
/// if fewer than k such points exist.
FockSpectrumCheck fock_spectrum_check(const QuadraticForm& f, int n_max, int k_levels,
                                      const Tolerances& tol = {},
                                      long cap = kDefaultFockCap);

}  // namespace qbf
