#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qbf/normal_modes.hpp"

namespace qbf {

/// U(t) = exp(-i M H t), Z(t) = U(t) Z(0). t may be complex.
struct Propagator {
  cplx t{};
  CMatrix U;
  double symplectic_residual = 0.0;  // ||U M bar(U) - M||_F
  double adjoint_residual = 0.0;     // ||bar(U) - U^+||_F
  double norm = 0.0;                 // ||U||_F
  double bar_norm = 0.0;             // ||bar(U)||_F
};

enum class GrowthKind { Quasiperiodic, PolynomialTimesOscillation, Exponential };

std::string_view to_string(GrowthKind k);

struct GrowthClass {
  GrowthKind kind = GrowthKind::Quasiperiodic;
  double rate = 0.0;    // max |Im lambda|
  int poly_degree = 0;  // largest Jordan block - 1
};

/// Entries above this magnitude are reported as Overflow.
inline constexpr double kOverflowLimit = 1e100;

Propagator propagate(const DynamicalMatrix& d, cplx t);

/// (exp(-i lambda_i t), exp(+i lambda_i t)) per mode.
std::vector<std::pair<cplx, cplx>> mode_evolution(const DiagonalForm& df, cplx t);
std::vector<std::pair<cplx, cplx>> mode_evolution(const std::vector<cplx>& lambdas,
                                                  cplx t);

GrowthClass growth_class(const DynamicalMatrix& d, const Tolerances& tol = {});
GrowthClass growth_class(const SpectralDecomposition& s, const Tolerances& tol = {});

struct OdeCheck {
  double residual = 0.0;   // ||U_rk4 - U_exp||_F
  double relative = 0.0;   // residual / ||U_exp||_F
  double bound = 0.0;      // a priori O(h^4) estimate
  bool step_too_large = false;
  std::string guidance;
};

/// Integrates i dU/dt = M H U with classical RK4 and compares to propagate().
OdeCheck ode_cross_check(const DynamicalMatrix& d, double t, int steps);

}  // namespace qbf
