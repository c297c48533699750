#pragma once

#include <array>
#include <optional>
#include <utility>

#include "qbf/evolution.hpp"

namespace qbf {

// Two-mode pairing model
//   H = sum_nu eps_nu (b_nu^+ b_nu + 1/2) + Delta (b_+ b_- + b_+^+ b_-^+)
//       + kappa (b_+^+ b_- + b_-^+ b_+),       eps_+- = epsilon +- gamma.
// Mode 0 is b_+, mode 1 is b_-.

struct BcsParams {
  double epsilon = 1.0;
  double gamma = 0.3;
  double delta = 0.0;
  double kappa = 0.0;

  /// Throws InvalidArgument unless epsilon > 0 and 0 < gamma < epsilon.
  void validate() const;
};

QuadraticForm bcs_form(const BcsParams& p);

/// Eigenvalues of the extended matrix, ascending. For kappa = 0 these are
/// sigma_- and sigma_+ each twice.
std::array<double, 4> bcs_sigma(const BcsParams& p);

struct BcsLambda {
  cplx plus{};   // lambda_+ (mode ordering of the spectral pipeline)
  cplx minus{};  // lambda_-
  /// Closed form. For kappa != 0 this uses sqrt(Dc^2 - Delta^2) with
  /// Dc^2 = eps^2 (1 + kappa^2 / gamma^2).
  cplx analytic_plus{};
  cplx analytic_minus{};
  /// Same closed form read literally with Dc = eps^2 (1 + kappa^2 / gamma^2).
  cplx literal_plus{};
  cplx literal_minus{};
  bool from_dense_solve = false;
  double analytic_deviation = 0.0;  // against the dense solve, up to sign
  double literal_deviation = 0.0;
};

/// kappa = 0: lambda_nu = nu gamma + sqrt(eps^2 - Delta^2) (principal root).
/// kappa != 0: values from a dense eigensolve, closed forms reported alongside.
BcsLambda bcs_lambda(const BcsParams& p, const Tolerances& tol = {});

/// (u, v) = sqrt((eps +- alpha) / 2 alpha), signs fixed by 2 alpha u v = Delta.
/// Requires kappa = 0; throws DegenerateGap when |Delta| = eps.
std::pair<cplx, cplx> bcs_uv(const BcsParams& p, double tol = 1e-12);

/// Closed-form propagator (rows/columns in Z = (b_+, b_-, b_+^+, b_-^+)).
/// Uses the alpha -> 0 limit when |Delta| = eps. Requires kappa = 0.
CMatrix bcs_closed_evolution(const BcsParams& p, double t, double tol = 1e-12);

/// Maximally decoupled form at |Delta| = eps:
///   H = gamma (bbar^s_+ b^s_+ - bbar^s_- b^s_-) + 2 |Delta| bbar^s_- bbar^s_+
/// with b_nu = (b^s_nu + bbar^s_-nu) / sqrt 2.
struct BcsJordanForm {
  CMatrix W;          // Z = W Z_s, Z_s = (b^s_+, b^s_-, bbar^s_+, bbar^s_-)
  double gamma_coefficient = 0.0;
  double pairing_coefficient = 0.0;  // 2 |Delta|
  CMatrix H_s;        // extended matrix in Z_s coordinates
  CMatrix K_pair;     // bbar^s_- bbar^s_+ as (1/2) Z^+ K Z
  CMatrix K_number;   // bbar^s_+ b^s_+ - bbar^s_- b^s_- as (1/2) Z^+ K Z
  double symplectic_residual = 0.0;      // ||W M bar(W) - M||
  double reconstruction_residual = 0.0;  // ||W^-bar H_s W^-1 - H||
  double evolution_residual = 0.0;       // b^s(t) closed form vs propagator
  double commutator_residual = 0.0;      // [K_pair, K_number]
  double check_time = 1.0;
};

BcsJordanForm bcs_jordan_form(const BcsParams& p, double check_time = 1.0,
                              double tol = 1e-12);

/// Closed-form evolution of Z_s = (b^s, bbar^s) at |Delta| = eps.
CMatrix bcs_jordan_evolution(const BcsParams& p, double t);

struct BcsThresholds {
  double positivity = 0.0;  // H stops being positive definite
  double dynamical = 0.0;   // onset of unbounded evolution beyond any reentry
  std::optional<std::pair<double, double>> reentry_window;  // (Dc+, Dc)
  std::optional<double> instability_onset;                  // Dc- (kappa != 0)
  std::optional<double> inner_upper;                        // Dc+ (kappa != 0)
  double reentry_kappa_limit = 0.0;  // gamma^2 / sqrt(eps^2 - gamma^2)
  // Outer complex-onset threshold for kappa != 0.
  std::optional<double> outer_numeric;
  double outer_literal = 0.0;  // eps^2 (1 + kappa^2/gamma^2)
  double outer_sqrt = 0.0;     // eps sqrt(1 + kappa^2/gamma^2)
};

BcsThresholds bcs_thresholds(const BcsParams& p, const Tolerances& tol = {});

/// max |Im| over the raw eigenvalues of M H for the model at p.
double bcs_max_imag(const BcsParams& p);

}  // namespace qbf
