#include "qbf/bcs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace qbf {

namespace {

constexpr cplx kI{0.0, 1.0};

void require_unperturbed(const BcsParams& p, const char* what) {
  if (p.kappa != 0.0) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(what) + " is only defined for kappa = 0");
  }
}

// Minimal distance from a to one of +-b.
double signed_distance(cplx a, cplx b) {
  return std::min(std::abs(a - b), std::abs(a + b));
}

double deviation(cplx a_plus, cplx a_minus, cplx n_plus, cplx n_minus) {
  auto best = [&](cplx a) {
    return std::min(signed_distance(a, n_plus), signed_distance(a, n_minus));
  };
  return std::max(best(a_plus), best(a_minus));
}

std::pair<cplx, cplx> perturbed_closed_form(const BcsParams& p, double dc_squared) {
  const double e = p.epsilon, g = p.gamma, k = p.kappa;
  const cplx root = std::sqrt(cplx(dc_squared - p.delta * p.delta));
  const double shift = k * k * (e * e / (g * g) - 1.0);
  const cplx tp = g + root;
  const cplx tm = -g + root;
  return {std::sqrt(tp * tp - shift), std::sqrt(tm * tm - shift)};
}

}  // namespace

void BcsParams::validate() const {
  if (!std::isfinite(epsilon) || !std::isfinite(gamma) || !std::isfinite(delta) ||
      !std::isfinite(kappa)) {
    throw Error(ErrorCode::InvalidArgument, "BCS parameters must be finite");
  }
  if (!(epsilon > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "epsilon must be > 0");
  }
  if (!(gamma > 0.0 && gamma < epsilon)) {
    throw Error(ErrorCode::InvalidArgument, "gamma must satisfy 0 < gamma < epsilon");
  }
}

QuadraticForm bcs_form(const BcsParams& p) {
  p.validate();
  CMatrix a(2, 2), b(2, 2);
  a << p.epsilon + p.gamma, p.kappa, p.kappa, p.epsilon - p.gamma;
  b << 0.0, p.delta, p.delta, 0.0;
  return QuadraticForm::build(a, b);
}

std::array<double, 4> bcs_sigma(const BcsParams& p) {
  p.validate();
  std::array<double, 4> s{};
  int k = 0;
  for (double nu : {1.0, -1.0}) {
    for (double sign : {1.0, -1.0}) {
      const double d = p.delta + sign * p.kappa;
      s[k++] = p.epsilon + nu * std::sqrt(p.gamma * p.gamma + d * d);
    }
  }
  std::sort(s.begin(), s.end());
  return s;
}

BcsLambda bcs_lambda(const BcsParams& p, const Tolerances& tol) {
  p.validate();
  BcsLambda out;
  if (p.kappa == 0.0) {
    const cplx alpha = std::sqrt(cplx(p.epsilon * p.epsilon - p.delta * p.delta));
    out.plus = out.analytic_plus = out.literal_plus = p.gamma + alpha;
    out.minus = out.analytic_minus = out.literal_minus = -p.gamma + alpha;
    return out;
  }
  const double ratio = 1.0 + p.kappa * p.kappa / (p.gamma * p.gamma);
  const double e2 = p.epsilon * p.epsilon;
  std::tie(out.analytic_plus, out.analytic_minus) = perturbed_closed_form(p, e2 * ratio);
  const double literal = e2 * ratio;
  std::tie(out.literal_plus, out.literal_minus) =
      perturbed_closed_form(p, literal * literal);

  const auto spectrum = eigen_pairs(dynamical_matrix(bcs_form(p)), tol);
  out.plus = spectrum.pairs.at(0).lambda;
  out.minus = spectrum.pairs.at(1).lambda;
  out.from_dense_solve = true;
  out.analytic_deviation =
      deviation(out.analytic_plus, out.analytic_minus, out.plus, out.minus);
  out.literal_deviation =
      deviation(out.literal_plus, out.literal_minus, out.plus, out.minus);
  return out;
}

std::pair<cplx, cplx> bcs_uv(const BcsParams& p, double tol) {
  p.validate();
  require_unperturbed(p, "bcs_uv");
  const double e = p.epsilon;
  if (std::abs(std::abs(p.delta) - e) <= tol * e) {
    throw Error(ErrorCode::DegenerateGap, "|Delta| = epsilon: alpha = 0, no (u, v) exist");
  }
  const cplx alpha = std::sqrt(cplx(e * e - p.delta * p.delta));
  const cplx u = std::sqrt((e + alpha) / (2.0 * alpha));
  cplx v = std::sqrt((e - alpha) / (2.0 * alpha));
  if (std::abs(2.0 * alpha * u * v - p.delta) > std::abs(2.0 * alpha * u * v + p.delta)) {
    v = -v;
  }
  return {u, v};
}

CMatrix bcs_closed_evolution(const BcsParams& p, double t, double tol) {
  p.validate();
  require_unperturbed(p, "bcs_closed_evolution");
  const double e = p.epsilon;
  const bool jordan = std::abs(std::abs(p.delta) - e) <= tol * e;
  const cplx alpha = jordan ? cplx(0.0) : std::sqrt(cplx(e * e - p.delta * p.delta));

  // Coefficients of b_nu and b^+_-nu in b_nu(t), and of b^+_nu, b_-nu in
  // b^+_nu(t), without the common phase.
  cplx vv_fwd, uv_fwd, vv_bwd, uv_bwd;
  if (jordan) {
    vv_fwd = -kI * t * e;
    uv_fwd = -kI * t * p.delta;
    vv_bwd = kI * t * e;
    uv_bwd = kI * t * p.delta;
  } else {
    const auto [u, v] = bcs_uv(p, tol);
    const cplx fwd = 1.0 - std::exp(2.0 * kI * alpha * t);
    const cplx bwd = 1.0 - std::exp(-2.0 * kI * alpha * t);
    vv_fwd = v * v * fwd;
    uv_fwd = u * v * fwd;
    vv_bwd = v * v * bwd;
    uv_bwd = u * v * bwd;
  }

  CMatrix U = CMatrix::Zero(4, 4);
  for (int i = 0; i < 2; ++i) {
    const double nu = i == 0 ? 1.0 : -1.0;
    const int m = 1 - i;
    const cplx lambda = nu * p.gamma + alpha;
    const cplx down = std::exp(-kI * lambda * t);
    const cplx up = std::exp(kI * lambda * t);
    U(i, i) = down * (1.0 + vv_fwd);
    U(i, 2 + m) = down * uv_fwd;
    U(2 + i, 2 + i) = up * (1.0 + vv_bwd);
    U(2 + i, m) = up * uv_bwd;
  }
  return U;
}

CMatrix bcs_jordan_evolution(const BcsParams& p, double t) {
  const double d = std::abs(p.delta);
  CMatrix U = CMatrix::Zero(4, 4);
  for (int i = 0; i < 2; ++i) {
    const double nu = i == 0 ? 1.0 : -1.0;
    const int m = 1 - i;
    const cplx down = std::exp(-kI * nu * p.gamma * t);
    U(i, i) = down;
    U(i, 2 + m) = down * (-2.0 * kI * t * d);
    U(2 + i, 2 + i) = std::exp(kI * nu * p.gamma * t);
  }
  return U;
}

BcsJordanForm bcs_jordan_form(const BcsParams& p, double check_time, double tol) {
  p.validate();
  require_unperturbed(p, "bcs_jordan_form");
  if (std::abs(std::abs(p.delta) - p.epsilon) > tol * p.epsilon) {
    std::ostringstream os;
    os << "maximally decoupled form needs |Delta| = epsilon (got Delta = " << p.delta
       << ", epsilon = " << p.epsilon << ")";
    throw Error(ErrorCode::NotDegenerate, os.str());
  }
  const double r = 1.0 / std::sqrt(2.0);
  BcsJordanForm out;
  out.check_time = check_time;
  // b_nu = (b^s_nu + bbar^s_-nu)/sqrt2, b^+_nu = (bbar^s_nu - b^s_-nu)/sqrt2
  out.W = CMatrix::Zero(4, 4);
  out.W(0, 0) = r;
  out.W(0, 3) = r;
  out.W(1, 1) = r;
  out.W(1, 2) = r;
  out.W(2, 2) = r;
  out.W(2, 1) = -r;
  out.W(3, 3) = r;
  out.W(3, 0) = -r;
  if (p.delta < 0.0) {
    // b_- -> -b_- maps Delta to -Delta.
    out.W.row(1) *= -1.0;
    out.W.row(3) *= -1.0;
  }

  out.gamma_coefficient = p.gamma;
  out.pairing_coefficient = 2.0 * std::abs(p.delta);
  CMatrix k_number = CMatrix::Zero(4, 4);
  k_number.diagonal() << 1.0, -1.0, 1.0, -1.0;
  CMatrix k_pair = CMatrix::Zero(4, 4);
  k_pair(1, 2) = 1.0;
  k_pair(0, 3) = 1.0;
  out.H_s = out.gamma_coefficient * k_number + out.pairing_coefficient * k_pair;

  const CMatrix m = metric(2);
  const CMatrix w_inv = m * bar(out.W) * m;
  const CMatrix w_bar_inv = m * out.W * m;
  out.K_pair = w_bar_inv * k_pair * w_inv;
  out.K_number = w_bar_inv * k_number * w_inv;
  out.symplectic_residual = (out.W * m * bar(out.W) - m).norm();
  const CMatrix h = extended_matrix(bcs_form(p)).H;
  out.reconstruction_residual = (w_bar_inv * out.H_s * w_inv - h).norm();

  const Propagator prop = propagate(dynamical_matrix(bcs_form(p)), check_time);
  const CMatrix us = w_inv * prop.U * out.W;
  out.evolution_residual = (us - bcs_jordan_evolution(p, check_time)).norm();
  out.commutator_residual =
      (out.K_pair * m * out.K_number - out.K_number * m * out.K_pair).norm();
  return out;
}

double bcs_max_imag(const BcsParams& p) {
  const CMatrix ht = dynamical_matrix(bcs_form(p)).Ht;
  Eigen::ComplexEigenSolver<CMatrix> es(ht, false);
  return es.eigenvalues().imag().cwiseAbs().maxCoeff();
}

BcsThresholds bcs_thresholds(const BcsParams& p, const Tolerances& tol) {
  (void)tol;
  p.validate();
  const double e = p.epsilon, g = p.gamma, k = std::abs(p.kappa);
  BcsThresholds out;
  const double root = std::sqrt(e * e - g * g);
  out.reentry_kappa_limit = g * g / root;
  const double ratio = 1.0 + k * k / (g * g);
  out.outer_literal = e * e * ratio;
  out.outer_sqrt = e * std::sqrt(ratio);
  if (k == 0.0) {
    out.positivity = root;
    out.dynamical = e;
    return out;
  }

  const double lower = root - k;
  const double upper = root + k;
  out.positivity = lower;
  out.instability_onset = lower;
  out.inner_upper = upper;
  out.dynamical = lower;
  if (k >= out.reentry_kappa_limit) return out;

  // Outer onset of complex frequencies, located on the dense spectrum.
  constexpr double kUnstable = 1e-7;
  auto unstable = [&](double d) {
    BcsParams q = p;
    q.delta = d;
    return bcs_max_imag(q) > kUnstable * e;
  };
  const double step = 1e-3 * e;
  double d = upper + step;
  while (unstable(d) && d < upper + 10.0 * e) d += step;
  double stable_at = d;
  while (!unstable(d) && d < upper + 10.0 * e) {
    stable_at = d;
    d += step;
  }
  if (!unstable(d)) return out;
  double lo = stable_at, hi = d;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * e; ++it) {
    const double mid = 0.5 * (lo + hi);
    (unstable(mid) ? hi : lo) = mid;
  }
  out.outer_numeric = 0.5 * (lo + hi);
  out.dynamical = *out.outer_numeric;
  out.reentry_window = std::make_pair(upper, *out.outer_numeric);
  return out;
}

}  // namespace qbf
