#include "qbf/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace qbf {

std::string_view to_string(GrowthKind k) {
  switch (k) {
    case GrowthKind::Quasiperiodic: return "Quasiperiodic";
    case GrowthKind::PolynomialTimesOscillation: return "PolynomialTimesOscillation";
    case GrowthKind::Exponential: return "Exponential";
  }
  return "Unknown";
}

Propagator propagate(const DynamicalMatrix& d, cplx t) {
  if (!std::isfinite(t.real()) || !std::isfinite(t.imag())) {
    throw Error(ErrorCode::InvalidArgument, "time must be finite");
  }
  const int n = d.n_modes();
  Propagator p;
  p.t = t;
  const CMatrix gen = (cplx(0.0, -1.0) * t) * d.Ht;
  p.U = gen.exp();
  double peak = 0.0;
  for (Eigen::Index k = 0; k < p.U.size(); ++k) {
    const cplx z = p.U.data()[k];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      peak = std::numeric_limits<double>::infinity();
      break;
    }
    peak = std::max(peak, std::abs(z));
  }
  if (!(peak <= kOverflowLimit)) {
    std::ostringstream os;
    os << "propagator entries exceed " << kOverflowLimit << " at t = " << t;
    throw Error(ErrorCode::Overflow, os.str());
  }
  const CMatrix m = metric(n);
  const CMatrix ub = bar(p.U);
  p.symplectic_residual = (p.U * m * ub - m).norm();
  p.adjoint_residual = (ub - p.U.adjoint()).norm();
  p.norm = p.U.norm();
  p.bar_norm = ub.norm();
  return p;
}

std::vector<std::pair<cplx, cplx>> mode_evolution(const std::vector<cplx>& lambdas,
                                                  cplx t) {
  std::vector<std::pair<cplx, cplx>> out;
  out.reserve(lambdas.size());
  const cplx i(0.0, 1.0);
  for (const auto& l : lambdas) out.emplace_back(std::exp(-i * l * t), std::exp(i * l * t));
  return out;
}

std::vector<std::pair<cplx, cplx>> mode_evolution(const DiagonalForm& df, cplx t) {
  return mode_evolution(df.lambdas, t);
}

GrowthClass growth_class(const SpectralDecomposition& s, const Tolerances& tol) {
  GrowthClass g;
  for (const auto& c : s.clusters) {
    g.rate = std::max(g.rate, std::abs(c.value.imag()));
    g.poly_degree = std::max(g.poly_degree, c.geometric < c.algebraic ? c.max_block - 1 : 0);
  }
  if (g.rate > tol.eig * s.scale) {
    g.kind = GrowthKind::Exponential;
  } else if (g.poly_degree >= 1) {
    g.kind = GrowthKind::PolynomialTimesOscillation;
  } else {
    g.kind = GrowthKind::Quasiperiodic;
  }
  return g;
}

GrowthClass growth_class(const DynamicalMatrix& d, const Tolerances& tol) {
  return growth_class(eigen_pairs(d, tol), tol);
}

OdeCheck ode_cross_check(const DynamicalMatrix& d, double t, int steps) {
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "steps must be >= 1");
  if (!std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "time must be finite");
  const auto dim = d.Ht.rows();
  const CMatrix gen = cplx(0.0, -1.0) * d.Ht;
  const double h = t / steps;
  CMatrix u = CMatrix::Identity(dim, dim);
  for (int k = 0; k < steps; ++k) {
    const CMatrix k1 = gen * u;
    const CMatrix k2 = gen * (u + 0.5 * h * k1);
    const CMatrix k3 = gen * (u + 0.5 * h * k2);
    const CMatrix k4 = gen * (u + h * k3);
    u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  const Propagator ref = propagate(d, t);
  OdeCheck out;
  out.residual = (u - ref.U).norm();
  out.relative = out.residual / std::max(ref.norm, 1e-300);
  // Local truncation error (h a)^5 / 120 per step, plus round-off, with a
  // safety factor of 10.
  const double a = d.Ht.norm();
  const double ha = std::abs(h) * a;
  out.bound = 10.0 * steps * (std::pow(ha, 5) / 120.0 + 1e-15) * std::max(1.0, ref.norm);
  if (t == 0.0) out.bound = 0.0;
  out.step_too_large = ha > 1.0 || out.residual > std::max(out.bound, 1e-300);
  if (t == 0.0) out.step_too_large = false;
  if (out.step_too_large) {
    std::ostringstream os;
    os << "step h = " << h << " is too large for ||M H|| = " << a
       << "; increase steps to at least " << static_cast<int>(std::ceil(std::abs(t) * a * 4.0));
    out.guidance = os.str();
  }
  return out;
}

}  // namespace qbf
