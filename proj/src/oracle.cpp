#include "qbf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace qbf {

long FockTruncation::index(const std::vector<int>& occupation) const {
  long idx = 0;
  for (int n : occupation) idx = idx * (n_max + 1) + n;
  return idx;
}

std::vector<int> FockTruncation::occupation(long index) const {
  std::vector<int> occ(n_modes);
  for (int k = n_modes - 1; k >= 0; --k) {
    occ[k] = static_cast<int>(index % (n_max + 1));
    index /= n_max + 1;
  }
  return occ;
}

FockTruncation fock_hamiltonian(const QuadraticForm& f, int n_max, long cap) {
  if (n_max < 1) throw Error(ErrorCode::InvalidArgument, "n_max must be >= 1");
  FockTruncation out;
  out.n_modes = f.n_modes();
  out.n_max = n_max;
  double dim = std::pow(static_cast<double>(n_max + 1), out.n_modes);
  if (dim > static_cast<double>(cap)) {
    std::ostringstream os;
    os << "Fock dimension (" << n_max + 1 << ")^" << out.n_modes << " = " << dim
       << " exceeds the cap " << cap;
    throw Error(ErrorCode::DimensionCap, os.str());
  }
  out.dim = static_cast<long>(dim);
  const int n = out.n_modes;
  const CMatrix& a = f.A();
  const CMatrix& b = f.B();
  out.H = CMatrix::Zero(out.dim, out.dim);

  const cplx constant = 0.5 * a.trace();
  for (long col = 0; col < out.dim; ++col) {
    const std::vector<int> occ = out.occupation(col);
    out.H(col, col) += constant;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        // A_ij b_i^+ b_j
        if (a(i, j) != 0.0 && occ[j] > 0) {
          std::vector<int> s = occ;
          double amp = std::sqrt(static_cast<double>(s[j]));
          --s[j];
          if (s[i] < n_max) {
            amp *= std::sqrt(static_cast<double>(s[i] + 1));
            ++s[i];
            out.H(out.index(s), col) += a(i, j) * amp;
          }
        }
        if (b(i, j) == 0.0) continue;
        // B_ij / 2 b_i^+ b_j^+
        {
          std::vector<int> s = occ;
          double amp = 1.0;
          bool ok = s[j] < n_max;
          if (ok) {
            amp *= std::sqrt(static_cast<double>(s[j] + 1));
            ++s[j];
            ok = s[i] < n_max;
          }
          if (ok) {
            amp *= std::sqrt(static_cast<double>(s[i] + 1));
            ++s[i];
            out.H(out.index(s), col) += 0.5 * b(i, j) * amp;
          }
        }
        // B*_ij / 2 b_i b_j
        {
          std::vector<int> s = occ;
          double amp = 1.0;
          bool ok = s[j] > 0;
          if (ok) {
            amp *= std::sqrt(static_cast<double>(s[j]));
            --s[j];
            ok = s[i] > 0;
          }
          if (ok) {
            amp *= std::sqrt(static_cast<double>(s[i]));
            --s[i];
            out.H(out.index(s), col) += 0.5 * std::conj(b(i, j)) * amp;
          }
        }
      }
    }
  }
  const double res = (out.H - out.H.adjoint()).norm();
  if (res > 1e-12 * std::max(1.0, out.H.norm())) {
    std::ostringstream os;
    os << "truncated Hamiltonian is not hermitian (residual " << res << ")";
    throw Error(ErrorCode::StructureViolation, os.str());
  }
  out.H = 0.5 * (out.H + out.H.adjoint()).eval();
  return out;
}

namespace {

RVector fock_levels(const QuadraticForm& f, int n_max, long cap) {
  const FockTruncation t = fock_hamiltonian(f, n_max, cap);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(t.H, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

void enumerate(const std::vector<double>& lambdas, int budget, int mode,
               std::vector<int>& occ, std::vector<std::pair<double, std::vector<int>>>& out) {
  if (mode == static_cast<int>(lambdas.size())) {
    double e = 0.0;
    for (std::size_t i = 0; i < lambdas.size(); ++i) e += lambdas[i] * (occ[i] + 0.5);
    out.emplace_back(e, occ);
    return;
  }
  for (int k = 0; k <= budget; ++k) {
    occ[mode] = k;
    enumerate(lambdas, budget - k, mode + 1, occ, out);
  }
  occ[mode] = 0;
}

}  // namespace

double ground_energy(const QuadraticForm& f, int n_max, long cap) {
  return fock_levels(f, n_max, cap)(0);
}

FockSpectrumCheck fock_spectrum_check(const QuadraticForm& f, int n_max, int k_levels,
                                      const Tolerances& tol, long cap) {
  const StabilityReport report = classify(f, tol);
  if (report.classification != Stability::PositiveDefinite) {
    std::ostringstream os;
    os << "Fock comparison needs a PositiveDefinite form, got "
       << to_string(report.classification)
       << "; without a positive H the truncated spectrum has no limit";
    throw Error(ErrorCode::WrongRegime, os.str());
  }
  if (k_levels < 1) throw Error(ErrorCode::InvalidArgument, "k_levels must be >= 1");

  std::vector<double> lambdas;
  for (const auto& l : report.mode_frequencies) lambdas.push_back(l.real());
  std::vector<std::pair<double, std::vector<int>>> lattice;
  std::vector<int> occ(lambdas.size(), 0);
  enumerate(lambdas, n_max / 2, 0, occ, lattice);
  std::stable_sort(lattice.begin(), lattice.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  if (static_cast<int>(lattice.size()) < k_levels) {
    std::ostringstream os;
    os << "only " << lattice.size() << " lattice levels have total occupation <= "
       << n_max / 2 << "; raise n_max or lower the level count";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }

  FockSpectrumCheck out;
  out.n_max = n_max;
  for (double l : lambdas) out.zero_point += 0.5 * l;
  const RVector levels = fock_levels(f, n_max, cap);
  if (levels.size() < k_levels) {
    throw Error(ErrorCode::InvalidArgument, "truncated space smaller than the level count");
  }
  for (int k = 0; k < k_levels; ++k) {
    out.levels.push_back(levels(k));
    out.predicted.push_back(lattice[k].first);
    out.predicted_occupations.push_back(lattice[k].second);
    out.max_deviation = std::max(out.max_deviation, std::abs(levels(k) - lattice[k].first));
  }

  for (int m = n_max - 6; m <= n_max; m += 2) {
    if (m < 1) continue;
    const double e0 = m == n_max ? levels(0) : ground_energy(f, m, cap);
    out.ground_trend.emplace_back(m, e0);
  }
  const double slack = 1e-10 * std::max(1.0, std::abs(out.zero_point));
  for (std::size_t i = 0; i < out.ground_trend.size(); ++i) {
    if (out.ground_trend[i].second < out.zero_point - slack) out.trend_from_above = false;
    if (i > 0 && out.ground_trend[i].second > out.ground_trend[i - 1].second + slack) {
      out.trend_from_above = false;
    }
  }
  return out;
}

}  // namespace qbf
