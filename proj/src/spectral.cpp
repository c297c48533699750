#include "qbf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qbf {

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::PositiveDefinite: return "PositiveDefinite";
    case Stability::StableNonPositive: return "StableNonPositive";
    case Stability::UnstableComplex: return "UnstableComplex";
    case Stability::NonDiagonalizable: return "NonDiagonalizable";
  }
  return "Unknown";
}

double StabilityReport::max_imag() const {
  double m = 0.0;
  for (const auto& l : mode_frequencies) m = std::max(m, std::abs(l.imag()));
  return m;
}

namespace {

struct Cluster {
  std::vector<int> members;
  cplx mean{};
  int geometric = 0;
  int max_block = 1;
  double rank_gap = 0.0;
  CMatrix basis;  // eigenvectors, one per column (empty when defective)
};

int numerical_rank(const CMatrix& m, double tol, double* gap = nullptr) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& sv = svd.singularValues();
  int r = 0;
  double smallest_kept = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) {
      ++r;
      smallest_kept = std::min(smallest_kept, sv(i));
    }
  }
  if (gap) *gap = std::isfinite(smallest_kept) ? smallest_kept : 0.0;
  return r;
}

// Right singular vectors for the `count` smallest singular values.
CMatrix null_space(const CMatrix& m, int count) {
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
  const auto cols = svd.matrixV().cols();
  return svd.matrixV().rightCols(std::min<Eigen::Index>(count, cols));
}

bool descending(const cplx& a, const cplx& b) {
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

// Union-find style grouping. Two eigenvalues join the same cluster when they
// agree to round-off, or when they are within the cluster tolerance and their
// eigenvectors are numerically parallel (the signature of a Jordan block).
std::vector<Cluster> group(const CVector& values, const CMatrix& vectors,
                           double close, double exact) {
  const int m = static_cast<int>(values.size());
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      const double dist = std::abs(values(a) - values(b));
      if (dist > close) continue;
      bool join = dist <= exact;
      if (!join) {
        const double overlap = std::abs(vectors.col(a).dot(vectors.col(b))) /
                               (vectors.col(a).norm() * vectors.col(b).norm());
        join = 1.0 - overlap < 1e-6;
      }
      if (join) parent[find(a)] = find(b);
    }
  }
  std::vector<Cluster> out;
  std::vector<int> index(m, -1);
  for (int a = 0; a < m; ++a) {
    const int root = find(a);
    if (index[root] < 0) {
      index[root] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[index[root]].members.push_back(a);
  }
  for (auto& c : out) {
    cplx sum = 0.0;
    for (int k : c.members) sum += values(k);
    c.mean = sum / static_cast<double>(c.members.size());
  }
  return out;
}

void analyze_cluster(Cluster& c, const CMatrix& ht, const CMatrix& vectors,
                     double rank_tol) {
  const int dim = static_cast<int>(ht.rows());
  const int alg = static_cast<int>(c.members.size());
  if (alg == 1) {
    c.geometric = 1;
    c.basis = vectors.col(c.members.front()).normalized();
    return;
  }
  const CMatrix shifted = ht - c.mean * CMatrix::Identity(dim, dim);
  const int r1 = numerical_rank(shifted, rank_tol, &c.rank_gap);
  c.geometric = std::min(alg, dim - r1);
  if (c.geometric == alg) {
    c.max_block = 1;
    c.basis = null_space(shifted, alg);
    return;
  }
  // Jordan structure from the rank sequence of powers of the shifted matrix:
  // the number of blocks of size >= k is rank(N^(k-1)) - rank(N^k).
  int prev = dim;
  CMatrix power = CMatrix::Identity(dim, dim);
  const double nnorm = std::max(1.0, shifted.norm());
  double tolk = 1.0;
  c.max_block = 1;
  for (int k = 1; k <= alg; ++k) {
    power = power * shifted;
    tolk *= nnorm;
    const int rk = numerical_rank(power, rank_tol * tolk / nnorm);
    if (prev - rk > 0) c.max_block = k;
    if (rk == prev) break;
    prev = rk;
  }
  c.max_block = std::max(c.max_block, 2);
}

// Symplectic Gram-Schmidt inside a self-paired (lambda = 0) eigenspace.
std::vector<ModePair> zero_modes(CMatrix space, double null_tol) {
  std::vector<ModePair> modes;
  const int k = static_cast<int>(space.cols()) / 2;
  for (int step = 0; step < k; ++step) {
    ModePair mp;
    mp.lambda = 0.0;
    mp.hermitian_pair = true;
    const CMatrix g = space.adjoint() * apply_metric(space);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (g + g.adjoint()));
    const double d = es.eigenvalues()(es.eigenvalues().size() - 1);
    const CVector v = space * es.eigenvectors().col(es.eigenvalues().size() - 1);
    if (d <= null_tol) {
      mp.w_plus = v;
      mp.w_minus = conj_swap(v);
      mp.norm_ok = false;
      modes.push_back(mp);
      continue;
    }
    const CVector w = v / std::sqrt(d);
    const CVector wb = conj_swap(w);
    mp.w_plus = w;
    mp.w_minus = wb;
    mp.norm_ok = true;
    modes.push_back(mp);
    // Remove the symplectic plane spanned by (w, wb) from the space.
    CMatrix projected = space;
    for (Eigen::Index c = 0; c < space.cols(); ++c) {
      const CVector x = space.col(c);
      projected.col(c) = x - metric_product(wb, x) * w + metric_product(w, x) * wb;
    }
    Eigen::JacobiSVD<CMatrix> svd(projected, Eigen::ComputeThinU);
    const int keep = static_cast<int>(space.cols()) - 2;
    if (keep <= 0) break;
    space = svd.matrixU().leftCols(keep);
  }
  return modes;
}

}  // namespace

SpectralDecomposition eigen_pairs(const DynamicalMatrix& d, const Tolerances& tol) {
  const CMatrix& ht = d.Ht;
  const int dim = static_cast<int>(ht.rows());
  const int n = dim / 2;
  if (dim == 0 || dim % 2 != 0 || ht.cols() != dim) {
    throw Error(ErrorCode::DimensionMismatch, "dynamical matrix must be 2n x 2n");
  }

  SpectralDecomposition out;
  out.n_modes = n;
  out.scale = std::max(1.0, ht.norm());
  const double scale = out.scale;

  Eigen::ComplexEigenSolver<CMatrix> solver(ht, true);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::PairingFailure, "eigensolver did not converge");
  }
  const CVector values = solver.eigenvalues();
  const CMatrix vectors = solver.eigenvectors();
  out.eigenvalues.assign(values.data(), values.data() + values.size());

  auto clusters = group(values, vectors, tol.cluster * scale, 1e-12 * scale);
  for (auto& c : clusters) {
    analyze_cluster(c, ht, vectors, tol.rank * scale);
    if (c.geometric < static_cast<int>(c.members.size())) out.diagonalizable = false;
    out.clusters.push_back({c.mean, static_cast<int>(c.members.size()), c.geometric,
                            c.max_block, c.rank_gap});
  }

  // Greedy nearest-negation matching at the cluster level.
  const int nc = static_cast<int>(clusters.size());
  std::vector<int> partner(nc, -1);
  std::vector<int> order(nc);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(clusters[a].mean) > std::abs(clusters[b].mean);
  });
  const double pair_tol = tol.pair * scale;
  for (int a : order) {
    if (partner[a] >= 0) continue;
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int b = 0; b < nc; ++b) {
      if (partner[b] >= 0) continue;
      if (b == a && clusters[a].members.size() % 2 != 0) continue;
      const double dist = std::abs(clusters[a].mean + clusters[b].mean);
      if (dist < best_dist) {
        best_dist = dist;
        best = b;
      }
    }
    if (best < 0 || best_dist > pair_tol ||
        clusters[best].members.size() != clusters[a].members.size()) {
      std::ostringstream os;
      os << "no (lambda, -lambda) partner for eigenvalue " << clusters[a].mean
         << " within " << pair_tol;
      throw Error(ErrorCode::PairingFailure, os.str());
    }
    partner[a] = best;
    partner[best] = a;
    out.pairing_residual = std::max(out.pairing_residual, best_dist);
  }

  const double eig_tol = tol.eig * scale;
  std::vector<ModePair> modes;
  struct Pending {
    int cluster;
    int other;
  };
  std::vector<Pending> derived;

  for (int a = 0; a < nc; ++a) {
    const int b = partner[a];
    if (b < a) continue;  // each cluster pair once; b == a is a self pair
    const Cluster& ca = clusters[a];
    const Cluster& cb = clusters[b];
    const int m = static_cast<int>(ca.members.size());
    const bool defective = ca.geometric < m || cb.geometric < m;
    cplx lambda = 0.5 * (ca.mean - cb.mean);
    const bool is_real = std::abs(lambda.imag()) <= eig_tol;
    if (is_real) lambda = lambda.real();

    if (defective) {
      // Frequencies only; the pair has no generalized norm.
      if (is_real ? lambda.real() < 0.0
                  : (lambda.imag() < 0.0 ||
                     (lambda.imag() == 0.0 && lambda.real() < 0.0))) {
        lambda = -lambda;
      }
      const int count = (a == b) ? m / 2 : m;
      for (int k = 0; k < count; ++k) {
        ModePair mp;
        mp.lambda = lambda;
        mp.w_plus = CVector::Zero(dim);
        mp.w_minus = CVector::Zero(dim);
        modes.push_back(mp);
      }
      continue;
    }

    if (a == b) {
      auto zm = zero_modes(ca.basis, tol.null_norm);
      modes.insert(modes.end(), zm.begin(), zm.end());
      continue;
    }

    if (is_real) {
      // Sign convention: the +lambda member has positive usual norm.
      const CMatrix& x = ca.basis;
      const CMatrix g = x.adjoint() * apply_metric(x);
      Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (g + g.adjoint()));
      const double lam_a = ca.mean.real() >= 0.0 ? std::abs(lambda.real())
                                                 : -std::abs(lambda.real());
      for (Eigen::Index k = es.eigenvalues().size() - 1; k >= 0; --k) {
        const double norm = es.eigenvalues()(k);
        const CVector v = x * es.eigenvectors().col(k);
        ModePair mp;
        mp.hermitian_pair = true;
        mp.norm_ok = std::abs(norm) > tol.null_norm;
        if (norm >= 0.0) {
          mp.lambda = lam_a;
          mp.w_plus = v;
        } else {
          mp.lambda = -lam_a;
          mp.w_plus = conj_swap(v);
        }
        mp.w_minus = conj_swap(mp.w_plus);
        modes.push_back(mp);
      }
      continue;
    }

    // Complex: the member with Im > 0 (ties: Re > 0) is lambda.
    const bool a_first = ca.mean.imag() > 0.0 ||
                         (ca.mean.imag() == 0.0 && ca.mean.real() > 0.0);
    const Cluster& cp = a_first ? ca : cb;
    const Cluster& cq = a_first ? cb : ca;
    lambda = 0.5 * (cp.mean - cq.mean);
    if (lambda.real() < -eig_tol) {
      derived.push_back({a_first ? a : b, a_first ? b : a});
      continue;
    }
    const CMatrix& x = cp.basis;
    const CMatrix& y = cq.basis;
    if (m == 1) {
      ModePair mp;
      mp.lambda = lambda;
      mp.w_plus = x.col(0);
      mp.w_minus = y.col(0);
      mp.norm_ok = std::abs(metric_product(mp.w_minus, mp.w_plus)) > tol.null_norm;
      modes.push_back(mp);
    } else {
      // Biorthogonalize the two eigenspaces through the SVD of bar(Y) M X.
      CMatrix g(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) g(i, j) = metric_product(y.col(i), x.col(j));
      Eigen::JacobiSVD<CMatrix> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const CMatrix xp = x * svd.matrixV();
      const CMatrix yp = y * svd.matrixU().conjugate();
      for (int k = 0; k < m; ++k) {
        ModePair mp;
        mp.lambda = lambda;
        mp.w_plus = xp.col(k);
        mp.w_minus = yp.col(k);
        mp.norm_ok = svd.singularValues()(k) > tol.null_norm;
        modes.push_back(mp);
      }
    }
  }

  // Members with Re(lambda) < 0 follow from their partner at -lambda^*.
  for (const auto& p : derived) {
    const cplx lambda = 0.5 * (clusters[p.cluster].mean - clusters[p.other].mean);
    const cplx target = -std::conj(lambda);
    std::vector<int> sources;
    for (int k = 0; k < static_cast<int>(modes.size()); ++k) {
      if (!modes[k].derived && std::abs(modes[k].lambda - target) <= pair_tol &&
          modes[k].conjugate_partner < 0) {
        sources.push_back(k);
      }
    }
    const int m = static_cast<int>(clusters[p.cluster].members.size());
    if (static_cast<int>(sources.size()) < m) {
      throw Error(ErrorCode::PairingFailure,
                  "missing conjugate partner for a complex mode");
    }
    for (int k = 0; k < m; ++k) {
      const int s = sources[k];
      ModePair mp;
      mp.lambda = -std::conj(modes[s].lambda);
      mp.w_plus = conj_swap(modes[s].w_plus);
      mp.w_minus = conj_swap(modes[s].w_minus);
      mp.norm_ok = modes[s].norm_ok;
      mp.derived = true;
      mp.conjugate_partner = s;
      modes[s].conjugate_partner = static_cast<int>(modes.size());
      modes.push_back(mp);
    }
  }

  if (static_cast<int>(modes.size()) != n) {
    throw Error(ErrorCode::PairingFailure, "mode count does not match n_modes");
  }

  // Stable order with partner indices remapped.
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
    return descending(modes[a].lambda, modes[b].lambda);
  });
  std::vector<int> where(n);
  for (int k = 0; k < n; ++k) where[perm[k]] = k;
  out.pairs.reserve(n);
  for (int k = 0; k < n; ++k) {
    ModePair mp = modes[perm[k]];
    if (mp.conjugate_partner >= 0) mp.conjugate_partner = where[mp.conjugate_partner];
    out.pairs.push_back(std::move(mp));
  }

  if (!out.diagonalizable) {
    out.warnings.push_back(
        "Jordan blocks detected: M H is not diagonalizable");
  }
  return out;
}

namespace {

// Fixes the scale freedom w+ -> g w+, w- -> w- / g: the largest component of
// w+ equals its conjugate-swap counterpart in w- and has positive real part.
void fix_gauge(CVector& wp, CVector& wm) {
  const auto dim = wp.size();
  const auto n = dim / 2;
  const double peak = wp.cwiseAbs().maxCoeff();
  Eigen::Index k = 0;
  while (k < dim && std::abs(wp(k)) < (1.0 - 1e-8) * peak) ++k;
  const Eigen::Index kb = k < n ? k + n : k - n;
  if (std::abs(wp(k)) == 0.0 || std::abs(wm(kb)) == 0.0) return;
  const cplx g = std::sqrt(wm(kb) / wp(k));
  wp *= g;
  wm /= g;
  const cplx lead = wp(k);
  if (lead.real() < 0.0 || (lead.real() == 0.0 && lead.imag() < 0.0)) {
    wp = -wp;
    wm = -wm;
  }
}

BogoliubovTransform assemble(std::vector<CVector> wp, std::vector<CVector> wm,
                             std::vector<cplx> lambdas, std::vector<bool> herm) {
  const int n = static_cast<int>(lambdas.size());
  BogoliubovTransform bt;
  bt.W.resize(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    bt.W.col(i) = wp[i];
    bt.W.col(n + i) = wm[i];
  }
  bt.W_inv = apply_metric(bar(bt.W) * metric(n));
  bt.lambdas = std::move(lambdas);
  bt.hermitian = std::move(herm);
  const CMatrix m = metric(n);
  bt.symplectic_residual = (bt.W * m * bar(bt.W) - m).norm();
  bt.inverse_residual = (bt.W * bt.W_inv - CMatrix::Identity(2 * n, 2 * n)).norm();
  Eigen::JacobiSVD<CMatrix> svd(bt.W);
  const auto& sv = svd.singularValues();
  bt.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                         : std::numeric_limits<double>::infinity();
  return bt;
}

}  // namespace

BogoliubovTransform normalize_pairs(const SpectralDecomposition& s,
                                    const Tolerances& tol) {
  if (!s.diagonalizable) {
    throw Error(ErrorCode::NotDiagonalizable,
                "M H has Jordan blocks; no Bogoliubov transform exists");
  }
  const int n = static_cast<int>(s.pairs.size());
  std::vector<CVector> wp(n), wm(n);
  std::vector<cplx> lambdas(n);
  std::vector<bool> herm(n);
  for (int i = 0; i < n; ++i) {
    const ModePair& p = s.pairs[i];
    lambdas[i] = p.lambda;
    herm[i] = p.hermitian_pair;
    if (p.derived) continue;
    const cplx c = metric_product(p.w_minus, p.w_plus);
    if (std::abs(c) < tol.null_norm) {
      std::ostringstream os;
      os << "generalized norm of mode " << i << " (lambda = " << p.lambda
         << ") vanishes: |c| = " << std::abs(c);
      throw Error(ErrorCode::NullNorm, os.str());
    }
    const cplx f = 1.0 / std::sqrt(c);
    wp[i] = f * p.w_plus;
    wm[i] = f * p.w_minus;
    fix_gauge(wp[i], wm[i]);
    if (p.hermitian_pair) wm[i] = conj_swap(wp[i]);
  }
  const cplx iu(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    const ModePair& p = s.pairs[i];
    if (!p.derived) continue;
    // b'_j = i T-conjugate of the partner, which gives b'_partner^+ = i b'_j.
    wp[i] = iu * conj_swap(wp[p.conjugate_partner]);
    wm[i] = iu * conj_swap(wm[p.conjugate_partner]);
  }
  return assemble(std::move(wp), std::move(wm), std::move(lambdas), std::move(herm));
}

BogoliubovTransform swap_mode_labeling(const BogoliubovTransform& bt, int mode) {
  const int n = bt.n_modes();
  if (mode < 0 || mode >= n) {
    throw Error(ErrorCode::InvalidArgument, "mode index out of range");
  }
  std::vector<CVector> wp(n), wm(n);
  for (int i = 0; i < n; ++i) {
    wp[i] = bt.W.col(i);
    wm[i] = bt.W.col(n + i);
  }
  auto lambdas = bt.lambdas;
  auto herm = bt.hermitian;
  // b'' = -bbar', bbar'' = b'  =>  W''_i = -W_ibar, W''_ibar = W_i.
  const CVector old_plus = wp[mode];
  wp[mode] = -wm[mode];
  wm[mode] = old_plus;
  lambdas[mode] = -lambdas[mode];
  herm[mode] = false;
  return assemble(std::move(wp), std::move(wm), std::move(lambdas), std::move(herm));
}

StabilityReport classify(const QuadraticForm& f, const Tolerances& tol) {
  StabilityReport r;
  const ExtendedMatrix h = extended_matrix(f);
  Eigen::SelfAdjointEigenSolver<CMatrix> hs(h.H, Eigen::EigenvaluesOnly);
  r.h_eigenvalues = hs.eigenvalues();

  r.spectrum = eigen_pairs(dynamical_matrix(f), tol);
  const double eig_tol = tol.eig * r.spectrum.scale;
  r.diagonalizable = r.spectrum.diagonalizable;
  r.warnings = r.spectrum.warnings;
  for (const auto& p : r.spectrum.pairs) {
    r.mode_frequencies.push_back(p.lambda);
    if (std::abs(p.lambda) <= eig_tol) ++r.zero_mode_count;
  }

  if (r.diagonalizable) {
    try {
      r.transform = normalize_pairs(r.spectrum, tol);
      if (r.transform->condition > 1.0 / tol.grid) {
        std::ostringstream os;
        os << "near-defective: eigenvector basis condition number "
           << r.transform->condition;
        r.warnings.push_back(os.str());
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NullNorm) throw;
      r.diagonalizable = false;
      r.warnings.push_back(std::string("treated as defective: ") + e.what());
    }
  }

  bool all_real = true;
  for (const auto& l : r.mode_frequencies) {
    if (std::abs(l.imag()) > eig_tol) all_real = false;
  }
  if (!r.diagonalizable) {
    r.classification = Stability::NonDiagonalizable;
    if (all_real && r.zero_mode_count == 0) {
      r.warnings.push_back(
          "eigenvalues all real and non-zero; Jordan blocks detected");
    }
  } else if (!all_real) {
    r.classification = Stability::UnstableComplex;
  } else if (r.h_eigenvalues.minCoeff() > eig_tol) {
    r.classification = Stability::PositiveDefinite;
  } else {
    r.classification = Stability::StableNonPositive;
  }
  return r;
}

}  // namespace qbf
