// Preconditioned conjugate gradients, Jacobi / l1-Jacobi / exact-LOR
// (sparse Cholesky) preconditioners, the two-level AMG for the DG graph
// Laplacian with its strongly-connected-component C/F splitting, and
// eigenvalue/condition-number estimation.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "lorfem/derham.hpp"
#include "lorfem/mesh.hpp"

namespace lorfem {

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  std::vector<double> rel_residuals;
  double wall_ms = 0.0;
  double lambda_min = 0.0;   // Ritz estimates of the preconditioned operator
  double lambda_max = 0.0;
  bool has_eigs = false;
};

using LinearOperator = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

inline LinearOperator matrix_operator(const SpMat& a) {
  return [&a](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y = a * x; };
}

enum class PrecondKind { Identity, Jacobi, L1Jacobi, LorCholesky, TwoLevelAmg };

struct Preconditioner {
  PrecondKind kind = PrecondKind::Identity;
  LinearOperator apply;
};

inline Preconditioner identity_precond() {
  return {PrecondKind::Identity,
          [](const Eigen::VectorXd& r, Eigen::VectorXd& z) { z = r; }};
}

inline Preconditioner diagonal_precond(Eigen::VectorXd d, PrecondKind kind = PrecondKind::Jacobi) {
  for (int i = 0; i < d.size(); ++i)
    if (!(d[i] > 0.0)) throw std::invalid_argument("diagonal_precond: nonpositive entry");
  auto inv = std::make_shared<Eigen::VectorXd>(d.cwiseInverse());
  return {kind, [inv](const Eigen::VectorXd& r, Eigen::VectorXd& z) {
            z = inv->cwiseProduct(r);
          }};
}

inline Preconditioner jacobi_precond(const SpMat& a) {
  return diagonal_precond(a.diagonal(), PrecondKind::Jacobi);
}

/// l1-Jacobi: diagonal plus row sums of the off-diagonal magnitudes,
/// convergent for SPD matrices without damping.
inline Eigen::VectorXd l1_diagonal(const SpMat& a) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(a.rows());
  for (int r = 0; r < a.outerSize(); ++r)
    for (SpMat::InnerIterator it(a, r); it; ++it)
      d[it.row()] += (it.row() == it.col()) ? it.value() : std::abs(it.value());
  return d;
}

inline Preconditioner l1_jacobi_precond(const SpMat& a) {
  return diagonal_precond(l1_diagonal(a), PrecondKind::L1Jacobi);
}

/// Exact solve with the LOR operator: sparse Cholesky with a
/// fill-reducing (AMD) ordering. PCG preconditioned with this measures the
/// (A_h^-1 A_p) conditioning directly.
inline Preconditioner lor_cholesky_setup(const SpMat& a_h) {
  auto llt = std::make_shared<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>();
  Eigen::SparseMatrix<double> ac = a_h;  // column-major copy
  llt->compute(ac);
  if (llt->info() != Eigen::Success)
    throw std::runtime_error("lor_cholesky_setup: matrix is not SPD");
  return {PrecondKind::LorCholesky,
          [llt](const Eigen::VectorXd& r, Eigen::VectorXd& z) { z = llt->solve(r); }};
}

/// Preconditioned conjugate gradients. The alpha/beta coefficients feed the
/// Lanczos tridiagonal whose extreme Ritz values estimate the spectrum of
/// the preconditioned operator.
inline std::pair<Eigen::VectorXd, SolveReport> pcg(const LinearOperator& a,
                                                   const Eigen::VectorXd& b,
                                                   const Preconditioner& prec,
                                                   double rel_tol, int max_iter,
                                                   bool want_eigs = false) {
  auto t0 = std::chrono::steady_clock::now();
  const int n = static_cast<int>(b.size());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  SolveReport rep;
  double bnorm = b.norm();
  rep.rel_residuals.push_back(bnorm > 0 ? 1.0 : 0.0);
  if (bnorm == 0.0) {
    rep.converged = true;
    rep.rel_residuals.back() = 0.0;
    return {x, rep};
  }
  Eigen::VectorXd r = b, z(n), q(n);
  prec.apply(r, z);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  std::vector<double> alphas, betas;
  for (int it = 1; it <= max_iter; ++it) {
    a(p, q);
    double pq = p.dot(q);
    if (!(pq > 0.0)) {
      rep.iterations = it - 1;
      rep.converged = false;  // indefiniteness breakdown
      break;
    }
    double alpha = rz / pq;
    x += alpha * p;
    r -= alpha * q;
    double rel = r.norm() / bnorm;
    rep.rel_residuals.push_back(rel);
    rep.iterations = it;
    alphas.push_back(alpha);
    if (rel <= rel_tol) {
      rep.converged = true;
      break;
    }
    prec.apply(r, z);
    double rz_new = r.dot(z);
    double beta = rz_new / rz;
    betas.push_back(beta);
    p = z + beta * p;
    rz = rz_new;
  }
  if (want_eigs && !alphas.empty()) {
    int k = static_cast<int>(alphas.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      t(i, i) = 1.0 / alphas[i];
      if (i > 0) t(i, i) += betas[i - 1] / alphas[i - 1];
      if (i + 1 < k) {
        double off = std::sqrt(betas[i]) / alphas[i];
        t(i, i + 1) = off;
        t(i + 1, i) = off;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
    rep.lambda_min = es.eigenvalues().minCoeff();
    rep.lambda_max = es.eigenvalues().maxCoeff();
    rep.has_eigs = true;
  }
  rep.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return {x, rep};
}

inline std::pair<Eigen::VectorXd, SolveReport> pcg(const SpMat& a, const Eigen::VectorXd& b,
                                                   const Preconditioner& prec,
                                                   double rel_tol, int max_iter,
                                                   bool want_eigs = false) {
  return pcg(matrix_operator(a), b, prec, rel_tol, max_iter, want_eigs);
}

// C/F splitting of a graph Laplacian driven by strongly connected
// (boundary, eta-scaled) edges: one C-point per strongly connected
// component, everything else F. Vertices with no strong edge form the
// interior set (component id -1).
struct CfSplit {
  std::vector<char> is_coarse;      // per vertex
  std::vector<int> component;       // component id, -1 for the interior set
  std::vector<int> representative;  // component id -> C-point vertex
  int n_components = 0;

  int n_interior() const {
    int n = 0;
    for (int c : component) n += (c < 0);
    return n;
  }
};

enum class CfMode { Geometric, Threshold };

inline CfSplit cf_split(const SpMat& lap, const LorMesh& lor, CfMode mode,
                        double theta = 0.5) {
  const int n = static_cast<int>(lap.rows());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  std::vector<char> has_strong(n, 0);

  if (mode == CfMode::Geometric) {
    // Strong edges are exactly the fine faces lying in interior coarse faces.
    const int m = lor.subdiv;
    const int d = lor.coarse.dim;
    for (const FineFace& f : lor.all_faces(false)) {
      if (lor.classify(f) != FaceClass::MacroBoundary) continue;
      std::array<int, 3> cl = {0, 0, 0}, cr;
      auto t = lor.transversal_axes(f.axis);
      if (t[0] >= 0) cl[t[0]] = f.cell[0];
      if (t[1] >= 0) cl[t[1]] = f.cell[1];
      cr = cl;
      cl[f.axis] = f.line - 1;
      cr[f.axis] = f.line;
      auto dof = [&](std::array<int, 3> c) {
        int idx = 0, stride = 1;
        // element-major local-lex, matching the DG space numbering
        std::array<int, 3> ec = {0, 0, 0}, li = {0, 0, 0};
        for (int a = 0; a < d; ++a) {
          ec[a] = c[a] / m;
          li[a] = c[a] % m;
        }
        int e = lor.coarse.element_index(ec);
        for (int a = 0; a < d; ++a) {
          idx += li[a] * stride;
          stride *= m;
        }
        return e * stride + idx;
      };
      int i = dof(cl), j = dof(cr);
      unite(i, j);
      has_strong[i] = has_strong[j] = 1;
    }
  } else {
    // Weight separation against the global maximum: the eta-scaled boundary
    // weights form the strong group once eta dominates. (A row-local
    // maximum would mark interior-only rows strong and could never
    // reproduce the geometric split.)
    double wmax = 0.0;
    for (int r = 0; r < lap.outerSize(); ++r)
      for (SpMat::InnerIterator it(lap, r); it; ++it)
        if (it.row() != it.col()) wmax = std::max(wmax, -it.value());
    for (int r = 0; r < lap.outerSize(); ++r)
      for (SpMat::InnerIterator it(lap, r); it; ++it) {
        if (it.row() >= it.col()) continue;
        double w = -it.value();
        if (w >= theta * wmax && w > 0.0) {
          unite(it.row(), it.col());
          has_strong[it.row()] = has_strong[it.col()] = 1;
        }
      }
  }

  CfSplit split;
  split.is_coarse.assign(n, 0);
  split.component.assign(n, -1);
  std::vector<int> comp_id(n, -1);
  for (int v = 0; v < n; ++v) {
    if (!has_strong[v]) continue;  // interior set
    int root = find(v);
    if (comp_id[root] < 0) {
      comp_id[root] = split.n_components++;
      split.representative.push_back(v);  // lowest index reaches root first
      split.is_coarse[v] = 1;
    }
    split.component[v] = comp_id[root];
  }
  return split;
}

/// Two-level method for the DG graph Laplacian: C-points carry the coarse
/// space, F-points inside a component copy their component's C-point
/// (interpolation preserves constants there), interior F-points average
/// over adjacent C-points; Galerkin coarse operator with a direct solve and
/// l1-Jacobi pre/post smoothing.
inline Preconditioner two_level_amg_setup(const SpMat& lap, const CfSplit& split) {
  const int n = static_cast<int>(lap.rows());
  const int nc = split.n_components;
  if (nc == 0) throw std::invalid_argument("two_level_amg_setup: empty coarse space");

  std::vector<Eigen::Triplet<double>> pt;
  for (int v = 0; v < n; ++v) {
    if (split.component[v] >= 0) {
      pt.emplace_back(v, split.component[v], 1.0);
    } else {
      // Normalized strong-neighbor averaging over adjacent C-points.
      double total = 0.0;
      for (SpMat::InnerIterator it(lap, v); it; ++it)
        if (it.col() != v && split.is_coarse[it.col()] && it.value() < 0.0)
          total += -it.value();
      if (total > 0.0)
        for (SpMat::InnerIterator it(lap, v); it; ++it)
          if (it.col() != v && split.is_coarse[it.col()] && it.value() < 0.0)
            pt.emplace_back(v, split.component[it.col()], -it.value() / total);
    }
  }
  auto p = std::make_shared<SpMat>(n, nc);
  p->setFromTriplets(pt.begin(), pt.end());

  Eigen::MatrixXd ac = Eigen::MatrixXd(SpMat(p->transpose()) * lap * (*p));
  auto coarse = std::make_shared<Eigen::LDLT<Eigen::MatrixXd>>(ac);
  auto dinv = std::make_shared<Eigen::VectorXd>(l1_diagonal(lap).cwiseInverse());
  auto lp = std::make_shared<SpMat>(lap);

  auto apply = [p, coarse, dinv, lp](const Eigen::VectorXd& r, Eigen::VectorXd& z) {
    Eigen::VectorXd x = dinv->cwiseProduct(r);             // pre-smooth
    Eigen::VectorXd res = r - (*lp) * x;
    x += (*p) * coarse->solve(p->transpose() * res);       // coarse correction
    res = r - (*lp) * x;
    x += dinv->cwiseProduct(res);                          // post-smooth
    z = x;
  };
  return {PrecondKind::TwoLevelAmg, apply};
}

struct CondEstimate {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double cond = 0.0;
  bool exact = true;  // false for Lanczos Ritz estimates
};

/// Extreme generalized eigenvalues of the SPD pencil (A, B) by Cholesky
/// reduction and a dense symmetric eigensolve; B = identity when absent.
inline CondEstimate estimate_condition_dense(const Eigen::MatrixXd& a,
                                             const Eigen::MatrixXd* b = nullptr) {
  if (a.rows() > 5000)
    throw std::invalid_argument("estimate_condition_dense: dimension exceeds 5000");
  CondEstimate out;
  if (b) {
    Eigen::LLT<Eigen::MatrixXd> llt(*b);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("estimate_condition_dense: B is not SPD");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, *b,
                                                                 Eigen::EigenvaluesOnly);
    out.lambda_min = es.eigenvalues().minCoeff();
    out.lambda_max = es.eigenvalues().maxCoeff();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    out.lambda_min = es.eigenvalues().minCoeff();
    out.lambda_max = es.eigenvalues().maxCoeff();
  }
  out.cond = out.lambda_max / out.lambda_min;
  return out;
}

/// Lanczos estimate (no reorthogonalization) of the extreme eigenvalues of
/// the B-preconditioned operator, via the PCG coefficient tridiagonal.
inline CondEstimate estimate_condition_lanczos(const LinearOperator& a, int n,
                                               const Preconditioner& b,
                                               int steps = 200, unsigned seed = 7) {
  Eigen::VectorXd rhs(n);
  std::uint64_t state = seed * 0x9E3779B97F4A7C15ull + 1;
  for (int i = 0; i < n; ++i) {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    rhs[i] = 2.0 * (static_cast<double>(state >> 11) / 9007199254740992.0) - 1.0;
  }
  auto [x, rep] = pcg(a, rhs, b, 0.0, steps, true);
  (void)x;
  CondEstimate out;
  out.lambda_min = rep.lambda_min;
  out.lambda_max = rep.lambda_max;
  out.cond = rep.lambda_max / rep.lambda_min;
  out.exact = false;
  return out;
}

}  // namespace lorfem
