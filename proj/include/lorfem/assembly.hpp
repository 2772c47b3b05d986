// Global assembly of mass and stiffness operators for the five spaces, on
// affine Cartesian meshes. Element matrices are Kronecker products of 1D
// reference factors scaled by the Piola weights; stiffness operators are
// formed through the incidence-plus-next-space-mass identity
// K = Inc^T M_next Inc, which enforces the discrete complex structure by
// construction. The low-order-refined assembly reuses the same layouts and
// incidence with the piecewise linear/constant 1D factors.
#pragma once

#include <Eigen/Sparse>
#include <array>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "lorfem/basis1d.hpp"
#include "lorfem/derham.hpp"
#include "lorfem/fespace.hpp"

namespace lorfem {

// Piecewise-constant coefficients per coarse element: alpha scales the
// stiffness term, beta the mass term. Empty means 1.
struct Coefficients {
  std::vector<double> alpha;
  std::vector<double> beta;

  double a(int e) const { return alpha.empty() ? 1.0 : alpha.at(e); }
  double b(int e) const { return beta.empty() ? 1.0 : beta.at(e); }
};

enum class OpTag { Mass, Stiffness, MassPlusStiffness, IpDg, IpDgLor, GraphLaplacian };

struct AssembledOp {
  SpMat mat;
  SpaceKind kind = SpaceKind::H1;
  OpTag tag = OpTag::Mass;
  QuadMode quad = QuadMode::Exact;
};

namespace detail {

// Mass Piola weight for one vector component on an axis-aligned element
// with the given physical widths: |J| for H1/DG, J^{-1}J^{-T}|J| for
// H(curl), J^T J / |J| for H(div), |J|^{-1} for L2.
inline double mass_weight(SpaceKind kind, int comp, const std::array<double, 3>& w,
                          int dim) {
  double detj = 1.0;
  for (int a = 0; a < dim; ++a) detj *= 0.5 * w[a];
  switch (kind) {
    case SpaceKind::H1:
    case SpaceKind::DG:
      return detj;
    case SpaceKind::L2:
      return 1.0 / detj;
    case SpaceKind::HCurl: {
      double s = 2.0 / w[comp];
      return s * s * detj;
    }
    case SpaceKind::HDiv: {
      double s = 0.5 * w[comp];
      return s * s / detj;
    }
  }
  return detj;
}

// 1D mass factor of the basis used along a histopolation direction.
inline Eigen::MatrixXd disc_mass_1d(const NodalRule& rule, BasisVariant variant,
                                    QuadMode qm) {
  const int p = rule.degree;
  switch (variant) {
    case BasisVariant::Histopolation:
      return mass_histop_1d(rule, qm);
    case BasisVariant::Legendre: {
      // Nodal basis at the p Gauss points; its exact mass is diagonal.
      QuadRule g = gauss_legendre_rule(p);
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
      for (int i = 0; i < p; ++i) m(i, i) = g.weights[i];
      return m;
    }
    case BasisVariant::Lobatto: {
      if (p == 1) return Eigen::MatrixXd::Constant(1, 1, 2.0);
      NodalRule low = gauss_lobatto_rule(p - 1);
      Basis1D b = make_nodal_basis(low.points);
      if (qm == QuadMode::Collocated)
        return detail::gram(b, low.points, low.weights, false);
      QuadRule q = gauss_legendre_rule(p);
      return detail::gram(b, q.points, q.weights, false);
    }
  }
  throw std::logic_error("disc_mass_1d: unknown variant");
}

// Per-axis 1D mass factors for one component.
inline std::array<Eigen::MatrixXd, 3> mass_factors(const FeSpace& s, int comp,
                                                   const NodalRule& rule, QuadMode qm,
                                                   bool low_order) {
  std::array<Eigen::MatrixXd, 3> f;
  for (int a = 0; a < s.dim(); ++a) {
    if (s.interp_axis(comp, a))
      f[a] = low_order ? mass_linear_1d(rule, qm) : mass_interp_1d(rule, qm);
    else
      f[a] = low_order ? mass_constant_1d(rule, qm)
                       : disc_mass_1d(rule, s.variant, qm);
  }
  return f;
}

}  // namespace detail

inline SpaceKind stiffness_target_kind(SpaceKind kind, int dim) {
  switch (kind) {
    case SpaceKind::H1:
      return dim == 1 ? SpaceKind::L2 : SpaceKind::HCurl;
    case SpaceKind::HCurl:
      return dim == 2 ? SpaceKind::L2 : SpaceKind::HDiv;
    case SpaceKind::HDiv:
      return SpaceKind::L2;
    default:
      throw std::invalid_argument("stiffness_target_kind: space has no stiffness");
  }
}

inline IncidenceKind stiffness_incidence_kind(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::H1:
      return IncidenceKind::Grad;
    case SpaceKind::HCurl:
      return IncidenceKind::Curl;
    case SpaceKind::HDiv:
      return IncidenceKind::Div;
    default:
      throw std::invalid_argument("stiffness_incidence_kind: space has no stiffness");
  }
}

/// Global DOF-level differential operator between two spaces on the same
/// mesh and degree. Entry values are the reference subinterval differences
/// +-1/h_i; the same matrix serves the high-order and LOR representations.
inline SpMat global_incidence(IncidenceKind kind, const FeSpace& src, const FeSpace& dst) {
  if (src.degree != dst.degree)
    throw std::invalid_argument("global_incidence: degree mismatch");
  const int p = src.degree;
  const int d = src.dim();
  NodalRule rule = gauss_lobatto_rule(p);
  auto gap = [&](int t) { return rule.subinterval_lengths[t % p]; };

  std::vector<Eigen::Triplet<double>> trips;
  SpMat m(dst.n_dofs, src.n_dofs);

  // Appends the difference along `axis` of source component `scomp`,
  // evaluated at target per-axis indices `gi`, scaled by `sign`.
  auto add_diff = [&](int row, int scomp, std::array<int, 3> gi, int axis, double sign) {
    double h = gap(gi[axis]);
    std::array<int, 3> up = gi;
    up[axis] += 1;
    trips.emplace_back(row, src.global_dof(scomp, gi), -sign / h);
    trips.emplace_back(row, src.global_dof(scomp, up), sign / h);
  };

  switch (kind) {
    case IncidenceKind::Grad: {
      for (int c = 0; c < dst.n_components(); ++c) {
        std::array<int, 3> sz = {1, 1, 1};
        for (int a = 0; a < d; ++a)
          sz[a] = dst.element_major() ? dst.mesh.counts[a] * p : dst.axis_dofs(c, a);
        int axis = (d == 1) ? 0 : c;  // derivative direction of component c
        for (int k = 0; k < sz[2]; ++k)
          for (int j = 0; j < sz[1]; ++j)
            for (int i = 0; i < sz[0]; ++i) {
              std::array<int, 3> gi = {i, j, k};
              add_diff(dst.global_dof(c, gi), 0, gi, axis, 1.0);
            }
      }
      break;
    }
    case IncidenceKind::Curl: {
      if (d == 2) {
        // Scalar curl d_x w_y - d_y w_x into the L2 space.
        for (int j = 0; j < dst.mesh.counts[1] * p; ++j)
          for (int i = 0; i < dst.mesh.counts[0] * p; ++i) {
            std::array<int, 3> gi = {i, j, 0};
            int row = dst.global_dof(0, gi);
            add_diff(row, 1, gi, 0, 1.0);
            add_diff(row, 0, gi, 1, -1.0);
          }
      } else {
        for (int c = 0; c < 3; ++c) {
          int a1 = (c + 1) % 3, a2 = (c + 2) % 3;  // curl_c = d_{a1} w_{a2} - d_{a2} w_{a1}
          std::array<int, 3> sz;
          for (int a = 0; a < 3; ++a) sz[a] = dst.axis_dofs(c, a);
          for (int k = 0; k < sz[2]; ++k)
            for (int j = 0; j < sz[1]; ++j)
              for (int i = 0; i < sz[0]; ++i) {
                std::array<int, 3> gi = {i, j, k};
                int row = dst.global_dof(c, gi);
                add_diff(row, a2, gi, a1, 1.0);
                add_diff(row, a1, gi, a2, -1.0);
              }
        }
      }
      break;
    }
    case IncidenceKind::Div: {
      std::array<int, 3> sz = {1, 1, 1};
      for (int a = 0; a < d; ++a) sz[a] = dst.mesh.counts[a] * p;
      for (int k = 0; k < sz[2]; ++k)
        for (int j = 0; j < sz[1]; ++j)
          for (int i = 0; i < sz[0]; ++i) {
            std::array<int, 3> gi = {i, j, k};
            int row = dst.global_dof(0, gi);
            for (int c = 0; c < d; ++c) add_diff(row, c, gi, c, 1.0);
          }
      break;
    }
  }
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

namespace detail {

inline void scatter_mass(const FeSpace& s, QuadMode qm, const Coefficients& coeff,
                         bool low_order, std::vector<Eigen::Triplet<double>>& trips) {
  NodalRule rule = gauss_lobatto_rule(s.degree);
  const int d = s.dim();
  std::vector<int> dofs;
  // Reference factors are element-independent; precompute per component.
  std::vector<std::array<Eigen::MatrixXd, 3>> factors;
  for (int c = 0; c < s.n_components(); ++c)
    factors.push_back(mass_factors(s, c, rule, qm, low_order));

  for (int e = 0; e < s.mesh.n_elements(); ++e) {
    s.element_dofs(e, dofs);
    auto w = s.mesh.widths(e);
    int off = 0;
    for (int c = 0; c < s.n_components(); ++c) {
      double weight = mass_weight(s.kind, c, w, d) * coeff.b(e);
      const auto& f = factors[c];
      std::array<int, 3> sz = {1, 1, 1};
      for (int a = 0; a < d; ++a) sz[a] = static_cast<int>(f[a].rows());
      int n = sz[0] * sz[1] * sz[2];
      for (int r = 0; r < n; ++r) {
        int ri = r % sz[0], rj = (r / sz[0]) % sz[1], rk = r / (sz[0] * sz[1]);
        for (int q = 0; q < n; ++q) {
          int qi = q % sz[0], qj = (q / sz[0]) % sz[1], qk = q / (sz[0] * sz[1]);
          double v = f[0](ri, qi);
          if (d > 1) v *= f[1](rj, qj);
          if (d > 2) v *= f[2](rk, qk);
          if (v == 0.0) continue;
          trips.emplace_back(dofs[off + r], dofs[off + q], weight * v);
        }
      }
      off += n;
    }
  }
}

// Post-assembly invariant: every operator built here must be symmetric.
inline void require_symmetric(const SpMat& a, const char* who) {
  SpMat diff = a - SpMat(a.transpose());
  double scale = 0.0, err = 0.0;
  for (int r = 0; r < a.outerSize(); ++r)
    for (SpMat::InnerIterator it(a, r); it; ++it)
      scale = std::max(scale, std::abs(it.value()));
  for (int r = 0; r < diff.outerSize(); ++r)
    for (SpMat::InnerIterator it(diff, r); it; ++it)
      err = std::max(err, std::abs(it.value()));
  if (err > 1e-12 * std::max(scale, 1.0))
    throw std::runtime_error(std::string(who) + ": assembled matrix is not symmetric");
}

}  // namespace detail

inline AssembledOp assemble(const FeSpace& s, OpTag tag, QuadMode qm,
                            const Coefficients& coeff = {});

/// Low-order-refined assembly of the same bilinear form: identical DOF
/// indexing, piecewise linear/constant 1D factors on the Lobatto
/// subintervals. For p = 1 it coincides with the high-order assembly.
inline AssembledOp assemble_lor(const FeSpace& s, OpTag tag,
                                const Coefficients& coeff = {},
                                QuadMode lor_qm = QuadMode::Exact) {
  if (s.variant != BasisVariant::Histopolation)
    throw std::invalid_argument("assemble_lor: LOR requires the histopolation variant");
  AssembledOp op;
  op.kind = s.kind;
  op.tag = tag;
  op.quad = lor_qm;
  switch (tag) {
    case OpTag::Mass: {
      std::vector<Eigen::Triplet<double>> trips;
      detail::scatter_mass(s, lor_qm, coeff, true, trips);
      op.mat.resize(s.n_dofs, s.n_dofs);
      op.mat.setFromTriplets(trips.begin(), trips.end());
      break;
    }
    case OpTag::Stiffness: {
      FeSpace next = build_space(stiffness_target_kind(s.kind, s.dim()), s.degree, s.mesh);
      SpMat inc = global_incidence(stiffness_incidence_kind(s.kind), s, next);
      AssembledOp mnext = assemble_lor(next, OpTag::Mass, {{}, coeff.alpha}, lor_qm);
      op.mat = SpMat(inc.transpose()) * mnext.mat * inc;
      break;
    }
    case OpTag::MassPlusStiffness: {
      AssembledOp m = assemble_lor(s, OpTag::Mass, coeff, lor_qm);
      AssembledOp k = assemble_lor(s, OpTag::Stiffness, coeff, lor_qm);
      op.mat = m.mat + k.mat;
      break;
    }
    default:
      throw std::invalid_argument("assemble_lor: unsupported tag");
  }
  detail::require_symmetric(op.mat, "assemble_lor");
  return op;
}

inline AssembledOp assemble(const FeSpace& s, OpTag tag, QuadMode qm,
                            const Coefficients& coeff) {
  AssembledOp op;
  op.kind = s.kind;
  op.tag = tag;
  op.quad = qm;
  switch (tag) {
    case OpTag::Mass: {
      std::vector<Eigen::Triplet<double>> trips;
      detail::scatter_mass(s, qm, coeff, false, trips);
      op.mat.resize(s.n_dofs, s.n_dofs);
      op.mat.setFromTriplets(trips.begin(), trips.end());
      break;
    }
    case OpTag::Stiffness: {
      if (s.variant != BasisVariant::Histopolation)
        throw std::invalid_argument("assemble: stiffness requires the histopolation variant");
      FeSpace next = build_space(stiffness_target_kind(s.kind, s.dim()), s.degree, s.mesh);
      SpMat inc = global_incidence(stiffness_incidence_kind(s.kind), s, next);
      AssembledOp mnext = assemble(next, OpTag::Mass, qm, {{}, coeff.alpha});
      op.mat = SpMat(inc.transpose()) * mnext.mat * inc;
      break;
    }
    case OpTag::MassPlusStiffness: {
      AssembledOp m = assemble(s, OpTag::Mass, qm, coeff);
      AssembledOp k = assemble(s, OpTag::Stiffness, qm, coeff);
      op.mat = m.mat + k.mat;
      break;
    }
    default:
      throw std::invalid_argument("assemble: unsupported tag (use the dg interfaces)");
  }
  detail::require_symmetric(op.mat, "assemble");
  return op;
}

/// Apply the mass operator without forming the global matrix: per-element
/// 1D contractions (sum factorization) and gather/scatter.
inline void apply_mass_matfree(const FeSpace& s, const Coefficients& coeff,
                               const Eigen::VectorXd& u, Eigen::VectorXd& out,
                               QuadMode qm = QuadMode::Exact) {
  NodalRule rule = gauss_lobatto_rule(s.degree);
  const int d = s.dim();
  out.setZero(s.n_dofs);
  std::vector<std::array<Eigen::MatrixXd, 3>> factors;
  for (int c = 0; c < s.n_components(); ++c)
    factors.push_back(detail::mass_factors(s, c, rule, qm, false));

  std::vector<int> dofs;
  std::vector<double> loc, tmp_in, tmp_out;
  for (int e = 0; e < s.mesh.n_elements(); ++e) {
    s.element_dofs(e, dofs);
    auto w = s.mesh.widths(e);
    loc.resize(dofs.size());
    for (std::size_t i = 0; i < dofs.size(); ++i) loc[i] = u[dofs[i]];

    int off = 0;
    for (int c = 0; c < s.n_components(); ++c) {
      const auto& f = factors[c];
      std::array<int, 3> sz = {1, 1, 1};
      for (int a = 0; a < d; ++a) sz[a] = static_cast<int>(f[a].rows());
      int n = sz[0] * sz[1] * sz[2];
      tmp_in.assign(loc.begin() + off, loc.begin() + off + n);
      // Contract one axis at a time.
      for (int a = 0; a < d; ++a) {
        tmp_out.assign(n, 0.0);
        int stride = 1;
        for (int b = 0; b < a; ++b) stride *= sz[b];
        for (int k = 0; k < (d > 2 ? sz[2] : 1); ++k)
          for (int j = 0; j < (d > 1 ? sz[1] : 1); ++j)
            for (int i = 0; i < sz[0]; ++i) {
              int idx = i + sz[0] * (j + sz[1] * k);
              int ia = (a == 0) ? i : (a == 1 ? j : k);
              double acc = 0.0;
              for (int t = 0; t < sz[a]; ++t) {
                int src = idx + (t - ia) * stride;
                acc += f[a](ia, t) * tmp_in[src];
              }
              tmp_out[idx] = acc;
            }
        tmp_in.swap(tmp_out);
      }
      double weight = detail::mass_weight(s.kind, c, w, d) * coeff.b(e);
      for (int i = 0; i < n; ++i) out[dofs[off + i]] += weight * tmp_in[i];
      off += n;
    }
  }
}

/// Diagonal of the mass matrix for the chosen basis variant, computed from
/// the 1D factor diagonals without global assembly.
inline Eigen::VectorXd mass_diagonal(const FeSpace& s, const Coefficients& coeff = {},
                                     QuadMode qm = QuadMode::Exact) {
  NodalRule rule = gauss_lobatto_rule(s.degree);
  const int d = s.dim();
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(s.n_dofs);
  std::vector<std::array<Eigen::MatrixXd, 3>> factors;
  for (int c = 0; c < s.n_components(); ++c)
    factors.push_back(detail::mass_factors(s, c, rule, qm, false));

  std::vector<int> dofs;
  for (int e = 0; e < s.mesh.n_elements(); ++e) {
    s.element_dofs(e, dofs);
    auto w = s.mesh.widths(e);
    int off = 0;
    for (int c = 0; c < s.n_components(); ++c) {
      const auto& f = factors[c];
      std::array<int, 3> sz = {1, 1, 1};
      for (int a = 0; a < d; ++a) sz[a] = static_cast<int>(f[a].rows());
      int n = sz[0] * sz[1] * sz[2];
      double weight = detail::mass_weight(s.kind, c, w, d) * coeff.b(e);
      for (int idx = 0; idx < n; ++idx) {
        int i = idx % sz[0], j = (idx / sz[0]) % sz[1], k = idx / (sz[0] * sz[1]);
        double v = f[0](i, i);
        if (d > 1) v *= f[1](j, j);
        if (d > 2) v *= f[2](k, k);
        diag[dofs[off + idx]] += weight * v;
      }
      off += n;
    }
  }
  return diag;
}

/// Symmetric Dirichlet elimination: zero the rows and columns of the listed
/// DOFs and place 1 on their diagonal.
inline void eliminate_dirichlet(SpMat& a, const std::vector<int>& dofs) {
  std::vector<char> elim(a.rows(), 0);
  for (int d : dofs) elim[d] = 1;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(a.nonZeros());
  for (int r = 0; r < a.outerSize(); ++r)
    for (SpMat::InnerIterator it(a, r); it; ++it)
      if (!elim[it.row()] && !elim[it.col()])
        trips.emplace_back(it.row(), it.col(), it.value());
  for (int r = 0; r < a.rows(); ++r)
    if (elim[r]) trips.emplace_back(r, r, 1.0);
  SpMat out(a.rows(), a.cols());
  out.setFromTriplets(trips.begin(), trips.end());
  a.swap(out);
}

/// Restriction of a symmetric operator to the complement of the listed
/// DOFs. `free_map`, when given, receives the retained global indices.
inline SpMat restrict_to_free(const SpMat& a, const std::vector<int>& dofs,
                              std::vector<int>* free_map = nullptr) {
  std::vector<int> newidx(a.rows(), -1);
  std::vector<char> elim(a.rows(), 0);
  for (int d : dofs) elim[d] = 1;
  int nf = 0;
  std::vector<int> kept;
  for (int i = 0; i < a.rows(); ++i)
    if (!elim[i]) {
      newidx[i] = nf++;
      kept.push_back(i);
    }
  if (free_map) *free_map = kept;
  std::vector<Eigen::Triplet<double>> trips;
  for (int r = 0; r < a.outerSize(); ++r)
    for (SpMat::InnerIterator it(a, r); it; ++it)
      if (newidx[it.row()] >= 0 && newidx[it.col()] >= 0)
        trips.emplace_back(newidx[it.row()], newidx[it.col()], it.value());
  SpMat out(nf, nf);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

/// MatrixMarket coordinate export (symmetric, lower triangle, 1-based).
inline void write_matrix_market(std::ostream& os, const SpMat& a) {
  os << "%%MatrixMarket matrix coordinate real symmetric\n";
  std::size_t nnz = 0;
  for (int r = 0; r < a.outerSize(); ++r)
    for (SpMat::InnerIterator it(a, r); it; ++it)
      if (it.row() >= it.col()) ++nnz;
  os << a.rows() << " " << a.cols() << " " << nnz << "\n";
  char buf[64];
  for (int r = 0; r < a.outerSize(); ++r)
    for (SpMat::InnerIterator it(a, r); it; ++it)
      if (it.row() >= it.col()) {
        std::snprintf(buf, sizeof(buf), "%d %d %.16g\n", static_cast<int>(it.row()) + 1,
                      static_cast<int>(it.col()) + 1, it.value());
        os << buf;
      }
}

}  // namespace lorfem
