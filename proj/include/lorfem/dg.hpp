// Interior penalty DG machinery: the high-order symmetric IP form, the
// piecewise-constant penalty-only form on the (p+2)-point refined mesh, the
// face penalty weights sigma_h, and the equivalent weighted graph Laplacian.
#pragma once

#include <Eigen/Sparse>
#include <array>
#include <stdexcept>
#include <vector>

#include "lorfem/assembly.hpp"
#include "lorfem/mesh.hpp"

namespace lorfem {

// Penalty data for one DG discretization: eta, the per-fine-face sigma_h
// values, and the per-coarse-face sigma_p = eta p^2 / h.
struct DgPenalty {
  double eta = 1.0;
  int p = 1;
  // sigma_h indexed by [axis][(line * n1 + c1) * n0 + c0] over fine faces,
  // where (c0, c1) are the transversal fine-cell indices.
  std::array<std::vector<double>, 3> sigma;
  std::array<std::array<int, 2>, 3> tcount = {{{1, 1}, {1, 1}, {1, 1}}};
  std::vector<double> sigma_coarse;  // aligned with coarse_faces(mesh)

  double sigma_of(const FineFace& f) const {
    int n0 = tcount[f.axis][0], n1 = tcount[f.axis][1];
    return sigma[f.axis][(static_cast<std::size_t>(f.line) * n1 + f.cell[1]) * n0 + f.cell[0]];
  }
};

/// Penalty weights on a DG-refined mesh. Interior (macro-interior) faces get
/// sigma_h = alpha w_i w_j / (dx_i' dx_j' (x_{k+1} - x_k)); faces lying on
/// coarse faces (including the domain boundary) get sigma_h = alpha eta p^2
/// w_i w_j. All lengths and weights are reference quantities of the macro
/// element; the geometry enters through alpha = 2/h with h the perpendicular
/// length of the adjacent coarse element(s).
inline DgPenalty dg_penalty_weights(const LorMesh& lor, int p, double eta) {
  if (lor.mode != RefineMode::DG)
    throw std::invalid_argument("dg_penalty_weights: LOR mesh must use DG refinement");
  if (lor.p != p) throw std::invalid_argument("dg_penalty_weights: degree mismatch");
  DgPenalty pen;
  pen.eta = eta;
  pen.p = p;
  const CartMesh& mesh = lor.coarse;
  NodalRule nodes = gauss_lobatto_rule(p);          // unique nodes and weights
  const NodalRule& cells = lor.refine_rule;         // p+2 points, p+1 subcells
  const int m = lor.subdiv;                         // p+1

  for (int axis = 0; axis < mesh.dim; ++axis) {
    auto t = lor.transversal_axes(axis);
    int n0 = t[0] >= 0 ? lor.fine_count(t[0]) : 1;
    int n1 = t[1] >= 0 ? lor.fine_count(t[1]) : 1;
    pen.tcount[axis] = {n0, n1};
    int nl = lor.fine_count(axis) + 1;
    pen.sigma[axis].assign(static_cast<std::size_t>(nl) * n0 * n1, 0.0);
    for (int line = 0; line < nl; ++line) {
      int lt = line % m;
      int ea = line / m;
      for (int c1 = 0; c1 < n1; ++c1)
        for (int c0 = 0; c0 < n0; ++c0) {
          // Reference weights of the unique nodes in the transversal subcells.
          double wprod = 1.0, dxprod = 1.0;
          if (t[0] >= 0) {
            int s = c0 % m;
            wprod *= nodes.weights[s];
            dxprod *= cells.subinterval_lengths[s];
          }
          if (t[1] >= 0) {
            int s = c1 % m;
            wprod *= nodes.weights[s];
            dxprod *= cells.subinterval_lengths[s];
          }
          double sig;
          if (lt != 0) {
            // Macro-interior face: one owning coarse element.
            double h = mesh.grid[axis][ea + 1] - mesh.grid[axis][ea];
            double alpha = 2.0 / h;
            double gap = nodes.points[lt] - nodes.points[lt - 1];
            sig = alpha * wprod / (dxprod * gap);
          } else {
            // Subset of a coarse face (macro interface or domain boundary).
            double h = coarse_face_perpendicular(mesh, axis, ea).h_avg;
            double alpha = 2.0 / h;
            sig = alpha * eta * p * p * wprod;
          }
          pen.sigma[axis][(static_cast<std::size_t>(line) * n1 + c1) * n0 + c0] = sig;
        }
    }
  }
  // Coarse-face penalties sigma_p = eta p^2 / h.
  auto cf = coarse_faces(mesh);
  pen.sigma_coarse.resize(cf.size());
  for (std::size_t i = 0; i < cf.size(); ++i) {
    double h = coarse_face_perpendicular(mesh, cf[i].axis, cf[i].slice).h_avg;
    pen.sigma_coarse[i] = eta * p * p / h;
  }
  return pen;
}

namespace detail {

// DG DOF of a fine cell of the (p+2)-refined mesh (element-major local-lex,
// matching the nodal DG space numbering through the interlacing property).
inline int dg_dof_of_cell(const FeSpace& s, std::array<int, 3> f) {
  std::array<int, 3> gi = {0, 0, 0};
  for (int a = 0; a < s.dim(); ++a) gi[a] = f[a];
  return s.global_dof(0, gi);
}

}  // namespace detail

/// Penalty-only piecewise-constant form on the DG-refined mesh:
/// off-diagonal entries -sigma_h(e) mu(e) across every fine interior face,
/// row sums zero for the Neumann variant; the Dirichlet variant adds the
/// boundary-face penalties to the diagonal.
inline AssembledOp assemble_ip_dg_lor(const FeSpace& s, double eta,
                                      bool dirichlet = true) {
  if (s.kind != SpaceKind::DG)
    throw std::invalid_argument("assemble_ip_dg_lor: DG space required");
  LorMesh lor = lor_refine(s.mesh, s.degree, RefineMode::DG);
  DgPenalty pen = dg_penalty_weights(lor, s.degree, eta);

  std::vector<Eigen::Triplet<double>> trips;
  for (const FineFace& f : lor.all_faces(true)) {
    FaceClass cls = lor.classify(f);
    if (cls == FaceClass::DomainBoundary && !dirichlet) continue;
    double w = pen.sigma_of(f) * lor.face_area(f);
    auto t = lor.transversal_axes(f.axis);
    std::array<int, 3> cm = {0, 0, 0};
    if (t[0] >= 0) cm[t[0]] = f.cell[0];
    if (t[1] >= 0) cm[t[1]] = f.cell[1];
    if (cls == FaceClass::DomainBoundary) {
      std::array<int, 3> c = cm;
      c[f.axis] = (f.line == 0) ? 0 : lor.fine_count(f.axis) - 1;
      int i = detail::dg_dof_of_cell(s, c);
      trips.emplace_back(i, i, w);
    } else {
      std::array<int, 3> cl = cm, cr = cm;
      cl[f.axis] = f.line - 1;
      cr[f.axis] = f.line;
      int i = detail::dg_dof_of_cell(s, cl);
      int j = detail::dg_dof_of_cell(s, cr);
      trips.emplace_back(i, i, w);
      trips.emplace_back(j, j, w);
      trips.emplace_back(i, j, -w);
      trips.emplace_back(j, i, -w);
    }
  }
  AssembledOp op;
  op.kind = SpaceKind::DG;
  op.tag = OpTag::IpDgLor;
  op.mat.resize(s.n_dofs, s.n_dofs);
  op.mat.setFromTriplets(trips.begin(), trips.end());
  detail::require_symmetric(op.mat, "assemble_ip_dg_lor");
  return op;
}

/// Weighted graph Laplacian of the fine-mesh connectivity graph with edge
/// weights w_ij = sigma_h(e) mu(e); identical to the Neumann variant of
/// assemble_ip_dg_lor by construction of the weights.
inline AssembledOp build_graph_laplacian(const LorMesh& lor, const DgPenalty& pen) {
  const CartMesh& mesh = lor.coarse;
  FeSpace s = build_space(SpaceKind::DG, pen.p, mesh);
  std::vector<Eigen::Triplet<double>> trips;
  for (const FineFace& f : lor.all_faces(false)) {
    double w = pen.sigma_of(f) * lor.face_area(f);
    auto t = lor.transversal_axes(f.axis);
    std::array<int, 3> cm = {0, 0, 0};
    if (t[0] >= 0) cm[t[0]] = f.cell[0];
    if (t[1] >= 0) cm[t[1]] = f.cell[1];
    std::array<int, 3> cl = cm, cr = cm;
    cl[f.axis] = f.line - 1;
    cr[f.axis] = f.line;
    int i = detail::dg_dof_of_cell(s, cl);
    int j = detail::dg_dof_of_cell(s, cr);
    trips.emplace_back(i, i, w);
    trips.emplace_back(j, j, w);
    trips.emplace_back(i, j, -w);
    trips.emplace_back(j, i, -w);
  }
  AssembledOp op;
  op.kind = SpaceKind::DG;
  op.tag = OpTag::GraphLaplacian;
  op.mat.resize(s.n_dofs, s.n_dofs);
  op.mat.setFromTriplets(trips.begin(), trips.end());
  return op;
}

/// Symmetric interior penalty form on the coarse mesh with the nodal
/// degree-p basis: volume broken gradients, consistency/symmetry face
/// terms, and the sigma_p = eta p^2 / h jump penalty. The Dirichlet variant
/// applies the standard one-sided terms on domain-boundary faces and is
/// verified SPD at desk scale.
inline AssembledOp assemble_ip_dg(const FeSpace& s, double eta,
                                  QuadMode qm = QuadMode::Exact,
                                  bool dirichlet = true,
                                  const Coefficients& coeff = {}) {
  if (s.kind != SpaceKind::DG)
    throw std::invalid_argument("assemble_ip_dg: DG space required");
  if (eta <= 0.0) throw std::invalid_argument("assemble_ip_dg: eta must be positive");
  const int d = s.dim();
  const int p = s.degree;
  const CartMesh& mesh = s.mesh;
  NodalRule rule = gauss_lobatto_rule(p);
  Eigen::MatrixXd mref = mass_interp_1d(rule, qm);
  Eigen::MatrixXd kref = stiffness_interp_1d(rule, qm);
  Basis1D nodal = make_basis(BasisKind::Interpolation, rule);
  std::vector<double> dplus = eval_basis_deriv(nodal, 1.0);    // l_i'(+1)
  std::vector<double> dminus = eval_basis_deriv(nodal, -1.0);  // l_i'(-1)

  std::vector<Eigen::Triplet<double>> trips;
  std::vector<int> dofs;
  RefElementLayout lay = s.local_layout();

  // Volume term: broken gradients, element by element.
  for (int e = 0; e < mesh.n_elements(); ++e) {
    s.element_dofs(e, dofs);
    auto wd = mesh.widths(e);
    double detj = mesh.det_jacobian(e);
    std::array<int, 3> sz = {p + 1, d > 1 ? p + 1 : 1, d > 2 ? p + 1 : 1};
    int n = sz[0] * sz[1] * sz[2];
    for (int a = 0; a < d; ++a) {
      double weight = (2.0 / wd[a]) * (2.0 / wd[a]) * detj * coeff.a(e);
      for (int r = 0; r < n; ++r) {
        int ri[3] = {r % sz[0], (r / sz[0]) % sz[1], r / (sz[0] * sz[1])};
        for (int q = 0; q < n; ++q) {
          int qi[3] = {q % sz[0], (q / sz[0]) % sz[1], q / (sz[0] * sz[1])};
          double v = 1.0;
          for (int b = 0; b < d; ++b)
            v *= (b == a) ? kref(ri[b], qi[b]) : mref(ri[b], qi[b]);
          if (v != 0.0) trips.emplace_back(dofs[r], dofs[q], weight * v);
        }
      }
    }
  }

  // Face terms over the coarse skeleton.
  auto faces = coarse_faces(mesh);
  for (const CoarseFace& f : faces) {
    bool interior = f.elem_minus >= 0 && f.elem_plus >= 0;
    if (!interior && !dirichlet) continue;
    double h = coarse_face_perpendicular(mesh, f.axis, f.slice).h_avg;
    double sigma = eta * p * p / h;

    std::array<int, 2> taxes = {-1, -1};
    for (int a = 0, k = 0; a < d; ++a)
      if (a != f.axis) taxes[k++] = a;
    // Transversal face mass: product of physical 1D masses.
    std::array<int, 2> tsz = {1, 1};
    for (int k = 0; k < 2; ++k)
      if (taxes[k] >= 0) tsz[k] = p + 1;
    int eref = interior ? f.elem_minus : (f.elem_minus >= 0 ? f.elem_minus : f.elem_plus);

    // Sides 0 = minus (trace at +1), 1 = plus (trace at -1).
    int nsides = interior ? 2 : 1;
    std::array<int, 2> elems = {f.elem_minus >= 0 ? f.elem_minus : f.elem_plus,
                                f.elem_plus};
    std::array<double, 2> jump_sign = {1.0, -1.0};
    bool minus_side_is_plus_elem = !interior && f.elem_minus < 0;
    if (minus_side_is_plus_elem) jump_sign = {-1.0, 1.0};  // outward normal flips

    // Per-side trace and normal-derivative vectors along the normal axis.
    auto trace_layer = [&](int side) {
      bool at_plus = (side == 0) != minus_side_is_plus_elem;
      return at_plus ? p : 0;
    };
    auto deriv_vec = [&](int side) {
      bool at_plus = (side == 0) != minus_side_is_plus_elem;
      const auto& dv = at_plus ? dplus : dminus;
      double scale = 2.0 / mesh.width(elems[side], f.axis);
      std::vector<double> out(p + 1);
      for (int i = 0; i <= p; ++i) out[i] = scale * dv[i];
      return out;
    };
    double avg = interior ? 0.5 : 1.0;

    std::array<std::vector<int>, 2> side_dofs;
    for (int sd = 0; sd < nsides; ++sd) s.element_dofs(elems[sd], side_dofs[sd]);

    auto local_flat = [&](int ia, int t0, int t1) {
      std::array<int, 3> idx = {0, 0, 0};
      idx[f.axis] = ia;
      if (taxes[0] >= 0) idx[taxes[0]] = t0;
      if (taxes[1] >= 0) idx[taxes[1]] = t1;
      return lay.flat_index(0, idx);
    };

    for (int s1 = 0; s1 < nsides; ++s1) {
      int tr1 = trace_layer(s1);
      auto dv1 = deriv_vec(s1);
      for (int s2 = 0; s2 < nsides; ++s2) {
        int tr2 = trace_layer(s2);
        auto dv2 = deriv_vec(s2);
        // Normal-axis coupling: sigma [u][v] - {du}[v] - [u]{dv}.
        Eigen::MatrixXd cn = Eigen::MatrixXd::Zero(p + 1, p + 1);
        for (int i = 0; i <= p; ++i)
          for (int j = 0; j <= p; ++j) {
            double jv = (i == tr1 ? jump_sign[s1] : 0.0);
            double ju = (j == tr2 ? jump_sign[s2] : 0.0);
            cn(i, j) = sigma * jv * ju - avg * dv1[i] * ju - jv * avg * dv2[j];
          }
        for (int t0 = 0; t0 < tsz[0]; ++t0)
          for (int u0 = 0; u0 < tsz[0]; ++u0) {
            double m0 = (taxes[0] >= 0) ? mref(t0, u0) * 0.5 * mesh.width(eref, taxes[0])
                                        : 1.0;
            if (m0 == 0.0) continue;
            for (int t1 = 0; t1 < tsz[1]; ++t1)
              for (int u1 = 0; u1 < tsz[1]; ++u1) {
                double m1 = (taxes[1] >= 0)
                                ? mref(t1, u1) * 0.5 * mesh.width(eref, taxes[1])
                                : 1.0;
                double mt = m0 * m1;
                if (mt == 0.0) continue;
                for (int ia = 0; ia <= p; ++ia)
                  for (int ja = 0; ja <= p; ++ja) {
                    double v = cn(ia, ja) * mt;
                    if (v == 0.0) continue;
                    trips.emplace_back(side_dofs[s1][local_flat(ia, t0, t1)],
                                       side_dofs[s2][local_flat(ja, u0, u1)], v);
                  }
              }
          }
      }
    }
  }

  AssembledOp op;
  op.kind = SpaceKind::DG;
  op.tag = OpTag::IpDg;
  op.quad = qm;
  op.mat.resize(s.n_dofs, s.n_dofs);
  op.mat.setFromTriplets(trips.begin(), trips.end());
  detail::require_symmetric(op.mat, "assemble_ip_dg");

  // Coercivity check at desk scale: an indefinite Dirichlet IP matrix
  // signals that eta is too small.
  if (dirichlet && s.n_dofs <= 1728) {
    Eigen::SparseMatrix<double> lower = op.mat.triangularView<Eigen::Lower>();
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(lower.selfadjointView<Eigen::Lower>());
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("assemble_ip_dg: matrix not SPD; penalty eta too small");
  }
  return op;
}

}  // namespace lorfem
