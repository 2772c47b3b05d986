// Affine tensor-product meshes of axis-aligned boxes, Gauss-Lobatto LOR
// refinement (p+1 points per axis, or p+2 for the DG variant), and
// face/skeleton enumeration with geometric measures.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lorfem/quadrature.hpp"

namespace lorfem {

struct CartMesh {
  int dim = 3;
  std::array<int, 3> counts = {1, 1, 1};              // 1 on unused axes
  std::array<std::vector<double>, 3> grid;            // axis grid lines

  int n_elements() const {
    int n = 1;
    for (int a = 0; a < dim; ++a) n *= counts[a];
    return n;
  }

  std::array<int, 3> element_coords(int e) const {
    std::array<int, 3> c = {0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      c[a] = e % counts[a];
      e /= counts[a];
    }
    return c;
  }

  int element_index(std::array<int, 3> c) const {
    int e = 0, stride = 1;
    for (int a = 0; a < dim; ++a) {
      e += c[a] * stride;
      stride *= counts[a];
    }
    return e;
  }

  double width(int elem, int axis) const {
    auto c = element_coords(elem);
    return grid[axis][c[axis] + 1] - grid[axis][c[axis]];
  }

  double low(int elem, int axis) const {
    auto c = element_coords(elem);
    return grid[axis][c[axis]];
  }

  std::array<double, 3> widths(int elem) const {
    std::array<double, 3> w = {1.0, 1.0, 1.0};
    for (int a = 0; a < dim; ++a) w[a] = width(elem, a);
    return w;
  }

  double volume(int elem) const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= width(elem, a);
    return v;
  }

  // Constant Jacobian of the map from [-1,1]^d.
  double det_jacobian(int elem) const {
    double v = volume(elem);
    return v / std::pow(2.0, dim);
  }
};

/// Cartesian mesh of a box, optionally graded: along each axis the element
/// widths follow a geometric progression with the given ratio (1 = uniform).
inline CartMesh build_cart_mesh(int dim, std::array<int, 3> counts,
                                std::array<double, 3> box_lo,
                                std::array<double, 3> box_hi,
                                std::array<double, 3> grading = {1.0, 1.0, 1.0}) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("build_cart_mesh: dim in {1,2,3}");
  CartMesh m;
  m.dim = dim;
  for (int a = 0; a < 3; ++a) {
    int n = (a < dim) ? counts[a] : 1;
    if (a < dim && n < 1) throw std::invalid_argument("build_cart_mesh: counts >= 1");
    double lo = (a < dim) ? box_lo[a] : 0.0;
    double hi = (a < dim) ? box_hi[a] : 1.0;
    double g = (a < dim) ? grading[a] : 1.0;
    if (a < dim && !(hi > lo)) throw std::invalid_argument("build_cart_mesh: empty extent");
    if (g <= 0.0) throw std::invalid_argument("build_cart_mesh: grading must be positive");
    m.counts[a] = n;
    m.grid[a].resize(n + 1);
    double w0;
    if (std::abs(g - 1.0) < 1e-14) {
      w0 = (hi - lo) / n;
      for (int i = 0; i <= n; ++i) m.grid[a][i] = lo + i * w0;
    } else {
      w0 = (hi - lo) * (1.0 - g) / (1.0 - std::pow(g, n));
      m.grid[a][0] = lo;
      double w = w0;
      for (int i = 1; i <= n; ++i) {
        m.grid[a][i] = m.grid[a][i - 1] + w;
        w *= g;
      }
      m.grid[a][n] = hi;  // close the telescoping sum exactly
    }
  }
  return m;
}

// A coarse mesh face: normal axis, grid-line slice, and the transversal
// element coordinates (remaining axes in ascending order).
struct CoarseFace {
  int axis = 0;
  int slice = 0;                 // 0 .. counts[axis]
  std::array<int, 2> cell = {0, 0};
  int elem_minus = -1;           // element on the lower side (-1 at boundary)
  int elem_plus = -1;
  double area = 0.0;
};

inline std::vector<CoarseFace> coarse_faces(const CartMesh& m) {
  std::vector<CoarseFace> faces;
  for (int axis = 0; axis < m.dim; ++axis) {
    std::array<int, 2> taxes = {-1, -1};
    int nt = 0;
    for (int a = 0; a < m.dim; ++a)
      if (a != axis) taxes[nt++] = a;
    int c0 = nt > 0 ? m.counts[taxes[0]] : 1;
    int c1 = nt > 1 ? m.counts[taxes[1]] : 1;
    for (int s = 0; s <= m.counts[axis]; ++s)
      for (int j1 = 0; j1 < c1; ++j1)
        for (int j0 = 0; j0 < c0; ++j0) {
          CoarseFace f;
          f.axis = axis;
          f.slice = s;
          f.cell = {j0, j1};
          std::array<int, 3> cm = {0, 0, 0};
          if (nt > 0) cm[taxes[0]] = j0;
          if (nt > 1) cm[taxes[1]] = j1;
          f.area = 1.0;
          if (nt > 0) f.area *= m.grid[taxes[0]][j0 + 1] - m.grid[taxes[0]][j0];
          if (nt > 1) f.area *= m.grid[taxes[1]][j1 + 1] - m.grid[taxes[1]][j1];
          if (s > 0) {
            cm[axis] = s - 1;
            f.elem_minus = m.element_index(cm);
          }
          if (s < m.counts[axis]) {
            cm[axis] = s;
            f.elem_plus = m.element_index(cm);
          }
          faces.push_back(f);
        }
  }
  return faces;
}

enum class RefineMode { Standard, DG };

enum class FaceClass { MacroInterior, MacroBoundary, DomainBoundary };

// A fine (subelement) face in the LOR mesh: normal axis, fine grid line,
// and transversal fine-cell indices (remaining axes in ascending order).
struct FineFace {
  int axis = 0;
  int line = 0;
  std::array<int, 2> cell = {0, 0};
};

struct LorMesh {
  CartMesh coarse;
  int p = 1;
  RefineMode mode = RefineMode::Standard;
  int subdiv = 1;  // subcells per coarse element per axis: p or p+1
  NodalRule refine_rule;                       // degree p (Standard) or p+1 (DG)
  std::array<std::vector<double>, 3> fine_grid;

  int fine_count(int axis) const { return static_cast<int>(fine_grid[axis].size()) - 1; }

  double fine_width(int axis, int i) const {
    return fine_grid[axis][i + 1] - fine_grid[axis][i];
  }

  double cell_volume(std::array<int, 3> f) const {
    double v = 1.0;
    for (int a = 0; a < coarse.dim; ++a) v *= fine_width(a, f[a]);
    return v;
  }

  FaceClass classify(const FineFace& f) const {
    if (f.line == 0 || f.line == fine_count(f.axis)) return FaceClass::DomainBoundary;
    return (f.line % subdiv == 0) ? FaceClass::MacroBoundary : FaceClass::MacroInterior;
  }

  // Coarse face slice under a MacroBoundary / DomainBoundary fine face.
  int parent_slice(const FineFace& f) const { return f.line / subdiv; }

  std::array<int, 2> transversal_axes(int axis) const {
    std::array<int, 2> t = {-1, -1};
    int n = 0;
    for (int a = 0; a < coarse.dim; ++a)
      if (a != axis) t[n++] = a;
    return t;
  }

  double face_area(const FineFace& f) const {
    auto t = transversal_axes(f.axis);
    double s = 1.0;
    if (t[0] >= 0) s *= fine_width(t[0], f.cell[0]);
    if (t[1] >= 0) s *= fine_width(t[1], f.cell[1]);
    return s;
  }

  std::vector<FineFace> all_faces(bool include_domain_boundary) const {
    std::vector<FineFace> out;
    for (int axis = 0; axis < coarse.dim; ++axis) {
      auto t = transversal_axes(axis);
      int c0 = t[0] >= 0 ? fine_count(t[0]) : 1;
      int c1 = t[1] >= 0 ? fine_count(t[1]) : 1;
      int first = include_domain_boundary ? 0 : 1;
      int last = fine_count(axis) - (include_domain_boundary ? 0 : 1);
      for (int line = first; line <= last; ++line)
        for (int j1 = 0; j1 < c1; ++j1)
          for (int j0 = 0; j0 < c0; ++j0)
            out.push_back({axis, line, {j0, j1}});
    }
    return out;
  }
};

inline LorMesh lor_refine(const CartMesh& mesh, int p, RefineMode mode) {
  if (p < 1) throw std::invalid_argument("lor_refine: p must be >= 1");
  LorMesh lor;
  lor.coarse = mesh;
  lor.p = p;
  lor.mode = mode;
  lor.subdiv = (mode == RefineMode::Standard) ? p : p + 1;
  lor.refine_rule = gauss_lobatto_rule(lor.subdiv);
  for (int a = 0; a < mesh.dim; ++a) {
    auto& fg = lor.fine_grid[a];
    fg.reserve(mesh.counts[a] * lor.subdiv + 1);
    for (int e = 0; e < mesh.counts[a]; ++e) {
      double lo = mesh.grid[a][e], hi = mesh.grid[a][e + 1];
      for (int i = 0; i < lor.subdiv; ++i)
        fg.push_back(lo + 0.5 * (hi - lo) * (lor.refine_rule.points[i] + 1.0));
    }
    fg.push_back(mesh.grid[a].back());
  }
  for (int a = mesh.dim; a < 3; ++a) lor.fine_grid[a] = {0.0, 1.0};
  return lor;
}

struct PerpLengths {
  double h_plus = 0.0;
  double h_minus = 0.0;
  double h_avg = 0.0;
};

/// Perpendicular element lengths h+- = mu(cell)/mu(face) at a fine face and
/// their average. At a domain boundary the one-sided value is duplicated.
inline PerpLengths face_perpendicular_lengths(const LorMesh& lor, const FineFace& f) {
  PerpLengths out;
  bool has_minus = f.line > 0;
  bool has_plus = f.line < lor.fine_count(f.axis);
  if (has_minus) out.h_minus = lor.fine_width(f.axis, f.line - 1);
  if (has_plus) out.h_plus = lor.fine_width(f.axis, f.line);
  if (!has_minus) out.h_minus = out.h_plus;
  if (!has_plus) out.h_plus = out.h_minus;
  out.h_avg = 0.5 * (out.h_plus + out.h_minus);
  return out;
}

/// Same quantity on a coarse mesh face.
inline PerpLengths coarse_face_perpendicular(const CartMesh& m, int axis, int slice) {
  PerpLengths out;
  bool has_minus = slice > 0;
  bool has_plus = slice < m.counts[axis];
  if (has_minus) out.h_minus = m.grid[axis][slice] - m.grid[axis][slice - 1];
  if (has_plus) out.h_plus = m.grid[axis][slice + 1] - m.grid[axis][slice];
  if (!has_minus) out.h_minus = out.h_plus;
  if (!has_plus) out.h_plus = out.h_minus;
  out.h_avg = 0.5 * (out.h_plus + out.h_minus);
  return out;
}

}  // namespace lorfem
