// Finite element spaces on Cartesian meshes: global DOF numbering with
// tangential/normal continuity, element-to-global maps, and boundary DOF
// sets. Conforming kinds share the global tensor grids; L2 and DG number
// their DOFs element-major.
#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "lorfem/derham.hpp"
#include "lorfem/mesh.hpp"

namespace lorfem {

// Basis used for the components without continuity (the histopolation
// directions of HCurl/HDiv and the L2 space). Histopolation is the default;
// the nodal Gauss-Legendre and low-degree Gauss-Lobatto variants exist for
// the mass-preconditioner comparisons.
enum class BasisVariant { Histopolation, Legendre, Lobatto };

struct FeSpace {
  SpaceKind kind = SpaceKind::H1;
  int degree = 1;  // p; the L2 space holds polynomials of degree p-1
  CartMesh mesh;
  BasisVariant variant = BasisVariant::Histopolation;

  int n_dofs = 0;

  int dim() const { return mesh.dim; }
  int n_components() const { return RefElementLayout::component_count(kind, dim()); }
  RefElementLayout local_layout() const { return {dim(), degree, kind}; }

  bool element_major() const { return kind == SpaceKind::L2 || kind == SpaceKind::DG; }

  // Whether `axis` is an interpolation (nodal, continuity-carrying)
  // direction for component `comp`.
  bool interp_axis(int comp, int axis) const {
    switch (kind) {
      case SpaceKind::H1:
      case SpaceKind::DG:
        return true;
      case SpaceKind::L2:
        return false;
      case SpaceKind::HCurl:
        return axis != comp;
      case SpaceKind::HDiv:
        return axis == comp;
    }
    return true;
  }

  // Global per-axis index count for shared-grid kinds.
  int axis_dofs(int comp, int axis) const {
    int n = mesh.counts[axis];
    return interp_axis(comp, axis) ? n * degree + 1 : n * degree;
  }

  int component_offset(int comp) const {
    int off = 0;
    for (int c = 0; c < comp; ++c) {
      int s = 1;
      for (int a = 0; a < dim(); ++a) s *= axis_dofs(c, a);
      off += s;
    }
    return off;
  }

  // Global DOF from per-axis global indices.
  int global_dof(int comp, std::array<int, 3> gidx) const {
    if (element_major()) {
      int loc = (kind == SpaceKind::L2) ? degree : degree + 1;
      std::array<int, 3> ec = {0, 0, 0}, li = {0, 0, 0};
      for (int a = 0; a < dim(); ++a) {
        ec[a] = gidx[a] / loc;
        li[a] = gidx[a] % loc;
      }
      int e = mesh.element_index(ec);
      int f = 0, stride = 1;
      for (int a = 0; a < dim(); ++a) {
        f += li[a] * stride;
        stride *= loc;
      }
      return e * stride + f;
    }
    int f = 0, stride = 1;
    for (int a = 0; a < dim(); ++a) {
      f += gidx[a] * stride;
      stride *= axis_dofs(comp, a);
    }
    return component_offset(comp) + f;
  }

  // Element-to-global map in local flat order (orientation signs are all +1
  // on axis-aligned meshes; DOFs are physical point values / averages).
  void element_dofs(int elem, std::vector<int>& out) const {
    RefElementLayout l = local_layout();
    out.resize(l.size());
    if (element_major()) {
      int base = elem * l.size();
      for (int i = 0; i < l.size(); ++i) out[i] = base + i;
      return;
    }
    auto ec = mesh.element_coords(elem);
    int pos = 0;
    for (int c = 0; c < RefElementLayout::component_count(kind, dim()); ++c) {
      std::array<int, 3> sz = {1, 1, 1};
      for (int a = 0; a < dim(); ++a) sz[a] = l.axis_size(c, a);
      for (int k = 0; k < sz[2]; ++k)
        for (int j = 0; j < sz[1]; ++j)
          for (int i = 0; i < sz[0]; ++i) {
            std::array<int, 3> li = {i, j, k};
            std::array<int, 3> gi = {0, 0, 0};
            for (int a = 0; a < dim(); ++a) gi[a] = ec[a] * degree + li[a];
            out[pos++] = global_dof(c, gi);
          }
    }
  }

  // DOFs carrying an essential trace on the domain boundary: the full trace
  // for H1, the tangential trace for HCurl, the normal trace for HDiv.
  std::vector<int> boundary_dofs() const {
    std::vector<int> out;
    if (element_major()) return out;
    for (int c = 0; c < n_components(); ++c) {
      std::array<int, 3> sz = {1, 1, 1};
      for (int a = 0; a < dim(); ++a) sz[a] = axis_dofs(c, a);
      for (int k = 0; k < sz[2]; ++k)
        for (int j = 0; j < sz[1]; ++j)
          for (int i = 0; i < sz[0]; ++i) {
            std::array<int, 3> gi = {i, j, k};
            bool bdr = false;
            for (int a = 0; a < dim(); ++a) {
              if (!interp_axis(c, a)) continue;
              bool on_face = gi[a] == 0 || gi[a] == sz[a] - 1;
              if (!on_face) continue;
              if (kind == SpaceKind::H1) bdr = true;
              if (kind == SpaceKind::HCurl && a != c) bdr = true;
              if (kind == SpaceKind::HDiv && a == c) bdr = true;
            }
            if (bdr) out.push_back(global_dof(c, gi));
          }
    }
    return out;
  }
};

inline FeSpace build_space(SpaceKind kind, int p, const CartMesh& mesh,
                           BasisVariant variant = BasisVariant::Histopolation) {
  if (p < 1) throw std::invalid_argument("build_space: p must be >= 1");
  if (kind == SpaceKind::HCurl && mesh.dim < 2)
    throw std::invalid_argument("build_space: HCurl requires dim >= 2");
  FeSpace s;
  s.kind = kind;
  s.degree = p;
  s.mesh = mesh;
  s.variant = variant;
  if (s.element_major()) {
    s.n_dofs = mesh.n_elements() * s.local_layout().size();
  } else {
    s.n_dofs = 0;
    for (int c = 0; c < s.n_components(); ++c) {
      int sz = 1;
      for (int a = 0; a < mesh.dim; ++a) sz *= s.axis_dofs(c, a);
      s.n_dofs += sz;
    }
  }
  return s;
}

}  // namespace lorfem
