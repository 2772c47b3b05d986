// Tensor-product DOF layouts on the reference element and the DOF-level
// gradient, curl, and divergence operators. Degrees of freedom are nodal
// values for interpolation directions and scaled subinterval averages for
// histopolation directions, so a single incidence matrix (entries +-1/h_i)
// serves both the high-order and low-order-refined representations.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <stdexcept>
#include <vector>

#include "lorfem/quadrature.hpp"

namespace lorfem {

enum class SpaceKind { H1, HCurl, HDiv, L2, DG };

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Per-space reference DOF layout: vector spaces are stored as one block per
// component (x first, then y, then z); within a block indices are
// lexicographic with the x index fastest.
struct RefElementLayout {
  int dim = 3;
  int degree = 1;
  SpaceKind kind = SpaceKind::H1;

  static int component_count(SpaceKind k, int d) {
    return (k == SpaceKind::HCurl || k == SpaceKind::HDiv) ? d : 1;
  }

  // Number of 1D indices along `axis` for component `comp`.
  int axis_size(int comp, int axis) const {
    const int p = degree;
    switch (kind) {
      case SpaceKind::H1:
      case SpaceKind::DG:
        return p + 1;
      case SpaceKind::L2:
        return p;
      case SpaceKind::HCurl:
        return axis == comp ? p : p + 1;
      case SpaceKind::HDiv:
        return axis == comp ? p + 1 : p;
    }
    return 0;
  }

  int component_size(int comp) const {
    int n = 1;
    for (int a = 0; a < dim; ++a) n *= axis_size(comp, a);
    return n;
  }

  int size() const {
    int n = 0;
    for (int c = 0; c < component_count(kind, dim); ++c) n += component_size(c);
    return n;
  }

  int flat_index(int comp, std::array<int, 3> idx) const {
    int off = 0;
    for (int c = 0; c < comp; ++c) off += component_size(c);
    int f = 0, stride = 1;
    for (int a = 0; a < dim; ++a) {
      f += idx[a] * stride;
      stride *= axis_size(comp, a);
    }
    return off + f;
  }

  // Inverse of flat_index.
  std::pair<int, std::array<int, 3>> unflatten(int flat) const {
    int comp = 0;
    while (flat >= component_size(comp)) {
      flat -= component_size(comp);
      ++comp;
    }
    std::array<int, 3> idx = {0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      int s = axis_size(comp, a);
      idx[a] = flat % s;
      flat /= s;
    }
    return {comp, idx};
  }
};

inline int dof_count(SpaceKind kind, int p, int d) {
  RefElementLayout l{d, p, kind};
  return l.size();
}

enum class IncidenceKind { Grad, Curl, Div };

// DOF-level differential operator on the reference element.
struct IncidenceOp {
  IncidenceKind kind = IncidenceKind::Grad;
  int degree = 1;
  int dim = 3;
  SpMat mat;  // maps source-space DOFs to target-space DOFs
};

namespace detail {

// Sparse 1D building blocks: identity and the difference map
// m_i = (u_{i+1} - u_i)/h_i.
inline SpMat sparse_identity(int n) {
  SpMat m(n, n);
  m.setIdentity();
  return m;
}

inline SpMat difference_matrix(const NodalRule& rule) {
  const int p = rule.degree;
  SpMat d(p, p + 1);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(2 * p);
  for (int i = 0; i < p; ++i) {
    t.emplace_back(i, i, -1.0 / rule.subinterval_lengths[i]);
    t.emplace_back(i, i + 1, 1.0 / rule.subinterval_lengths[i]);
  }
  d.setFromTriplets(t.begin(), t.end());
  return d;
}

// Kronecker product with the x factor fastest: rows/cols flatten as
// i + size_x * j + size_x * size_y * k, i.e. kron(az, ay, ax) in the usual
// (slowest-first) convention.
inline SpMat kron2(const SpMat& ay, const SpMat& ax) {
  SpMat out(ay.rows() * ax.rows(), ay.cols() * ax.cols());
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(ay.nonZeros()) * ax.nonZeros());
  for (int jy = 0; jy < ay.outerSize(); ++jy)
    for (SpMat::InnerIterator ity(ay, jy); ity; ++ity)
      for (int jx = 0; jx < ax.outerSize(); ++jx)
        for (SpMat::InnerIterator itx(ax, jx); itx; ++itx)
          t.emplace_back(ity.row() * ax.rows() + itx.row(),
                         ity.col() * ax.cols() + itx.col(),
                         ity.value() * itx.value());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

inline SpMat kron3(const SpMat& az, const SpMat& ay, const SpMat& ax) {
  return kron2(az, kron2(ay, ax));
}

}  // namespace detail

inline IncidenceOp build_incidence(IncidenceKind kind, int p, int d) {
  if (p < 1) throw std::invalid_argument("build_incidence: p must be >= 1");
  if (kind == IncidenceKind::Curl && d == 1)
    throw std::invalid_argument("build_incidence: curl requires d >= 2");
  if (d < 1 || d > 3) throw std::invalid_argument("build_incidence: d in {1,2,3}");

  NodalRule rule = gauss_lobatto_rule(p);
  SpMat diff = detail::difference_matrix(rule);
  SpMat in = detail::sparse_identity(p + 1);  // interpolation-direction identity
  SpMat ih = detail::sparse_identity(p);      // histopolation-direction identity
  using detail::kron2;
  using detail::kron3;

  IncidenceOp op;
  op.kind = kind;
  op.degree = p;
  op.dim = d;

  auto hstack = [](const std::vector<SpMat>& blocks) {
    int rows = blocks.front().rows(), cols = 0;
    for (const auto& b : blocks) cols += b.cols();
    SpMat m(rows, cols);
    std::vector<Eigen::Triplet<double>> t;
    int off = 0;
    for (const auto& b : blocks) {
      for (int j = 0; j < b.outerSize(); ++j)
        for (SpMat::InnerIterator it(b, j); it; ++it)
          t.emplace_back(it.row(), off + it.col(), it.value());
      off += b.cols();
    }
    m.setFromTriplets(t.begin(), t.end());
    return m;
  };
  auto vstack = [](const std::vector<SpMat>& blocks) {
    int cols = blocks.front().cols(), rows = 0;
    for (const auto& b : blocks) rows += b.rows();
    SpMat m(rows, cols);
    std::vector<Eigen::Triplet<double>> t;
    int off = 0;
    for (const auto& b : blocks) {
      for (int j = 0; j < b.outerSize(); ++j)
        for (SpMat::InnerIterator it(b, j); it; ++it)
          t.emplace_back(off + it.row(), it.col(), it.value());
      off += b.rows();
    }
    m.setFromTriplets(t.begin(), t.end());
    return m;
  };
  auto zeros = [](int r, int c) { return SpMat(r, c); };

  switch (kind) {
    case IncidenceKind::Grad: {
      if (d == 1) {
        op.mat = diff;
      } else if (d == 2) {
        op.mat = vstack({kron2(in, diff), kron2(diff, in)});
      } else {
        op.mat = vstack({kron3(in, in, diff), kron3(in, diff, in),
                         kron3(diff, in, in)});
      }
      break;
    }
    case IncidenceKind::Curl: {
      if (d == 2) {
        // Scalar curl: d_x w_y - d_y w_x.
        op.mat = hstack({SpMat(-kron2(diff, ih)), kron2(ih, diff)});
      } else {
        // Rows: HDiv components x,y,z; columns: HCurl components x,y,z.
        SpMat cxy = -kron3(diff, ih, in);           // -d_z w_y
        SpMat cxz = kron3(ih, diff, in);            //  d_y w_z
        SpMat cyx = kron3(diff, in, ih);            //  d_z w_x
        SpMat cyz = -kron3(ih, in, diff);           // -d_x w_z
        SpMat czx = -kron3(in, diff, ih);           // -d_y w_x
        SpMat czy = kron3(in, ih, diff);            //  d_x w_y
        int nx = cyx.cols(), ny = cxy.cols(), nz = cxz.cols();
        op.mat = vstack({hstack({zeros(cxy.rows(), nx), cxy, cxz}),
                         hstack({cyx, zeros(cyx.rows(), ny), cyz}),
                         hstack({czx, czy, zeros(czx.rows(), nz)})});
      }
      break;
    }
    case IncidenceKind::Div: {
      if (d == 1) {
        op.mat = diff;
      } else if (d == 2) {
        op.mat = hstack({kron2(ih, diff), kron2(diff, ih)});
      } else {
        op.mat = hstack({kron3(ih, ih, diff), kron3(ih, diff, ih),
                         kron3(diff, ih, ih)});
      }
      break;
    }
  }
  return op;
}

struct ComplexRanks {
  int ker_grad = 0, ker_curl = 0, ker_div = 0;
  int rank_grad = 0, rank_curl = 0, rank_div = 0;
};

namespace detail {

inline int numeric_rank(const SpMat& m) {
  Eigen::MatrixXd dense(m);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  double tol = 1e-10 * sv(0);
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++r;
  return r;
}

}  // namespace detail

/// Numerically determined ranks and kernel dimensions of the incidence
/// operators (desk scale: d in {2,3}, small p).
inline ComplexRanks complex_ranks(int p, int d) {
  if (d != 2 && d != 3) throw std::invalid_argument("complex_ranks: d in {2,3}");
  ComplexRanks r;
  auto grad = build_incidence(IncidenceKind::Grad, p, d);
  r.rank_grad = detail::numeric_rank(grad.mat);
  r.ker_grad = static_cast<int>(grad.mat.cols()) - r.rank_grad;
  auto curl = build_incidence(IncidenceKind::Curl, p, d);
  r.rank_curl = detail::numeric_rank(curl.mat);
  r.ker_curl = static_cast<int>(curl.mat.cols()) - r.rank_curl;
  if (d == 3) {
    auto div = build_incidence(IncidenceKind::Div, p, d);
    r.rank_div = detail::numeric_rank(div.mat);
    r.ker_div = static_cast<int>(div.mat.cols()) - r.rank_div;
  } else {
    auto div = build_incidence(IncidenceKind::Div, p, 2);
    r.rank_div = detail::numeric_rank(div.mat);
    r.ker_div = static_cast<int>(div.mat.cols()) - r.rank_div;
  }
  return r;
}

}  // namespace lorfem
