// One-dimensional interpolatory and histopolatory bases on Gauss-Lobatto
// points, their low-order (piecewise linear / piecewise constant)
// counterparts, the nodal-to-mean derivative map, 1D operator matrices,
// and the L2 equivalence-constant estimator.
#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "lorfem/dense_eig.hpp"
#include "lorfem/quadrature.hpp"

namespace lorfem {

enum class BasisKind { Interpolation, Histopolation, LowOrderLinear, LowOrderConstant };

enum class QuadMode { Exact, Collocated };

// A 1D basis tied to a nodal rule. Interpolation/LowOrderLinear have p+1
// functions, Histopolation/LowOrderConstant have p. The interpolation nodes
// may differ from the rule's points (Gauss-Legendre / low-degree Lobatto
// nodal variants used for the discontinuous components).
struct Basis1D {
  BasisKind kind = BasisKind::Interpolation;
  NodalRule rule;
  std::vector<double> nodes;  // interpolation nodes (empty unless nodal kind)
  std::vector<double> bary;   // barycentric weights for `nodes`
  int dimension = 0;
};

namespace detail {

inline std::vector<double> barycentric_weights(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> b(n, 1.0);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (k != j) b[j] /= (x[j] - x[k]);
  return b;
}

// Values of all Lagrange polynomials on `nodes` at x (barycentric form).
inline void lagrange_values(const std::vector<double>& x,
                            const std::vector<double>& b, double t,
                            std::vector<double>& out) {
  const int n = static_cast<int>(x.size());
  out.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    if (std::abs(t - x[j]) < 1e-14) {
      out[j] = 1.0;
      return;
    }
  }
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += b[k] / (t - x[k]);
  for (int j = 0; j < n; ++j) out[j] = (b[j] / (t - x[j])) / s;
}

// Derivatives of all Lagrange polynomials at x. At a node the standard
// differentiation-matrix formulas are used; elsewhere the derivative of the
// barycentric form.
inline void lagrange_derivs(const std::vector<double>& x,
                            const std::vector<double>& b, double t,
                            std::vector<double>& out) {
  const int n = static_cast<int>(x.size());
  out.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (std::abs(t - x[i]) < 1e-14) {
      double diag = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        out[j] = (b[j] / b[i]) / (x[i] - x[j]);
        diag -= out[j];
      }
      out[i] = diag;
      return;
    }
  }
  double s = 0.0, s2 = 0.0;
  for (int k = 0; k < n; ++k) {
    double d = b[k] / (t - x[k]);
    s += d;
    s2 += d / (t - x[k]);
  }
  std::vector<double> val(n);
  lagrange_values(x, b, t, val);
  for (int j = 0; j < n; ++j) out[j] = val[j] * (s2 / s - 1.0 / (t - x[j]));
}

// Index of the rule subinterval containing x (right-open, last is closed).
inline int find_subinterval(const NodalRule& r, double x) {
  const int p = r.degree;
  int m = 0;
  while (m < p - 1 && x >= r.points[m + 1]) ++m;
  return m;
}

}  // namespace detail

inline Basis1D make_basis(BasisKind kind, const NodalRule& rule) {
  Basis1D b;
  b.kind = kind;
  b.rule = rule;
  const int p = rule.degree;
  b.dimension = (kind == BasisKind::Interpolation || kind == BasisKind::LowOrderLinear)
                    ? p + 1
                    : p;
  if (kind == BasisKind::Interpolation) {
    b.nodes = rule.points;
    b.bary = detail::barycentric_weights(b.nodes);
  } else if (kind == BasisKind::Histopolation) {
    // Evaluated through the nodal basis of the same rule.
    b.nodes = rule.points;
    b.bary = detail::barycentric_weights(b.nodes);
  }
  return b;
}

/// Nodal (Lagrange) basis on an arbitrary point set; used for the
/// Gauss-Legendre and low-degree Gauss-Lobatto variants of the
/// discontinuous components.
inline Basis1D make_nodal_basis(const std::vector<double>& nodes) {
  Basis1D b;
  b.kind = BasisKind::Interpolation;
  b.nodes = nodes;
  b.bary = detail::barycentric_weights(nodes);
  b.dimension = static_cast<int>(nodes.size());
  return b;
}

/// Values of every basis function at x. The histopolation basis is computed
/// from the negative partial sums of the nodal derivatives,
/// theta_i = -h_i * sum_{k<=i} l_k'.
inline std::vector<double> eval_basis(const Basis1D& b, double x) {
  std::vector<double> out;
  switch (b.kind) {
    case BasisKind::Interpolation:
      detail::lagrange_values(b.nodes, b.bary, x, out);
      return out;
    case BasisKind::Histopolation: {
      std::vector<double> dl;
      detail::lagrange_derivs(b.nodes, b.bary, x, dl);
      out.resize(b.dimension);
      double acc = 0.0;
      for (int i = 0; i < b.dimension; ++i) {
        acc += dl[i];
        out[i] = -b.rule.subinterval_lengths[i] * acc;
      }
      return out;
    }
    case BasisKind::LowOrderLinear: {
      out.assign(b.dimension, 0.0);
      int m = detail::find_subinterval(b.rule, x);
      double h = b.rule.subinterval_lengths[m];
      out[m] = (b.rule.points[m + 1] - x) / h;
      out[m + 1] = (x - b.rule.points[m]) / h;
      return out;
    }
    case BasisKind::LowOrderConstant: {
      out.assign(b.dimension, 0.0);
      out[detail::find_subinterval(b.rule, x)] = 1.0;
      return out;
    }
  }
  throw std::logic_error("eval_basis: unknown kind");
}

/// Derivatives of every basis function at x (Interpolation and
/// LowOrderLinear kinds). For LowOrderLinear the one-sided value from the
/// right is taken at interior nodes, from the left at x = 1.
inline std::vector<double> eval_basis_deriv(const Basis1D& b, double x) {
  std::vector<double> out;
  switch (b.kind) {
    case BasisKind::Interpolation:
      detail::lagrange_derivs(b.nodes, b.bary, x, out);
      return out;
    case BasisKind::LowOrderLinear: {
      out.assign(b.dimension, 0.0);
      int m = detail::find_subinterval(b.rule, x);
      double h = b.rule.subinterval_lengths[m];
      out[m] = -1.0 / h;
      out[m + 1] = 1.0 / h;
      return out;
    }
    default:
      throw std::invalid_argument("eval_basis_deriv: basis is not differentiable pointwise");
  }
}

/// Histopolation DOFs of the derivative of the interpolant of `nodal`:
/// m_i = (u_{i+1} - u_i) / h_i. Identical for the high- and low-order pairs.
inline std::vector<double> derivative_dof_map(const NodalRule& rule,
                                              std::span<const double> nodal) {
  const int p = rule.degree;
  if (static_cast<int>(nodal.size()) != p + 1)
    throw std::invalid_argument("derivative_dof_map: expected p+1 nodal values");
  std::vector<double> m(p);
  for (int i = 0; i < p; ++i)
    m[i] = (nodal[i + 1] - nodal[i]) / rule.subinterval_lengths[i];
  return m;
}

enum class PairKind { MassInterp, MassHistop, Stiffness };

// High-order and matching low-order 1D Gram matrices.
struct OperatorPair1D {
  Eigen::MatrixXd high_order;
  Eigen::MatrixXd low_order;
  PairKind kind = PairKind::MassInterp;
};

namespace detail {

// Gram matrix of a basis (or of its derivatives) under a point rule.
inline Eigen::MatrixXd gram(const Basis1D& b, const std::vector<double>& qx,
                            const std::vector<double>& qw, bool use_deriv) {
  const int n = b.dimension;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> v;
  for (std::size_t k = 0; k < qx.size(); ++k) {
    v = use_deriv ? eval_basis_deriv(b, qx[k]) : eval_basis(b, qx[k]);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) m(i, j) += qw[k] * v[i] * v[j];
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) m(i, j) = m(j, i);
  return m;
}

}  // namespace detail

/// 1D mass matrix of the interpolation basis. Exact mode integrates with a
/// (p+1)-point Gauss-Legendre rule; Collocated uses the rule's own points,
/// which yields diag(w).
inline Eigen::MatrixXd mass_interp_1d(const NodalRule& rule, QuadMode qm) {
  Basis1D b = make_basis(BasisKind::Interpolation, rule);
  if (qm == QuadMode::Collocated)
    return detail::gram(b, rule.points, rule.weights, false);
  QuadRule q = gauss_legendre_rule(rule.degree + 1);
  return detail::gram(b, q.points, q.weights, false);
}

/// 1D mass matrix of the histopolation basis (degree p-1 on p subintervals).
/// Collocated quadrature is exact here, so both modes coincide.
inline Eigen::MatrixXd mass_histop_1d(const NodalRule& rule, QuadMode qm) {
  Basis1D b = make_basis(BasisKind::Histopolation, rule);
  if (qm == QuadMode::Collocated)
    return detail::gram(b, rule.points, rule.weights, false);
  QuadRule q = gauss_legendre_rule(rule.degree + 1);
  return detail::gram(b, q.points, q.weights, false);
}

/// 1D stiffness matrix of the interpolation basis (integrand of degree
/// 2p-2, exact under both modes).
inline Eigen::MatrixXd stiffness_interp_1d(const NodalRule& rule, QuadMode qm) {
  Basis1D b = make_basis(BasisKind::Interpolation, rule);
  if (qm == QuadMode::Collocated)
    return detail::gram(b, rule.points, rule.weights, true);
  QuadRule q = gauss_legendre_rule(rule.degree + 1);
  return detail::gram(b, q.points, q.weights, true);
}

/// Low-order piecewise-linear mass on the rule's subintervals. Exact mode
/// gives the consistent tridiagonal matrix, Collocated the per-subinterval
/// trapezoid (lumped) diagonal.
inline Eigen::MatrixXd mass_linear_1d(const NodalRule& rule, QuadMode qm) {
  const int p = rule.degree;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p + 1, p + 1);
  for (int i = 0; i < p; ++i) {
    double h = rule.subinterval_lengths[i];
    if (qm == QuadMode::Exact) {
      m(i, i) += h / 3.0;
      m(i + 1, i + 1) += h / 3.0;
      m(i, i + 1) += h / 6.0;
      m(i + 1, i) += h / 6.0;
    } else {
      m(i, i) += h / 2.0;
      m(i + 1, i + 1) += h / 2.0;
    }
  }
  return m;
}

/// Low-order piecewise-constant mass: diag(h_i) under either mode.
inline Eigen::MatrixXd mass_constant_1d(const NodalRule& rule, QuadMode) {
  const int p = rule.degree;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i) m(i, i) = rule.subinterval_lengths[i];
  return m;
}

/// Low-order piecewise-linear stiffness (exact under either mode).
inline Eigen::MatrixXd stiffness_linear_1d(const NodalRule& rule, QuadMode) {
  const int p = rule.degree;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p + 1, p + 1);
  for (int i = 0; i < p; ++i) {
    double h = rule.subinterval_lengths[i];
    m(i, i) += 1.0 / h;
    m(i + 1, i + 1) += 1.0 / h;
    m(i, i + 1) -= 1.0 / h;
    m(i + 1, i) -= 1.0 / h;
  }
  return m;
}

inline OperatorPair1D operator_pair_1d(const NodalRule& rule, PairKind kind,
                                       QuadMode qm) {
  OperatorPair1D pair;
  pair.kind = kind;
  switch (kind) {
    case PairKind::MassInterp:
      pair.high_order = mass_interp_1d(rule, qm);
      pair.low_order = mass_linear_1d(rule, qm);
      break;
    case PairKind::MassHistop:
      pair.high_order = mass_histop_1d(rule, qm);
      pair.low_order = mass_constant_1d(rule, qm);
      break;
    case PairKind::Stiffness:
      pair.high_order = stiffness_interp_1d(rule, qm);
      pair.low_order = stiffness_linear_1d(rule, qm);
      break;
  }
  return pair;
}

enum class EquivKind { Interp, Histop };

// Constants of the squared-norm equivalence
//   c * ||low||^2  <=  ||high||^2  <=  C * ||low||^2,
// i.e. the extreme generalized eigenvalues of the 1D mass pencil. The ratio
// C/c is the kappa used in the condition-number estimates.
struct EquivConstants {
  double c = 0.0;
  double C = 0.0;
  double ratio() const { return C / c; }
};

inline EquivConstants equivalence_constants(int p, EquivKind kind, QuadMode qm) {
  if (p < 1) throw std::invalid_argument("equivalence_constants: p must be >= 1");
  NodalRule rule = gauss_lobatto_rule(p);
  OperatorPair1D pair = operator_pair_1d(
      rule, kind == EquivKind::Interp ? PairKind::MassInterp : PairKind::MassHistop, qm);
  std::vector<double> ev =
      generalized_eigenvalues_small(pair.high_order, pair.low_order);
  EquivConstants ec{ev.front(), ev.back()};
  if (!(ec.c > 0.0) || !std::isfinite(ec.C))
    throw std::runtime_error("equivalence_constants: singular operator pair");
  return ec;
}

}  // namespace lorfem
