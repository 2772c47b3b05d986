// Desk-scale experiment drivers behind the CLI subcommands: 1D equivalence
// constants, single-element condition numbers with their kappa-product
// estimates, diagonal mass-preconditioner iteration counts, LOR-
// preconditioned solves, and the DG penalty study.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lorfem/assembly.hpp"
#include "lorfem/dg.hpp"
#include "lorfem/solvers.hpp"

namespace lorfem {

// Deterministic RNG for right-hand sides (splitmix64), uniform in [-1,1].
struct RandomStream {
  std::uint64_t state;
  explicit RandomStream(std::uint64_t seed) : state(seed) {}
  double next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z = z ^ (z >> 31);
    return 2.0 * (static_cast<double>(z >> 11) / 9007199254740992.0) - 1.0;
  }
  Eigen::VectorXd vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = next();
    return v;
  }
};

// ---------------------------------------------------------------------------
// constants: the four 1D equivalence-constant curves.

struct ConstantsRow {
  int p = 1;
  EquivKind kind = EquivKind::Interp;
  QuadMode quad = QuadMode::Exact;
  double c = 0.0, C = 0.0;
  double ratio() const { return C / c; }
};

inline std::vector<ConstantsRow> run_constants(int p_max) {
  std::vector<ConstantsRow> rows;
  for (auto kind : {EquivKind::Interp, EquivKind::Histop})
    for (auto qm : {QuadMode::Exact, QuadMode::Collocated})
      for (int p = 1; p <= p_max; ++p) {
        auto ec = equivalence_constants(p, kind, qm);
        rows.push_back({p, kind, qm, ec.c, ec.C});
      }
  return rows;
}

// ---------------------------------------------------------------------------
// element-cond: single-element condition numbers of (A_p, A_h).

struct ElementCondRow {
  SpaceKind kind = SpaceKind::H1;
  int p = 1;
  double cond = 0.0;      // computed, Dirichlet-eliminated pencil
  double estimate = 0.0;  // kappa product from the 1D constants
};

/// The kappa-product estimate for one space: each tensor factor of the
/// gradient/curl/divergence relation contributes its 1D constant.
inline double kappa_estimate(SpaceKind kind, int d, int p, QuadMode qm) {
  double ki = equivalence_constants(p, EquivKind::Interp, qm).ratio();
  double kh = equivalence_constants(p, EquivKind::Histop, qm).ratio();
  switch (kind) {
    case SpaceKind::H1:
      return std::pow(ki, d - 1) * kh;
    case SpaceKind::HCurl:
      return (d == 2) ? kh * kh : ki * kh * kh;
    case SpaceKind::HDiv:
      return (d == 2) ? kh * kh : kh * kh * kh;
    default:
      throw std::invalid_argument("kappa_estimate: unsupported kind");
  }
}

/// Computed condition number: A_p = M_p + K_p with collocated quadrature,
/// A_h its LOR counterpart, Dirichlet DOFs eliminated symmetrically to the
/// identity (the eliminated block contributes the eigenvalue 1).
inline double element_condition(SpaceKind kind, int d, int p, QuadMode qm) {
  auto mesh = (d == 2) ? build_cart_mesh(2, {1, 1, 1}, {-1, -1, -1}, {1, 1, 1})
                       : build_cart_mesh(3, {1, 1, 1}, {-1, -1, -1}, {1, 1, 1});
  auto s = build_space(kind, p, mesh);
  auto ap = assemble(s, OpTag::MassPlusStiffness, qm);
  auto ah = assemble_lor(s, OpTag::MassPlusStiffness, {}, qm);
  auto bdr = s.boundary_dofs();
  Eigen::MatrixXd rp(restrict_to_free(ap.mat, bdr));
  Eigen::MatrixXd rh(restrict_to_free(ah.mat, bdr));
  if (rp.rows() == 0) return 1.0;  // p=1: everything is eliminated
  auto est = estimate_condition_dense(rp, &rh);
  return std::max(est.lambda_max, 1.0) / std::min(est.lambda_min, 1.0);
}

inline std::vector<ElementCondRow> run_element_cond(int d, const std::vector<int>& ps,
                                                    const std::vector<SpaceKind>& kinds,
                                                    QuadMode qm = QuadMode::Collocated) {
  std::vector<ElementCondRow> rows;
  for (auto kind : kinds)
    for (int p : ps)
      rows.push_back({kind, p, element_condition(kind, d, p, qm),
                      kappa_estimate(kind, d, p, QuadMode::Collocated)});
  return rows;
}

// ---------------------------------------------------------------------------
// mass-iters: diagonal preconditioning of the high-order mass matrix.

enum class MassVariant { Lobatto, Legendre, Integrated, Lor };

inline const char* variant_name(MassVariant v) {
  switch (v) {
    case MassVariant::Lobatto: return "lobatto";
    case MassVariant::Legendre: return "legendre";
    case MassVariant::Integrated: return "integrated";
    case MassVariant::Lor: return "lor";
  }
  return "?";
}

struct MassItersRow {
  SpaceKind kind = SpaceKind::H1;
  int p = 1;
  MassVariant variant = MassVariant::Lobatto;
  int iterations = 0;
  bool converged = false;
};

/// Solve M_p x = b (random b) with the chosen diagonal preconditioner to a
/// relative tolerance of 1e-12; the operator is applied matrix-free.
inline MassItersRow run_mass_iters_one(const CartMesh& mesh, SpaceKind kind, int p,
                                       MassVariant variant, std::uint64_t seed) {
  BasisVariant bv = BasisVariant::Histopolation;
  if (variant == MassVariant::Legendre) bv = BasisVariant::Legendre;
  if (variant == MassVariant::Lobatto) bv = BasisVariant::Lobatto;
  auto s = build_space(kind, p, mesh, bv);
  Coefficients none;
  Eigen::VectorXd diag;
  if (variant == MassVariant::Lor) {
    auto lor_space = build_space(kind, p, mesh);
    diag = assemble_lor(lor_space, OpTag::Mass).mat.diagonal();
  } else {
    diag = mass_diagonal(s, none);
  }
  LinearOperator op = [&s, &none](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    apply_mass_matfree(s, none, x, y);
  };
  RandomStream rng(seed);
  Eigen::VectorXd b = rng.vector(s.n_dofs);
  auto [x, rep] = pcg(op, b, diagonal_precond(diag), 1e-12, 2000);
  (void)x;
  return {kind, p, variant, rep.iterations, rep.converged};
}

inline std::vector<MassItersRow> run_mass_iters(const CartMesh& mesh,
                                                const std::vector<int>& ps,
                                                const std::vector<SpaceKind>& kinds,
                                                const std::vector<MassVariant>& variants,
                                                std::uint64_t seed) {
  std::vector<MassItersRow> rows;
  for (auto kind : kinds)
    for (int p : ps)
      for (auto v : variants) {
        if (kind == SpaceKind::H1 &&
            (v == MassVariant::Legendre || v == MassVariant::Integrated))
          continue;  // H1 has no discontinuous tensor factors
        rows.push_back(run_mass_iters_one(mesh, kind, p, v, seed));
      }
  return rows;
}

// ---------------------------------------------------------------------------
// solve: LOR-preconditioned solve of A_p x = b with Dirichlet elimination.

enum class SolvePrecond { LorCholesky, Jacobi, LorJacobi, Identity };

struct SolveSetup {
  SpaceKind kind = SpaceKind::H1;
  int p = 2;
  QuadMode quad = QuadMode::Collocated;
  SolvePrecond precond = SolvePrecond::LorCholesky;
  Coefficients coefficients;
  double rel_tol = 1e-12;
  int max_iter = 2000;
  bool zero_rhs = false;
  std::uint64_t seed = 1;
};

inline SolveReport run_solve(const CartMesh& mesh, const SolveSetup& cfg) {
  auto s = build_space(cfg.kind, cfg.p, mesh);
  auto ap = assemble(s, OpTag::MassPlusStiffness, cfg.quad, cfg.coefficients);
  auto bdr = s.boundary_dofs();
  eliminate_dirichlet(ap.mat, bdr);

  Preconditioner prec = identity_precond();
  switch (cfg.precond) {
    case SolvePrecond::LorCholesky: {
      auto ah = assemble_lor(s, OpTag::MassPlusStiffness, cfg.coefficients, cfg.quad);
      eliminate_dirichlet(ah.mat, bdr);
      prec = lor_cholesky_setup(ah.mat);
      break;
    }
    case SolvePrecond::Jacobi:
      prec = jacobi_precond(ap.mat);
      break;
    case SolvePrecond::LorJacobi: {
      auto ah = assemble_lor(s, OpTag::MassPlusStiffness, cfg.coefficients, cfg.quad);
      eliminate_dirichlet(ah.mat, bdr);
      prec = jacobi_precond(ah.mat);
      break;
    }
    case SolvePrecond::Identity:
      break;
  }

  Eigen::VectorXd b;
  if (cfg.zero_rhs) {
    b = Eigen::VectorXd::Zero(s.n_dofs);
  } else {
    RandomStream rng(cfg.seed);
    b = rng.vector(s.n_dofs);
    for (int d : bdr) b[d] = 0.0;  // homogeneous essential values
  }
  auto [x, rep] = pcg(ap.mat, b, prec, cfg.rel_tol, cfg.max_iter, true);
  (void)x;
  return rep;
}

// ---------------------------------------------------------------------------
// dg-penalty: iteration counts and pencil conditioning for the IP forms.

struct DgPenaltyRow {
  int p = 1;
  double eta = 0.0;
  std::string precond;
  int iterations = 0;
  bool converged = false;
  double cond = -1.0;  // dense cond(K_Zh^-1 K_Zp) when computed, else -1
};

inline std::vector<DgPenaltyRow> run_dg_penalty(const CartMesh& mesh,
                                                const std::vector<int>& ps,
                                                const std::vector<double>& etas,
                                                std::uint64_t seed,
                                                QuadMode qm = QuadMode::Collocated,
                                                const Eigen::VectorXd* rhs = nullptr) {
  std::vector<DgPenaltyRow> rows;
  for (int p : ps) {
    auto s = build_space(SpaceKind::DG, p, mesh);
    auto lor = lor_refine(mesh, p, RefineMode::DG);
    for (double eta : etas) {
      auto kp = assemble_ip_dg(s, eta, qm, true);
      auto kh = assemble_ip_dg_lor(s, eta, true);
      double cond = -1.0;
      if (s.n_dofs <= 5000) {
        Eigen::MatrixXd dp(kp.mat), dh(kh.mat);
        cond = estimate_condition_dense(dp, &dh).cond;
      }
      Eigen::VectorXd b;
      if (rhs && rhs->size() == s.n_dofs) {
        b = *rhs;
      } else {
        RandomStream rng(seed);
        b = rng.vector(s.n_dofs);
      }

      auto split = cf_split(kh.mat, lor, CfMode::Geometric);
      Preconditioner amg = two_level_amg_setup(kh.mat, split);
      auto [x1, r1] = pcg(kp.mat, b, amg, 1e-12, 4000);
      rows.push_back({p, eta, "amg-lor", r1.iterations, r1.converged, cond});

      Preconditioner chol = lor_cholesky_setup(kh.mat);
      auto [x2, r2] = pcg(kp.mat, b, chol, 1e-12, 4000);
      rows.push_back({p, eta, "cholesky-lor", r2.iterations, r2.converged, cond});

      auto [x3, r3] = pcg(kp.mat, b, jacobi_precond(kp.mat), 1e-12, 4000);
      rows.push_back({p, eta, "jacobi", r3.iterations, r3.converged, cond});
      (void)x1;
      (void)x2;
      (void)x3;
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Structure-level test function for manufactured DG data:
// w_n(x) = sum_{j<n} u_{3^j}(x), u_k = exp(-1/s_k^2) sign(s_k),
// s_k(x) = sin(2 k pi x); the limiting value at s_k = 0 is 0.

inline double structure_solution(int n, double x) {
  double w = 0.0;
  long k = 1;
  for (int j = 0; j < n; ++j, k *= 3) {
    double s = std::sin(2.0 * M_PI * k * x);
    if (s != 0.0) w += std::exp(-1.0 / (s * s)) * (s > 0 ? 1.0 : -1.0);
  }
  return w;
}

}  // namespace lorfem
