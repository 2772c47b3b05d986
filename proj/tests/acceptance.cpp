// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned in code; measured values are printed so
// failures are diagnosable from the log alone.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "lorfem/experiments.hpp"

using namespace lorfem;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& what) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", id, what.c_str());
  if (!pass) ++g_failures;
}

bool within(double value, double target, double rel_tol) {
  return std::abs(value - target) <= rel_tol * std::abs(target);
}

struct TableRef {
  int dim;
  SpaceKind kind;
  std::map<int, double> cond;
  std::map<int, double> estimate;
};

// Reference values of the single-element comparison table.
const std::vector<TableRef> kTable = {
    {2, SpaceKind::H1,
     {{2, 1.41}, {4, 1.63}, {6, 1.82}, {8, 1.95}, {10, 2.04}},
     {{2, 2.67}, {4, 3.18}, {6, 3.49}, {8, 3.68}, {10, 3.82}}},
    {2, SpaceKind::HCurl,
     {{2, 1.76}, {4, 2.84}, {6, 3.51}, {8, 3.95}, {10, 4.27}},
     {{2, 1.78}, {4, 2.86}, {6, 3.52}, {8, 3.96}, {10, 4.28}}},
    {3, SpaceKind::H1,
     {{2, 2.37}, {4, 1.99}, {6, 2.03}, {8, 2.08}, {10, 2.13}},
     {{2, 5.33}, {4, 5.98}, {6, 6.48}, {8, 6.81}, {10, 7.05}}},
    {3, SpaceKind::HCurl,
     {{2, 2.37}, {4, 3.10}, {6, 3.66}, {8, 4.05}, {10, 4.34}},
     {{2, 3.56}, {4, 5.37}, {6, 6.54}, {8, 7.33}, {10, 7.89}}},
    {3, SpaceKind::HDiv,
     {{2, 2.37}, {4, 4.82}, {6, 6.60}, {8, 7.88}, {10, 8.84}},
     {{2, 2.37}, {4, 4.83}, {6, 6.61}, {8, 7.89}, {10, 8.84}}},
};

const char* kind_label(SpaceKind k) {
  switch (k) {
    case SpaceKind::H1: return "H1";
    case SpaceKind::HCurl: return "HCurl";
    case SpaceKind::HDiv: return "HDiv";
    default: return "?";
  }
}

// Criterion 1: table reproduction within +-3%; criterion 3 checks the
// upper-bound property on the same rows; criterion 2 the pi^2/4 bound.
void criteria_1_2_3() {
  std::vector<int> ps = {2, 4, 6, 8, 10};
  int bad_cond = 0, bad_est = 0, bad_bound = 0, rows = 0;
  double h1_max = 0.0;
  for (const auto& ref : kTable) {
    auto computed = run_element_cond(ref.dim, ps, {ref.kind});
    for (const auto& r : computed) {
      ++rows;
      double want = ref.cond.at(r.p);
      double want_est = ref.estimate.at(r.p);
      bool ok_c = within(r.cond, want, 0.03);
      bool ok_e = within(r.estimate, want_est, 0.03);
      bool ok_b = r.cond <= r.estimate + 1e-6;
      bad_cond += !ok_c;
      bad_est += !ok_e;
      bad_bound += !ok_b;
      std::printf("    %dD %-5s p=%2d  cond %7.4f (ref %4.2f%s)  est %7.4f (ref %4.2f%s)%s\n",
                  ref.dim, kind_label(ref.kind), r.p, r.cond, want, ok_c ? "" : " *",
                  r.estimate, want_est, ok_e ? "" : " *", ok_b ? "" : "  [bound violated]");
      if (ref.kind == SpaceKind::H1) h1_max = std::max(h1_max, r.cond);
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "table reproduction within 3%% (%d of %d computed, %d of %d estimates off)",
                rows - bad_cond, rows, bad_est, rows);
  report(1, bad_cond == 0 && bad_est == 0, buf);

  // Criterion 2: every collocated H1 condition number up to p=10, both
  // dimensions, sits below pi^2/4 + 0.01.
  double bound = M_PI * M_PI / 4.0 + 0.01;
  bool ok2 = true;
  double worst = 0.0;
  for (int d : {2, 3})
    for (int p = 1; p <= 10; ++p) {
      double c = element_condition(SpaceKind::H1, d, p, QuadMode::Collocated);
      worst = std::max(worst, c);
      if (c > bound) ok2 = false;
    }
  std::snprintf(buf, sizeof(buf), "H1 condition numbers <= pi^2/4 + 0.01 (max %.4f vs %.4f)",
                worst, bound);
  report(2, ok2, buf);

  std::snprintf(buf, sizeof(buf), "computed cond <= kappa estimate on every row (%d violations)",
                bad_bound);
  report(3, bad_bound == 0, buf);
}

// Criterion 4: discrete exactness, the commuting derivative projection, and
// the incidence-identity for the stiffness operators.
void criterion_4() {
  bool ok = true;

  for (int p = 1; p <= 8 && ok; ++p) {
    auto g = build_incidence(IncidenceKind::Grad, p, 3);
    auto c = build_incidence(IncidenceKind::Curl, p, 3);
    auto dv = build_incidence(IncidenceKind::Div, p, 3);
    SpMat cg = (c.mat * g.mat).pruned();
    SpMat dc = (dv.mat * c.mat).pruned();
    for (int r = 0; r < cg.outerSize(); ++r)
      for (SpMat::InnerIterator it(cg, r); it; ++it)
        if (std::abs(it.value()) > 1e-13) ok = false;
    for (int r = 0; r < dc.outerSize(); ++r)
      for (SpMat::InnerIterator it(dc, r); it; ++it)
        if (std::abs(it.value()) > 1e-13) ok = false;
  }

  // Commuting diagram: L2 projection of the interpolant derivative onto the
  // histopolation basis equals the nodal difference map.
  RandomStream rng(11);
  for (int p = 1; p <= 8 && ok; ++p) {
    auto rule = gauss_lobatto_rule(p);
    auto hi = make_basis(BasisKind::Histopolation, rule);
    auto ip = make_basis(BasisKind::Interpolation, rule);
    Eigen::MatrixXd mh = mass_histop_1d(rule, QuadMode::Exact);
    auto quad = gauss_legendre_rule(p + 1);
    for (int rep = 0; rep < 100; ++rep) {
      std::vector<double> u(p + 1);
      for (double& v : u) v = rng.next();
      auto m = derivative_dof_map(rule, u);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
      for (int k = 0; k <= p; ++k) {
        auto dl = eval_basis_deriv(ip, quad.points[k]);
        double du = 0.0;
        for (int i = 0; i <= p; ++i) du += u[i] * dl[i];
        auto th = eval_basis(hi, quad.points[k]);
        for (int j = 0; j < p; ++j) rhs[j] += quad.weights[k] * du * th[j];
      }
      Eigen::VectorXd proj = mh.ldlt().solve(rhs);
      for (int j = 0; j < p; ++j)
        if (std::abs(proj[j] - m[j]) > 1e-12) ok = false;
    }
  }

  // K = Inc^T M_next Inc, checked against an explicit recomputation on a
  // graded multi-element mesh in both quadrature modes.
  auto mesh = build_cart_mesh(3, {2, 1, 1}, {0, 0, 0}, {1.3, 0.9, 0.7}, {1.5, 1, 1});
  for (auto kind : {SpaceKind::H1, SpaceKind::HCurl, SpaceKind::HDiv}) {
    for (auto qm : {QuadMode::Exact, QuadMode::Collocated}) {
      auto s = build_space(kind, 3, mesh);
      auto k = assemble(s, OpTag::Stiffness, qm);
      auto next = build_space(stiffness_target_kind(kind, 3), 3, mesh);
      SpMat inc = global_incidence(stiffness_incidence_kind(kind), s, next);
      auto mn = assemble(next, OpTag::Mass, qm);
      SpMat prod = SpMat(inc.transpose()) * mn.mat * inc;
      SpMat diff = k.mat - prod;
      double scale = 0.0, err = 0.0;
      for (int r = 0; r < k.mat.outerSize(); ++r)
        for (SpMat::InnerIterator it(k.mat, r); it; ++it)
          scale = std::max(scale, std::abs(it.value()));
      for (int r = 0; r < diff.outerSize(); ++r)
        for (SpMat::InnerIterator it(diff, r); it; ++it)
          err = std::max(err, std::abs(it.value()));
      if (err > 1e-12 * scale) ok = false;
    }
  }

  report(4, ok, "exactness, commuting derivative projection, incidence stiffness identity");
}

// Criterion 5: DG spectral equivalence at desk scale.
void criterion_5() {
  auto mesh = build_cart_mesh(3, {2, 2, 2}, {0, 0, 0}, {1, 1, 1});
  std::vector<int> ps = {1, 2, 3};
  std::vector<double> etas = {10.0, 100.0, 10000.0};
  std::map<int, std::vector<double>> by_p;
  std::map<double, std::vector<double>> by_eta;
  for (int p : ps) {
    auto s = build_space(SpaceKind::DG, p, mesh);
    for (double eta : etas) {
      Eigen::MatrixXd kp(assemble_ip_dg(s, eta, QuadMode::Collocated, true).mat);
      Eigen::MatrixXd kh(assemble_ip_dg_lor(s, eta, true).mat);
      double cond = estimate_condition_dense(kp, &kh).cond;
      by_p[p].push_back(cond);
      by_eta[eta].push_back(cond);
      std::printf("    DG pencil p=%d eta=%-7g cond %7.4f\n", p, eta, cond);
    }
  }
  bool ok = true;
  for (int p : ps) {
    double lo = *std::min_element(by_p[p].begin(), by_p[p].end());
    double hi = *std::max_element(by_p[p].begin(), by_p[p].end());
    std::printf("    eta-spread at p=%d: %.4f (limit 1.10)\n", p, hi / lo);
    if (hi / lo > 1.10) ok = false;
  }
  for (double eta : etas) {
    double lo = *std::min_element(by_eta[eta].begin(), by_eta[eta].end());
    double hi = *std::max_element(by_eta[eta].begin(), by_eta[eta].end());
    std::printf("    p-spread at eta=%g: %.4f (limit 2.0)\n", eta, hi / lo);
    if (hi / lo > 2.0) ok = false;
  }
  report(5, ok, "DG pencil conditioning stable over eta (<=1.10) and p (<=2.0)");
}

// Criterion 6: two-level AMG eta-robustness and the Jacobi contrast.
void criterion_6() {
  auto mesh = build_cart_mesh(3, {3, 3, 3}, {0, 0, 0}, {1, 1, 1});
  bool ok = true;
  for (int p : {1, 2}) {
    auto s = build_space(SpaceKind::DG, p, mesh);
    auto lor = lor_refine(mesh, p, RefineMode::DG);
    auto run_amg = [&](double eta) {
      auto kh = assemble_ip_dg_lor(s, eta, true);
      auto split = cf_split(kh.mat, lor, CfMode::Geometric);
      auto amg = two_level_amg_setup(kh.mat, split);
      RandomStream rng(3);
      Eigen::VectorXd b = rng.vector(s.n_dofs);
      auto [x, rep] = pcg(kh.mat, b, amg, 1e-12, 4000);
      (void)x;
      return rep;
    };
    auto low = run_amg(10.0);
    auto high = run_amg(1e6);
    std::printf("    graph Laplacian p=%d: %d its at eta=10, %d at eta=1e6\n", p,
                low.iterations, high.iterations);
    if (!low.converged || !high.converged) ok = false;
    if (high.iterations > low.iterations + 5) ok = false;

    // Contrast at eta = 1e4: Jacobi directly on K_Zp versus the
    // two-level-AMG-on-LOR run.
    double eta = 1e4;
    auto kp = assemble_ip_dg(s, eta, QuadMode::Collocated, true);
    auto kh = assemble_ip_dg_lor(s, eta, true);
    auto split = cf_split(kh.mat, lor, CfMode::Geometric);
    auto amg = two_level_amg_setup(kh.mat, split);
    RandomStream rng(3);
    Eigen::VectorXd b = rng.vector(s.n_dofs);
    auto [x1, amg_rep] = pcg(kh.mat, b, amg, 1e-12, 4000);
    auto [x2, jac_rep] = pcg(kp.mat, b, jacobi_precond(kp.mat), 1e-12, 4000);
    (void)x1;
    (void)x2;
    std::printf("    eta=1e4 p=%d: jacobi-on-K_Zp %d its vs two-level-on-LOR %d its\n", p,
                jac_rep.iterations, amg_rep.iterations);
    if (!jac_rep.converged || !amg_rep.converged) ok = false;
    if (jac_rep.iterations < 3 * amg_rep.iterations) ok = false;
  }
  report(6, ok, "two-level AMG eta-robust (<= +5 its) and >= 3x Jacobi contrast");
}

// Criterion 7: diagonal mass preconditioning robustness.
void criterion_7() {
  auto mesh = build_cart_mesh(3, {2, 2, 2}, {0, 0, 0}, {1, 1, 1});
  bool ok = true;
  for (auto kind : {SpaceKind::H1, SpaceKind::HCurl, SpaceKind::HDiv, SpaceKind::L2}) {
    auto r2 = run_mass_iters_one(mesh, kind, 2, MassVariant::Lor, 17);
    auto r8 = run_mass_iters_one(mesh, kind, 8, MassVariant::Lor, 17);
    std::printf("    %-5s LOR-diagonal mass iterations: p=2 -> %d, p=8 -> %d\n",
                kind_label(kind) == std::string("?") ? "L2" : kind_label(kind),
                r2.iterations, r8.iterations);
    if (!r2.converged || !r8.converged) ok = false;
    if (r8.iterations > 2 * r2.iterations) ok = false;
  }
  auto leg = run_mass_iters_one(mesh, SpaceKind::L2, 4, MassVariant::Legendre, 17);
  std::printf("    L2 Gauss-Legendre variant: %d iteration(s)\n", leg.iterations);
  if (leg.iterations != 1 || !leg.converged) ok = false;
  report(7, ok, "LOR-diagonal mass solves: its(p=8) <= 2 its(p=2); Legendre L2 exact");
}

// Criterion 8: p-robustness of exact-LOR-preconditioned solves.
void criterion_8() {
  auto mesh = build_cart_mesh(3, {2, 2, 2}, {0, 0, 0}, {1, 1, 1});
  bool ok = true;
  for (auto kind : {SpaceKind::H1, SpaceKind::HCurl, SpaceKind::HDiv}) {
    std::vector<int> its;
    for (int p = 2; p <= 8; ++p) {
      SolveSetup cfg;
      cfg.kind = kind;
      cfg.p = p;
      cfg.seed = 23;
      auto rep = run_solve(mesh, cfg);
      if (!rep.converged) ok = false;
      its.push_back(rep.iterations);
    }
    std::vector<int> sorted = its;
    std::sort(sorted.begin(), sorted.end());
    double median = sorted[sorted.size() / 2];
    int worst = sorted.back();
    std::printf("    %-5s iterations over p=2..8:", kind_label(kind));
    for (int v : its) std::printf(" %d", v);
    std::printf("  (max %d vs 1.5x median %.1f)\n", worst, 1.5 * median);
    if (worst > 1.5 * median) ok = false;
  }
  report(8, ok, "exact-LOR-preconditioned CG iterations within 1.5x median over p");
}

// Criterion 9: quadrature and basis unit bounds at scale.
void criterion_9() {
  bool ok = true;
  for (int p = 1; p <= 32 && ok; ++p) {
    auto r = gauss_lobatto_rule(p);
    for (int k = 0; k <= 2 * p - 1; ++k) {
      double s = 0.0;
      for (int i = 0; i <= p; ++i) s += r.weights[i] * std::pow(r.points[i], k);
      double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
      if (std::abs(s - exact) > 1e-13) ok = false;
    }
  }
  for (int p = 1; p <= 16 && ok; ++p) {
    auto rule = gauss_lobatto_rule(p);
    auto b = make_basis(BasisKind::Histopolation, rule);
    auto gl = gauss_legendre_rule(p + 2);
    for (int i = 0; i < p && ok; ++i)
      for (int j = 0; j < p; ++j) {
        double v = 0.0;
        double a = rule.points[i], c = rule.points[i + 1];
        for (std::size_t k = 0; k < gl.points.size(); ++k) {
          double x = 0.5 * (a + c) + 0.5 * (c - a) * gl.points[k];
          v += 0.5 * (c - a) * gl.weights[k] * eval_basis(b, x)[j];
        }
        double expect = (i == j) ? rule.subinterval_lengths[i] : 0.0;
        if (std::abs(v - expect) > 1e-12) ok = false;
      }
  }
  for (auto kind : {EquivKind::Interp, EquivKind::Histop})
    for (auto qm : {QuadMode::Exact, QuadMode::Collocated}) {
      double r32 = equivalence_constants(32, kind, qm).ratio();
      double r64 = equivalence_constants(64, kind, qm).ratio();
      if (r64 > 1.10 * r32) ok = false;
    }
  report(9, ok, "quadrature exactness, histopolation DOF property, bounded 1D constants");
}

}  // namespace

int main() {
  std::printf("lorfem acceptance suite\n");
  auto timed = [](void (*fn)()) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("    (%.1f s)\n", s);
  };
  timed(criteria_1_2_3);
  timed(criterion_4);
  timed(criterion_5);
  timed(criterion_6);
  timed(criterion_7);
  timed(criterion_8);
  timed(criterion_9);
  std::printf("%d criterion failure(s)\n", g_failures);
  return g_failures > 0 ? 1 : 0;
}
