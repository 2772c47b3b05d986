// lorfem command-line driver: desk-scale experiments with machine-readable
// CSV/JSON reports.
//
//   lorfem <constants|element-cond|mass-iters|solve|dg-penalty>
//          --config <file.json> [--out <path>] [--seed <u64>]
//          [--quad exact|collocated] [--force]
//
// Config schemas are documented in the repository README.
#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "lorfem/experiments.hpp"
#include "lorfem/mesh_io.hpp"
#include "lorfem/report_io.hpp"

using nlohmann::json;
using namespace lorfem;

namespace {

constexpr const char* kVersion = "lorfem 0.1.0";
constexpr int kDeskDofCap = 200000;

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  throw std::runtime_error("config field '" + field + "': " + what);
}

SpaceKind parse_kind(const std::string& s) {
  if (s == "h1") return SpaceKind::H1;
  if (s == "hcurl") return SpaceKind::HCurl;
  if (s == "hdiv") return SpaceKind::HDiv;
  if (s == "l2") return SpaceKind::L2;
  if (s == "dg") return SpaceKind::DG;
  config_error("kind", "unknown space '" + s + "'");
}

const char* kind_name(SpaceKind k) {
  switch (k) {
    case SpaceKind::H1: return "h1";
    case SpaceKind::HCurl: return "hcurl";
    case SpaceKind::HDiv: return "hdiv";
    case SpaceKind::L2: return "l2";
    case SpaceKind::DG: return "dg";
  }
  return "?";
}

struct Common {
  std::string config_path;
  std::string out_path = "-";
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::string quad;
  bool force = false;

  json config;
  std::string mesh_hash = "-";

  QuadMode quad_mode(QuadMode fallback) const {
    if (quad == "exact") return QuadMode::Exact;
    if (quad == "collocated") return QuadMode::Collocated;
    if (!quad.empty()) config_error("--quad", "expected exact or collocated");
    return fallback;
  }

  std::ostream& open(std::ofstream& file) {
    if (out_path == "-") return std::cout;
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot open output path " + out_path);
    return file;
  }

  void load() {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config " + config_path);
    in >> config;
    if (config.contains("seed") && !seed_given) seed = config.at("seed").get<std::uint64_t>();
    if (config.contains("mesh")) mesh_hash = fnv1a_hex(config.at("mesh").dump());
  }

  void header(std::ostream& os, QuadMode qm, bool with_structure_note = false) const {
    os << "# " << kVersion << "\n";
    os << "# seed=" << seed << " quad="
       << (qm == QuadMode::Exact ? "exact" : "collocated") << " mesh=" << mesh_hash
       << "\n";
    if (with_structure_note) os << "# structure-function: s_k(x) = sin(2*k*pi*x)\n";
  }
};

void enforce_desk_cap(const FeSpace& s, bool force) {
  if (s.dim() == 3 && s.n_dofs > kDeskDofCap && !force)
    throw std::runtime_error("problem exceeds the desk-scale cap of 200k DOFs in 3D; "
                             "pass --force to override");
}

std::vector<int> parse_degrees(const json& j, const char* field) {
  if (!j.contains(field)) config_error(field, "missing");
  std::vector<int> ps;
  for (const auto& v : j.at(field)) {
    int p = v.get<int>();
    if (p < 1) config_error(field, "degrees must be >= 1");
    ps.push_back(p);
  }
  return ps;
}

int cmd_constants(Common& c) {
  int p_max = c.config.value("p_max", 32);
  if (p_max < 1 || p_max > 64) config_error("p_max", "must lie in [1, 64]");
  auto rows = run_constants(p_max);
  std::ofstream file;
  std::ostream& os = c.open(file);
  c.header(os, QuadMode::Exact);
  os << "p,kind,quad,c,C,ratio\n";
  for (const auto& r : rows)
    os << r.p << "," << (r.kind == EquivKind::Interp ? "interp" : "histop") << ","
       << (r.quad == QuadMode::Exact ? "exact" : "collocated") << "," << fmt(r.c) << ","
       << fmt(r.C) << "," << fmt(r.ratio()) << "\n";
  return 0;
}

int cmd_element_cond(Common& c) {
  int dim = c.config.value("dim", 3);
  if (dim != 2 && dim != 3) config_error("dim", "must be 2 or 3");
  auto ps = parse_degrees(c.config, "degrees");
  for (int p : ps)
    if (p > 16) config_error("degrees", "3D condition studies support p <= 16");
  std::vector<SpaceKind> kinds;
  for (const auto& k : c.config.value("kinds", json::array({"h1", "hcurl", "hdiv"}))) {
    auto kind = parse_kind(k.get<std::string>());
    if (kind == SpaceKind::L2 || kind == SpaceKind::DG)
      config_error("kinds", "element-cond covers h1, hcurl, hdiv");
    if (dim == 2 && kind == SpaceKind::HDiv) continue;  // coincides with hcurl
    kinds.push_back(kind);
  }
  QuadMode qm = c.quad_mode(QuadMode::Collocated);
  auto rows = run_element_cond(dim, ps, kinds, qm);
  std::ofstream file;
  std::ostream& os = c.open(file);
  c.header(os, qm);
  os << "kind,p,cond,kappa_estimate\n";
  for (const auto& r : rows)
    os << kind_name(r.kind) << "," << r.p << "," << fmt(r.cond) << ","
       << fmt(r.estimate) << "\n";
  return 0;
}

int cmd_mass_iters(Common& c) {
  CartMesh mesh = mesh_from_json(c.config.at("mesh"));
  auto ps = parse_degrees(c.config, "degrees");
  std::vector<SpaceKind> kinds;
  for (const auto& k : c.config.value("kinds", json::array({"h1", "hcurl", "hdiv", "l2"})))
    kinds.push_back(parse_kind(k.get<std::string>()));
  std::vector<MassVariant> variants;
  for (const auto& v :
       c.config.value("variants", json::array({"lobatto", "legendre", "integrated", "lor"}))) {
    std::string name = v.get<std::string>();
    if (name == "lobatto") variants.push_back(MassVariant::Lobatto);
    else if (name == "legendre") variants.push_back(MassVariant::Legendre);
    else if (name == "integrated") variants.push_back(MassVariant::Integrated);
    else if (name == "lor") variants.push_back(MassVariant::Lor);
    else config_error("variants", "unknown variant '" + name + "'");
  }
  for (auto kind : kinds)
    for (int p : ps) enforce_desk_cap(build_space(kind, p, mesh), c.force);

  auto rows = run_mass_iters(mesh, ps, kinds, variants, c.seed);
  std::ofstream file;
  std::ostream& os = c.open(file);
  c.header(os, QuadMode::Exact);
  os << "kind,p,variant,iterations,converged\n";
  for (const auto& r : rows)
    os << kind_name(r.kind) << "," << r.p << "," << variant_name(r.variant) << ","
       << r.iterations << "," << (r.converged ? 1 : 0) << "\n";
  return 0;
}

int cmd_solve(Common& c) {
  CartMesh mesh = mesh_from_json(c.config.at("mesh"));
  SolveSetup cfg;
  cfg.kind = parse_kind(c.config.value("kind", "h1"));
  if (cfg.kind == SpaceKind::DG || cfg.kind == SpaceKind::L2)
    config_error("kind", "solve covers h1, hcurl, hdiv (use dg-penalty for DG)");
  cfg.p = c.config.value("degree", 2);
  cfg.quad = c.quad_mode(QuadMode::Collocated);
  cfg.seed = c.seed;
  cfg.zero_rhs = c.config.value("zero_rhs", false);
  cfg.rel_tol = c.config.value("rel_tol", 1e-12);
  cfg.max_iter = c.config.value("max_iter", 2000);
  std::string prec = c.config.value("preconditioner", "lor-cholesky");
  if (prec == "lor-cholesky") cfg.precond = SolvePrecond::LorCholesky;
  else if (prec == "jacobi") cfg.precond = SolvePrecond::Jacobi;
  else if (prec == "lor-jacobi") cfg.precond = SolvePrecond::LorJacobi;
  else if (prec == "identity") cfg.precond = SolvePrecond::Identity;
  else config_error("preconditioner", "unknown preconditioner '" + prec + "'");

  if (c.config.contains("coefficients")) {
    auto jc = c.config.at("coefficients");
    int ne = mesh.n_elements();
    auto read = [&](const char* name, std::vector<double>& out) {
      if (!jc.contains(name)) return;
      auto v = jc.at(name);
      if (v.is_number()) out.assign(ne, v.get<double>());
      else {
        if (static_cast<int>(v.size()) != ne)
          config_error(std::string("coefficients.") + name,
                       "length must match the element count");
        for (const auto& x : v) out.push_back(x.get<double>());
      }
    };
    read("alpha", cfg.coefficients.alpha);
    read("beta", cfg.coefficients.beta);
  }
  enforce_desk_cap(build_space(cfg.kind, cfg.p, mesh), c.force);

  auto rep = run_solve(mesh, cfg);
  json out = solve_report_to_json(rep);
  out["tool"] = kVersion;
  out["seed"] = c.seed;
  out["quad"] = cfg.quad == QuadMode::Exact ? "exact" : "collocated";
  out["mesh_hash"] = c.mesh_hash;
  std::ofstream file;
  std::ostream& os = c.open(file);
  os << out.dump(2) << "\n";
  return rep.converged ? 0 : 2;
}

int cmd_dg_penalty(Common& c) {
  CartMesh mesh = mesh_from_json(c.config.at("mesh"));
  auto ps = parse_degrees(c.config, "degrees");
  std::vector<double> etas;
  for (const auto& e : c.config.value("etas", json::array({10.0, 100.0, 10000.0}))) {
    double eta = e.get<double>();
    if (eta <= 0) config_error("etas", "entries must be positive");
    etas.push_back(eta);
  }
  QuadMode qm = c.quad_mode(QuadMode::Collocated);
  int structure_level = c.config.value("structure_level", -1);
  for (int p : ps) enforce_desk_cap(build_space(SpaceKind::DG, p, mesh), c.force);

  std::ofstream file;
  std::ostream& os = c.open(file);
  c.header(os, qm, structure_level >= 0);
  os << "p,eta,precond,iterations,converged,cond\n";
  for (int p : ps) {
    const Eigen::VectorXd* rhs_ptr = nullptr;
    Eigen::VectorXd rhs;
    if (structure_level >= 0) {
      // Manufactured data: the structure-level function sampled at the
      // nodal points of the DG space.
      auto s = build_space(SpaceKind::DG, p, mesh);
      auto rule = gauss_lobatto_rule(p);
      rhs.resize(s.n_dofs);
      std::vector<int> dofs;
      RefElementLayout lay = s.local_layout();
      for (int e = 0; e < mesh.n_elements(); ++e) {
        s.element_dofs(e, dofs);
        for (int f = 0; f < lay.size(); ++f) {
          auto [comp, idx] = lay.unflatten(f);
          double v = 1.0;
          for (int a = 0; a < mesh.dim; ++a) {
            double x = mesh.low(e, a) +
                       0.5 * mesh.width(e, a) * (rule.points[idx[a]] + 1.0);
            v *= structure_solution(structure_level, x);
          }
          rhs[dofs[f]] = v;
        }
      }
      rhs_ptr = &rhs;
    }
    auto rows = run_dg_penalty(mesh, {p}, etas, c.seed, qm, rhs_ptr);
    for (const auto& r : rows)
      os << r.p << "," << fmt(r.eta) << "," << r.precond << "," << r.iterations << ","
         << (r.converged ? 1 : 0) << "," << fmt(r.cond) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kVersion) +
               " - low-order-refined spectral-equivalence experiments"};
  app.require_subcommand(1);

  Common c;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", c.config_path, "JSON config file")->required();
    sub->add_option("--out", c.out_path, "output path (default: stdout)");
    sub->add_option("--seed", c.seed, "RNG seed for right-hand sides")
        ->each([&](const std::string&) { c.seed_given = true; });
    sub->add_option("--quad", c.quad, "quadrature mode: exact|collocated");
    sub->add_flag("--force", c.force, "override the desk-scale DOF cap");
  };

  auto* constants = app.add_subcommand("constants", "1D equivalence-constant curves");
  auto* element_cond =
      app.add_subcommand("element-cond", "single-element condition numbers");
  auto* mass_iters =
      app.add_subcommand("mass-iters", "diagonal mass-preconditioner iterations");
  auto* solve = app.add_subcommand("solve", "LOR-preconditioned solve report");
  auto* dg_penalty = app.add_subcommand("dg-penalty", "DG penalty robustness study");
  for (auto* sub : {constants, element_cond, mass_iters, solve, dg_penalty})
    add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    c.load();
    if (constants->parsed()) return cmd_constants(c);
    if (element_cond->parsed()) return cmd_element_cond(c);
    if (mass_iters->parsed()) return cmd_mass_iters(c);
    if (solve->parsed()) return cmd_solve(c);
    if (dg_penalty->parsed()) return cmd_dg_penalty(c);
  } catch (const std::exception& e) {
    std::cerr << "lorfem: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
