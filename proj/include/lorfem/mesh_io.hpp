// JSON mesh description:
//   { "dim": 3, "counts": [2,2,2], "box": [[0,1],[0,1],[0,1]],
//     "grading": [1,1,1] }
// box defaults to the unit box, grading to uniform.
#pragma once

#include <json.hpp>
#include <stdexcept>
#include <string>

#include "lorfem/mesh.hpp"

namespace lorfem {

[[noreturn]] inline void mesh_config_error(const std::string& field,
                                           const std::string& what) {
  throw std::invalid_argument("mesh config field '" + field + "': " + what);
}

inline CartMesh mesh_from_json(const nlohmann::json& j) {
  if (!j.is_object()) mesh_config_error("mesh", "expected an object");
  if (!j.contains("dim")) mesh_config_error("dim", "missing");
  int dim = j.at("dim").get<int>();
  if (dim < 1 || dim > 3) mesh_config_error("dim", "must be 1, 2, or 3");
  std::array<int, 3> counts = {1, 1, 1};
  auto jc = j.value("counts", nlohmann::json::array({1, 1, 1}));
  for (int a = 0; a < dim; ++a) {
    if (a >= static_cast<int>(jc.size())) mesh_config_error("counts", "too short");
    counts[a] = jc[a].get<int>();
    if (counts[a] < 1) mesh_config_error("counts", "entries must be >= 1");
  }
  std::array<double, 3> lo = {0, 0, 0}, hi = {1, 1, 1};
  if (j.contains("box")) {
    auto jb = j.at("box");
    for (int a = 0; a < dim; ++a) {
      if (a >= static_cast<int>(jb.size())) mesh_config_error("box", "too short");
      lo[a] = jb.at(a).at(0).get<double>();
      hi[a] = jb.at(a).at(1).get<double>();
      if (!(hi[a] > lo[a])) mesh_config_error("box", "empty extent");
    }
  }
  std::array<double, 3> grading = {1, 1, 1};
  if (j.contains("grading")) {
    auto jg = j.at("grading");
    for (int a = 0; a < dim; ++a) {
      if (a >= static_cast<int>(jg.size())) mesh_config_error("grading", "too short");
      grading[a] = jg[a].get<double>();
      if (grading[a] <= 0) mesh_config_error("grading", "entries must be positive");
    }
  }
  return build_cart_mesh(dim, counts, lo, hi, grading);
}

}  // namespace lorfem
