// JSON serialization of solve reports.
#pragma once

#include <json.hpp>

#include "lorfem/solvers.hpp"

namespace lorfem {

inline nlohmann::json solve_report_to_json(const SolveReport& rep) {
  nlohmann::json j;
  j["iterations"] = rep.iterations;
  j["converged"] = rep.converged;
  j["rel_residuals"] = rep.rel_residuals;
  j["wall_ms"] = rep.wall_ms;
  if (rep.has_eigs) {
    j["lambda_min"] = rep.lambda_min;
    j["lambda_max"] = rep.lambda_max;
  }
  return j;
}

}  // namespace lorfem
