#include "cohom/harness.hpp"

#include <cmath>

#include "cohom/parallel.hpp"

namespace cohom {

std::string to_string(BoundaryMode mode) { return mode == BoundaryMode::Sliding ? "sliding" : "clamped"; }

BoundaryMode boundary_mode(const std::string& name) {
  if (name == "sliding") return BoundaryMode::Sliding;
  if (name == "clamped") return BoundaryMode::Clamped;
  throw InputError("unknown boundary mode '" + name + "' (expected sliding or clamped)");
}

HarnessResult run_sweep(const EpsilonExperiment& exp) {
  if (exp.ladder.empty()) throw InputError("harness needs a nonempty N ladder");
  for (size_t i = 0; i < exp.ladder.size(); ++i)
    if (exp.ladder[i] < 1 || (i > 0 && exp.ladder[i] <= exp.ladder[i - 1]))
      throw InputError("harness N ladder must be positive and increasing");

  HarnessResult out;
  const CellSolution cell =
      CellSolver(exp.cell, exp.A, exp.cone, exp.refinement, exp.params).solve(exp.xi, true);
  out.f_hom = cell.value;
  out.f_hom_converged = cell.converged;

  out.rows.resize(exp.ladder.size());
  parallel_for(exp.ladder.size(), exp.jobs, [&](std::size_t i) {
    const int n = exp.ladder[i];
    const UnitCellMesh mesh = build_assembly(exp.cell, n);
    std::optional<JumpCone> exterior;
    if (exp.boundary == BoundaryMode::Sliding) exterior = JumpCone(JumpCone::Kind::NonInterpenetration, mesh.dim);
    const CellSolution sol =
        CellSolver(mesh, exp.A, exp.cone, exp.refinement, exp.params, exterior).solve(exp.xi, true);
    HarnessRow& row = out.rows[i];
    row.n = n;
    row.epsilon = 1.0 / n;
    row.energy = sol.value / mesh.block_measure();
    row.gap = row.energy - out.f_hom;
    row.iterations = sol.iterations;
    row.converged = sol.converged;
  });
  if (out.rows.size() >= 2) out.last_difference = std::abs(out.rows.back().energy - out.rows[out.rows.size() - 2].energy);
  return out;
}

void to_json(nlohmann::json& j, const HarnessRow& r) {
  j = {{"N", r.n},           {"epsilon", r.epsilon},       {"energy", r.energy},
       {"gap", r.gap},       {"iterations", r.iterations}, {"converged", r.converged}};
}

void to_json(nlohmann::json& j, const HarnessResult& r) {
  j = {{"format_version", 1},
       {"f_hom", r.f_hom},
       {"f_hom_converged", r.f_hom_converged},
       {"rows", r.rows},
       {"last_difference", r.last_difference}};
}

}  // namespace cohom
