#ifndef COHOM_HARNESS_HPP
#define COHOM_HARNESS_HPP

#include <string>
#include <vector>

#include "json.hpp"

#include "cohom/cellsolver.hpp"

namespace cohom {

/// How the boundary of the domain meets the surrounding datum u_xi.
///  Clamped: exterior facets obey the jump cone like interior ones.
///  Sliding: exterior facets only forbid interpenetration; tangential slip
///           against the datum costs the cohesive energy.
enum class BoundaryMode { Sliding, Clamped };

std::string to_string(BoundaryMode mode);
BoundaryMode boundary_mode(const std::string& name);

/// Minimum energies of the epsilon-scale functional on (0,1)^dim for affine
/// data u_xi, with epsilon = 1/N. The perturbation u - u_xi is block-affine
/// on the N^dim assembly of the cell and vanishes outside the domain, so
/// cracks may also open along the boundary.
struct EpsilonExperiment {
  UnitCellMesh cell;
  ElasticityOperatord A = ElasticityOperatord::identity(1);
  JumpCone cone;
  SymTensord xi;
  std::vector<int> ladder{1, 2, 4, 8};
  BoundaryMode boundary = BoundaryMode::Sliding;
  int refinement = 0;
  SolverParams params;
  int jobs = 1;
};

struct HarnessRow {
  int n = 0;
  double epsilon = 0;
  double energy = 0;  // per unit volume; the domain has volume 1
  double gap = 0;     // energy - f_hom(xi)
  int iterations = 0;
  bool converged = false;
};

struct HarnessResult {
  double f_hom = 0;
  bool f_hom_converged = false;
  std::vector<HarnessRow> rows;
  /// |energy(N_last) - energy(N_prev)|, 0 for a single rung.
  double last_difference = 0;
};

HarnessResult run_sweep(const EpsilonExperiment& exp);

void to_json(nlohmann::json& j, const HarnessRow& r);
void to_json(nlohmann::json& j, const HarnessResult& r);

}  // namespace cohom

#endif  // COHOM_HARNESS_HPP
