#ifndef COHOM_CELLSOLVER_HPP
#define COHOM_CELLSOLVER_HPP

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include <Eigen/Sparse>

#include "cohom/cones.hpp"
#include "cohom/microgeometry.hpp"

namespace cohom {

using SpMat = Eigen::SparseMatrix<double>;

struct SolverParams {
  double rho = 0;  // <= 0 selects the automatic initial penalty
  double tol_primal = 1e-9;
  double tol_dual = 1e-9;
  double tol_relative = 1e-12;
  int max_iter = 50000;
  int adapt_every = 50;
};

/// Periodic-perturbation cell problem for f_hom (include_surface) or g_hom.
struct CellProblem {
  UnitCellMesh mesh;
  ElasticityOperatord A;
  JumpCone cone;
  SymTensord xi;
  bool include_surface = true;
  /// 0: one affine field per block. r >= 1: continuous P1 field on a
  /// 2^r x 2^r triangulation of every block, independent across facets.
  int refinement = 0;
  SolverParams params;
};

/// Discrete trial space on a block mesh: element strains and facet traces
/// are linear maps of the degrees of freedom.
class Discretization {
 public:
  struct Element {
    int block = 0;
    double area = 0;
    std::vector<int> dofs;
    Mat strain;  // components x dofs
  };
  struct QuadPoint {
    int facet = 0;
    Vec point;  // in left-block coordinates
    double weight = 0;
    Vec normal;
    std::vector<int> dofs;
    Mat jump;  // dim x dofs
  };

  Discretization(const UnitCellMesh& mesh, int refinement);

  int dim() const { return dim_; }
  int refinement() const { return refinement_; }
  int num_dofs() const { return num_dofs_; }
  int block_offset(int b) const { return offsets_[b]; }
  int block_dofs(int b) const { return offsets_[b + 1] - offsets_[b]; }
  const std::vector<Element>& elements() const { return elements_; }
  const std::vector<QuadPoint>& quadrature() const { return quad_; }
  /// Translation DOFs fixed to zero (periodic meshes only).
  const std::vector<int>& pinned() const { return pinned_; }

  /// Displacement of block b at point p (own coordinates) as coefficient rows.
  void trace(int block, const Vec& p, std::vector<int>& dofs, Mat& coeff) const;

 private:
  void build_elements(const UnitCellMesh& mesh);
  void build_quadrature(const UnitCellMesh& mesh);

  int dim_;
  int refinement_;
  int per_axis_;
  int num_dofs_ = 0;
  std::vector<int> offsets_;
  std::vector<Block> blocks_;
  std::vector<Element> elements_;
  std::vector<QuadPoint> quad_;
  std::vector<int> pinned_;
};

/// Quadratic form and jump operator in the free (unpinned) DOFs.
///
/// Bulk energy: 1/2 x^T Q x + x^T R c(xi) + 1/2 |Y| <A xi, xi>, where c(xi)
/// are the components of xi. The weighted jump operator maps x to
/// sqrt(w_q) * jump_q at every quadrature point.
struct AssembledCell {
  int dim = 1;
  int ncomp = 1;
  int num_free = 0;
  double volume = 0;
  std::vector<int> free_index;  // full dof -> free index, -1 if pinned
  SpMat Q;
  Mat R;
  SpMat J;
  std::vector<double> weights;
  std::vector<double> sqrt_weights;
  std::vector<Vec> normals;
  std::vector<int> facet_of_point;
  std::vector<Vec> points;
};

AssembledCell assemble(const Discretization& disc, const ElasticityOperatord& A);
/// Builds the discretization for the problem's mesh and assembles it.
AssembledCell assemble(const CellProblem& problem);

struct QuadJump {
  int facet = 0;
  Vec point;
  double weight = 0;
  Vec jump;
};

struct CellSolution {
  double value = 0;
  double bulk_part = 0;
  double surface_part = 0;
  double certified_lower_bound = 0;
  /// Surface energy of the final field integrated with facets split where
  /// the jump vanishes (diagnostic; equals surface_part at refinement 0 for
  /// facet-constant jumps).
  double surface_resolved = 0;
  std::vector<Vec> block_dofs;
  std::vector<QuadJump> jumps;
  double primal_residual = 0;
  double dual_residual = 0;
  double rho = 0;
  int iterations = 0;
  bool converged = false;
};

/// Prefactorized cell problem for a fixed (mesh, A, cone, refinement); solves
/// for any macroscopic strain. Safe to share across threads.
class CellSolver {
 public:
  /// `exterior` constrains jumps on exterior facets of an assembly; by
  /// default they obey `cone` like every other facet.
  CellSolver(const UnitCellMesh& mesh, const ElasticityOperatord& A, const JumpCone& cone,
             int refinement = 0, SolverParams params = {}, std::optional<JumpCone> exterior = std::nullopt);

  CellSolution solve(const SymTensord& xi, bool include_surface = true) const;

  const UnitCellMesh& mesh() const { return mesh_; }
  const ElasticityOperatord& elasticity() const { return A_; }
  const JumpCone& cone() const { return cone_; }
  const std::optional<JumpCone>& exterior_cone() const { return exterior_; }
  const Discretization& discretization() const { return disc_; }
  const AssembledCell& system() const { return sys_; }
  const SolverParams& params() const { return params_; }
  int refinement() const { return disc_.refinement(); }

  /// Objective of the discrete problem at free DOFs x (+inf if a jump is
  /// inadmissible beyond tol).
  double objective(const Vec& x, const SymTensord& xi, bool include_surface, double tol = 1e-9) const;
  double bulk_energy(const Vec& x, const SymTensord& xi) const;

 private:
  class Factor;
  std::shared_ptr<const Factor> factor(double rho) const;

  UnitCellMesh mesh_;
  ElasticityOperatord A_;
  JumpCone cone_;
  std::optional<JumpCone> exterior_;
  Discretization disc_;
  AssembledCell sys_;
  SolverParams params_;
  std::vector<JumpCone::Section> sections_;
  double rho0_ = 1;

  mutable std::mutex mutex_;
  mutable std::map<double, std::shared_ptr<const Factor>> factors_;
};

CellSolution solve_density(const CellProblem& problem);
/// g_hom: the surface term is dropped regardless of problem.include_surface.
CellSolution solve_dry(const CellProblem& problem);

void to_json(nlohmann::json& j, const CellSolution& s);
void to_json(nlohmann::json& j, const SolverParams& p);
void from_json(const nlohmann::json& j, SolverParams& p);
void from_json(const nlohmann::json& j, CellSolution& s);

}  // namespace cohom

#endif  // COHOM_CELLSOLVER_HPP
