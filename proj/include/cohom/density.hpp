#ifndef COHOM_DENSITY_HPP
#define COHOM_DENSITY_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "cohom/cache.hpp"
#include "cohom/cellsolver.hpp"

namespace cohom {

struct Analytic1D {
  double f = 0;
  double f_inf = 0;  // +inf under compression
};

/// Closed-form homogenized density of the 1D chain with unit stiffness and
/// unit cohesive constant, together with its recession function.
Analytic1D analytic_1d(double xi);

enum class Classification { TensileCone, Elsewhere };
enum class RecessionStatus { NotComputed, Finite, Infinite, Unresolved };

std::string to_string(Classification c);
std::string to_string(RecessionStatus s);

struct DensityOptions {
  std::vector<double> ladder{8, 32, 128, 512};
  /// Successive ratios closer than tol_rec * max(1, |ratio|) count as stabilized.
  double tol_rec = 1e-2;
  /// Ratio growth across the ladder above which the recession is +inf.
  double growth_factor = 4;
  /// Kernel threshold: g <= tol_zero * max(1, |xi|^2).
  double tol_zero = 1e-6;
  bool with_recession = true;
  int jobs = 1;
};

double kernel_tolerance(const SymTensord& xi, double tol_zero);

struct RecessionEstimate {
  RecessionStatus status = RecessionStatus::NotComputed;
  double value = 0;
  std::vector<double> ladder;
  std::vector<double> ratios;
  bool solves_converged = true;

  bool finite() const { return status == RecessionStatus::Finite || status == RecessionStatus::Unresolved; }
};

struct DensitySample {
  SymTensord xi;
  double f_value = 0;
  double g_value = 0;
  RecessionEstimate recession;
  Classification classification = Classification::Elsewhere;
  bool converged = true;
};

/// A fixed cell configuration (mesh, A, jump cone, refinement, solver
/// parameters) whose density is queried at many strains. Solves are memoized
/// through an optional content-addressed cache.
class DensityModel {
 public:
  explicit DensityModel(std::shared_ptr<const CellSolver> solver, std::shared_ptr<SolveCache> cache = nullptr);
  DensityModel(const UnitCellMesh& mesh, const ElasticityOperatord& A, const JumpCone& cone, int refinement = 0,
               SolverParams params = {}, std::shared_ptr<SolveCache> cache = nullptr);

  CellSolution solve(const SymTensord& xi, bool include_surface) const;
  double f(const SymTensord& xi) const { return solve(xi, true).value; }
  double g(const SymTensord& xi) const { return solve(xi, false).value; }

  const CellSolver& solver() const { return *solver_; }
  int dim() const { return solver_->mesh().dim; }
  /// Canonical description of the configuration; cache keys extend it by
  /// the strain and the surface flag.
  const nlohmann::json& problem_json() const { return problem_; }

 private:
  std::shared_ptr<const CellSolver> solver_;
  std::shared_ptr<SolveCache> cache_;
  nlohmann::json problem_;
};

/// f(t xi)/t along the ladder, extrapolated in 1/t, or +inf when the ratios
/// grow by more than growth_factor from the first to the last rung.
RecessionEstimate estimate_recession(const DensityModel& model, const SymTensord& xi, const DensityOptions& options = {});

DensitySample sample_density(const DensityModel& model, const SymTensord& xi, const DensityOptions& options = {});
/// Evaluates all strains with options.jobs workers; output order follows input.
std::vector<DensitySample> sweep(const DensityModel& model, const std::vector<SymTensord>& xis,
                                 const DensityOptions& options = {});

/// Unit-norm directions. 1D: {+1, -1}. 2D: eigenframe grid
/// cos(phi) e_t (x) e_t + sin(phi) e_t' (x) e_t' over theta in [0, pi/2) and
/// phi in [0, 2 pi); a nonzero seed shifts both grids by a golden-ratio offset.
std::vector<SymTensord> sample_directions(int dim, int count, std::uint64_t seed = 0);

struct ConeDetection {
  ConeSpec H;
  ConeSpec K;
  std::vector<DensitySample> samples;
  std::vector<bool> in_H;
  std::vector<bool> in_K;
  /// Indices whose kernel and recession memberships disagree.
  std::vector<int> mismatches;
};

ConeDetection detect_cones(const DensityModel& model, const std::vector<SymTensord>& directions,
                           const DensityOptions& options = {});

struct GrowthViolation {
  SymTensord xi;
  std::string reason;
  double margin = 0;
};

struct GrowthAudit {
  bool passed = true;
  double c_lower = 0;  // min(sqrt(alpha), 1)
  double c_upper = 0;  // M^2 / 2
  double worst_lower_margin = 0;
  double worst_upper_margin = 0;
  int perp_samples = 0;
  double perp_max_rel_error = 0;
  bool sublinear_checked = false;
  double sublinear_constant = 0;
  int g_violations = 0;
  std::vector<std::string> notes;
  std::vector<GrowthViolation> violations;
};

struct AuditOptions {
  double tol_bounds = 1e-7;
  double tol_perp = 1e-6;
  double tol_zero = 1e-6;
};

/// Checks the growth sandwich on every sample, f = 1/2 |xi|_A^2 on samples in
/// the polar of k0 (skipped if k0 is null), g <= f, and the linear bound on
/// tensile samples when the polar of k0 has interior.
GrowthAudit audit_growth(const std::vector<DensitySample>& samples, const ElasticityOperatord& A,
                         const ConeSpec* k0 = nullptr, const AuditOptions& options = {});

void to_json(nlohmann::json& j, const RecessionEstimate& r);
void to_json(nlohmann::json& j, const DensitySample& s);
void to_json(nlohmann::json& j, const GrowthAudit& a);
void to_json(nlohmann::json& j, const ElasticityOperatord& A);
void to_json(nlohmann::json& j, const JumpCone& cone);

/// Shared cache from the COHOM_CACHE_DIR environment variable, or a
/// memory-only cache when it is unset.
std::shared_ptr<SolveCache> default_cache();

}  // namespace cohom

#endif  // COHOM_DENSITY_HPP
