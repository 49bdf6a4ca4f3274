#include "cohom/density.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>

#include "cohom/parallel.hpp"

namespace cohom {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> to_std(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

Analytic1D analytic_1d(double xi) {
  Analytic1D out;
  out.f = xi <= 1 ? 0.5 * xi * xi : xi - 0.5;
  out.f_inf = xi >= 0 ? xi : kInf;
  return out;
}

std::string to_string(Classification c) { return c == Classification::TensileCone ? "tensile" : "elsewhere"; }

std::string to_string(RecessionStatus s) {
  switch (s) {
    case RecessionStatus::NotComputed: return "not_computed";
    case RecessionStatus::Finite: return "finite";
    case RecessionStatus::Infinite: return "infinite";
    case RecessionStatus::Unresolved: return "unresolved";
  }
  return "unknown";
}

double kernel_tolerance(const SymTensord& xi, double tol_zero) {
  return tol_zero * std::max(1.0, xi.squared_norm());
}

void to_json(nlohmann::json& j, const ElasticityOperatord& A) {
  j = nlohmann::json::array();
  for (int r = 0; r < A.matrix().rows(); ++r) j.push_back(to_std(A.matrix().row(r).transpose()));
}

void to_json(nlohmann::json& j, const JumpCone& cone) {
  j = {{"kind", to_string(cone.kind())}, {"dim", cone.dim()}};
  if (cone.kind() == JumpCone::Kind::Generic) j["generators"] = cone.matrix_cone();
}

DensityModel::DensityModel(std::shared_ptr<const CellSolver> solver, std::shared_ptr<SolveCache> cache)
    : solver_(std::move(solver)), cache_(std::move(cache)) {
  if (!solver_) throw InputError("density model needs a cell solver");
  nlohmann::json mesh = solver_->mesh();
  mesh.erase("boundary_images");
  problem_ = {{"format_version", 1},
              {"mesh", mesh},
              {"A", solver_->elasticity()},
              {"cone", solver_->cone()},
              {"refinement", solver_->refinement()},
              {"params", solver_->params()}};
}

DensityModel::DensityModel(const UnitCellMesh& mesh, const ElasticityOperatord& A, const JumpCone& cone,
                           int refinement, SolverParams params, std::shared_ptr<SolveCache> cache)
    : DensityModel(std::make_shared<const CellSolver>(mesh, A, cone, refinement, params), std::move(cache)) {}

CellSolution DensityModel::solve(const SymTensord& xi, bool include_surface) const {
  if (!cache_) return solver_->solve(xi, include_surface);
  nlohmann::json request = problem_;
  request["xi"] = to_std(xi.components());
  request["include_surface"] = include_surface;
  const std::string key = SolveCache::key(request);
  if (auto hit = cache_->get(key)) return hit->get<CellSolution>();
  CellSolution sol = solver_->solve(xi, include_surface);
  cache_->put(key, sol);
  return sol;
}

RecessionEstimate estimate_recession(const DensityModel& model, const SymTensord& xi, const DensityOptions& options) {
  if (xi.norm() == 0) throw InputError("recession needs a nonzero direction");
  const auto& ladder = options.ladder;
  if (ladder.size() < 2) throw InputError("recession ladder needs at least two rungs");
  for (size_t i = 0; i < ladder.size(); ++i)
    if (!(ladder[i] > 0) || (i > 0 && ladder[i] <= ladder[i - 1]))
      throw InputError("recession ladder must be positive and increasing");

  RecessionEstimate out;
  out.ladder = ladder;
  for (double t : ladder) {
    const CellSolution sol = model.solve(xi * t, true);
    out.solves_converged = out.solves_converged && sol.converged;
    out.ratios.push_back(sol.value / t);
  }
  const double first = out.ratios.front();
  const double last = out.ratios.back();
  if (last > options.growth_factor * std::max(first, std::numeric_limits<double>::min())) {
    out.status = RecessionStatus::Infinite;
    out.value = kInf;
    return out;
  }
  // Ratios behave like L + c/t once the bulk stress saturates.
  const size_t n = ladder.size();
  const double t1 = ladder[n - 2], t2 = ladder[n - 1];
  const double r1 = out.ratios[n - 2], r2 = out.ratios[n - 1];
  out.value = (t2 * r2 - t1 * r1) / (t2 - t1);
  const bool stable = std::abs(r2 - r1) < options.tol_rec * std::max(1.0, std::abs(r2));
  out.status = stable ? RecessionStatus::Finite : RecessionStatus::Unresolved;
  return out;
}

DensitySample sample_density(const DensityModel& model, const SymTensord& xi, const DensityOptions& options) {
  DensitySample s;
  s.xi = xi;
  const CellSolution f = model.solve(xi, true);
  const CellSolution g = model.solve(xi, false);
  s.f_value = f.value;
  s.g_value = g.value;
  s.converged = f.converged && g.converged;
  s.classification =
      g.value <= kernel_tolerance(xi, options.tol_zero) ? Classification::TensileCone : Classification::Elsewhere;
  if (options.with_recession && xi.norm() > 0) {
    s.recession = estimate_recession(model, xi, options);
    s.converged = s.converged && s.recession.solves_converged;
  }
  return s;
}

std::vector<DensitySample> sweep(const DensityModel& model, const std::vector<SymTensord>& xis,
                                 const DensityOptions& options) {
  std::vector<DensitySample> out(xis.size());
  parallel_for(xis.size(), options.jobs, [&](std::size_t i) { out[i] = sample_density(model, xis[i], options); });
  return out;
}

std::vector<SymTensord> sample_directions(int dim, int count, std::uint64_t seed) {
  check_dim(dim);
  if (dim == 1) return {SymTensord::make(1.0), SymTensord::make(-1.0)};
  if (count < 1) throw InputError("direction count must be positive");
  const int n_theta = std::max(1, static_cast<int>(std::lround(std::sqrt(double(count)))));
  const int n_phi = (count + n_theta - 1) / n_theta;
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  const double shift = seed == 0 ? 0.0 : std::fmod(double(seed % 1000003) * golden, 1.0);
  const double pi = std::numbers::pi;
  std::vector<SymTensord> out;
  for (int i = 0; i < n_theta && int(out.size()) < count; ++i) {
    const double theta = 0.5 * pi * (i + shift) / n_theta;
    Vec e(2), p(2);
    e << std::cos(theta), std::sin(theta);
    p << -std::sin(theta), std::cos(theta);
    for (int k = 0; k < n_phi && int(out.size()) < count; ++k) {
      const double phi = 2 * pi * (k + shift) / n_phi;
      out.push_back(sym_dyad(e, e) * std::cos(phi) + sym_dyad(p, p) * std::sin(phi));
    }
  }
  return out;
}

ConeDetection detect_cones(const DensityModel& model, const std::vector<SymTensord>& directions,
                           const DensityOptions& options) {
  ConeDetection out;
  DensityOptions opts = options;
  opts.with_recession = true;
  out.samples = sweep(model, directions, opts);
  std::vector<SymTensord> h, k;
  for (size_t i = 0; i < out.samples.size(); ++i) {
    const auto& s = out.samples[i];
    const bool in_h = s.classification == Classification::TensileCone;
    const bool in_k = s.recession.finite();
    out.in_H.push_back(in_h);
    out.in_K.push_back(in_k);
    if (in_h) h.push_back(s.xi);
    if (in_k) k.push_back(s.xi);
    if (in_h != in_k) out.mismatches.push_back(static_cast<int>(i));
  }
  const int dim = model.dim();
  out.H = ConeSpec(dim, h, "H_hom");
  out.K = ConeSpec(dim, k, "K_hom");
  return out;
}

GrowthAudit audit_growth(const std::vector<DensitySample>& samples, const ElasticityOperatord& A, const ConeSpec* k0,
                         const AuditOptions& options) {
  if (samples.empty()) throw InputError("growth audit needs at least one sample");
  GrowthAudit audit;
  audit.c_lower = std::min(std::sqrt(A.alpha()), 1.0);
  audit.c_upper = 0.5 * A.M() * A.M();
  audit.worst_lower_margin = kInf;
  audit.worst_upper_margin = kInf;
  auto fail = [&](const SymTensord& xi, std::string reason, double margin) {
    audit.passed = false;
    audit.violations.push_back({xi, std::move(reason), margin});
  };

  int skipped_perp = 0;
  for (const auto& s : samples) {
    const double n = s.xi.norm();
    const double lower = s.f_value - (audit.c_lower * n - 0.5);
    const double upper = audit.c_upper * n * n - s.f_value;
    audit.worst_lower_margin = std::min(audit.worst_lower_margin, lower);
    audit.worst_upper_margin = std::min(audit.worst_upper_margin, upper);
    if (lower < -options.tol_bounds) fail(s.xi, "below min(sqrt(alpha),1)|xi| - 1/2", lower);
    if (upper < -options.tol_bounds * std::max(1.0, s.f_value)) fail(s.xi, "above M^2 |xi|^2 / 2", upper);
    if (s.g_value > s.f_value + options.tol_bounds * std::max(1.0, s.f_value)) {
      ++audit.g_violations;
      fail(s.xi, "g exceeds f", s.f_value - s.g_value);
    }
    if (k0 && n > 0 && in_polar(*k0, s.xi, 1e-12)) {
      if (!in_polar(*k0, A.apply(s.xi), 1e-12)) {
        ++skipped_perp;
        continue;
      }
      const double expect = 0.5 * A.inner(s.xi, s.xi);
      const double rel = std::abs(s.f_value - expect) / std::max(1e-300, expect);
      ++audit.perp_samples;
      audit.perp_max_rel_error = std::max(audit.perp_max_rel_error, rel);
      if (rel > options.tol_perp) fail(s.xi, "f differs from |xi|_A^2 / 2 on the polar of K0", -rel);
    }
  }
  if (skipped_perp > 0)
    audit.notes.push_back(std::to_string(skipped_perp) +
                          " polar samples skipped because A xi leaves the polar of K0");

  if (k0) {
    if (polar_has_interior(*k0)) {
      audit.sublinear_checked = true;
      for (const auto& s : samples) {
        if (s.classification != Classification::TensileCone || s.xi.norm() == 0) continue;
        if (s.recession.status == RecessionStatus::NotComputed) {
          audit.sublinear_constant = std::max(audit.sublinear_constant, s.f_value / s.xi.norm());
          continue;
        }
        if (!s.recession.finite()) {
          fail(s.xi, "tensile sample with superlinear growth", 0);
          continue;
        }
        audit.sublinear_constant = std::max(audit.sublinear_constant, s.recession.value / s.xi.norm());
        const double margin = s.recession.value - s.f_value;
        if (margin < -1e-6 * std::max(1.0, s.f_value)) fail(s.xi, "f exceeds its recession value", margin);
      }
    } else {
      audit.notes.push_back("sublinearity check skipped: polar of K0 has empty interior");
    }
  }
  return audit;
}

void to_json(nlohmann::json& j, const RecessionEstimate& r) {
  j = {{"status", to_string(r.status)}, {"ladder", r.ladder}, {"ratios", r.ratios},
       {"solves_converged", r.solves_converged}};
  if (std::isfinite(r.value))
    j["value"] = r.value;
  else
    j["value"] = "inf";
}

void to_json(nlohmann::json& j, const DensitySample& s) {
  j = {{"xi", tensor_entries(s.xi)},
       {"f", s.f_value},
       {"g", s.g_value},
       {"recession", s.recession},
       {"class", to_string(s.classification)},
       {"converged", s.converged}};
}

void to_json(nlohmann::json& j, const GrowthAudit& a) {
  j = {{"format_version", 1},
       {"passed", a.passed},
       {"c_lower", a.c_lower},
       {"c_upper", a.c_upper},
       {"worst_lower_margin", a.worst_lower_margin},
       {"worst_upper_margin", a.worst_upper_margin},
       {"perp_samples", a.perp_samples},
       {"perp_max_rel_error", a.perp_max_rel_error},
       {"sublinear_checked", a.sublinear_checked},
       {"sublinear_constant", a.sublinear_constant},
       {"g_violations", a.g_violations},
       {"notes", a.notes}};
  j["violations"] = nlohmann::json::array();
  for (const auto& v : a.violations)
    j["violations"].push_back({{"xi", tensor_entries(v.xi)}, {"reason", v.reason}, {"margin", v.margin}});
}

std::shared_ptr<SolveCache> default_cache() {
  const char* dir = std::getenv("COHOM_CACHE_DIR");
  return std::make_shared<SolveCache>(dir && *dir ? std::filesystem::path(dir) : std::filesystem::path());
}

}  // namespace cohom
