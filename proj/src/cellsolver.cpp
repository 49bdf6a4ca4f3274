#include "cohom/cellsolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>

namespace cohom {

// ---------------------------------------------------------------------------
// Discretization

Discretization::Discretization(const UnitCellMesh& mesh, int refinement)
    : dim_(mesh.dim), refinement_(refinement), blocks_(mesh.blocks) {
  check_dim(dim_);
  if (refinement < 0 || refinement > 6) throw InputError("refinement level must lie in [0, 6]");
  if (mesh.blocks.empty()) throw InputError("mesh has no blocks");
  per_axis_ = 1 << refinement;
  offsets_.push_back(0);
  for (size_t b = 0; b < blocks_.size(); ++b) {
    const int n = refinement == 0 ? dim_ + dim_ * dim_
                                  : dim_ * (dim_ == 1 ? per_axis_ + 1 : (per_axis_ + 1) * (per_axis_ + 1));
    offsets_.push_back(offsets_.back() + n);
  }
  num_dofs_ = offsets_.back();
  if (mesh.periodic)
    for (int i = 0; i < dim_; ++i) pinned_.push_back(i);
  build_elements(mesh);
  build_quadrature(mesh);
}

void Discretization::trace(int block, const Vec& p, std::vector<int>& dofs, Mat& coeff) const {
  const Block& b = blocks_[block];
  const int off = offsets_[block];
  dofs.clear();
  if (refinement_ == 0) {
    const int n = dim_ + dim_ * dim_;
    coeff = Mat::Zero(dim_, n);
    for (int k = 0; k < n; ++k) dofs.push_back(off + k);
    const Vec d = p - b.centroid;
    for (int i = 0; i < dim_; ++i) {
      coeff(i, i) = 1;
      for (int k = 0; k < dim_; ++k) coeff(i, dim_ + i * dim_ + k) = d(k);
    }
    return;
  }
  const int m = per_axis_;
  const Vec local = ((p - b.lo).array() / (b.hi - b.lo).array() * m).matrix();
  if (dim_ == 1) {
    const int cell = std::clamp(static_cast<int>(std::floor(local(0))), 0, m - 1);
    const double s = local(0) - cell;
    coeff = Mat::Zero(1, 2);
    dofs = {off + cell, off + cell + 1};
    coeff(0, 0) = 1 - s;
    coeff(0, 1) = s;
    return;
  }
  const int ci = std::clamp(static_cast<int>(std::floor(local(0))), 0, m - 1);
  const int cj = std::clamp(static_cast<int>(std::floor(local(1))), 0, m - 1);
  const double s = local(0) - ci, t = local(1) - cj;
  auto node = [&](int i, int j) { return i + (m + 1) * j; };
  int nodes[3];
  double phi[3];
  if (s >= t) {
    nodes[0] = node(ci, cj), nodes[1] = node(ci + 1, cj), nodes[2] = node(ci + 1, cj + 1);
    phi[0] = 1 - s, phi[1] = s - t, phi[2] = t;
  } else {
    nodes[0] = node(ci, cj), nodes[1] = node(ci + 1, cj + 1), nodes[2] = node(ci, cj + 1);
    phi[0] = 1 - t, phi[1] = s, phi[2] = t - s;
  }
  coeff = Mat::Zero(2, 6);
  for (int v = 0; v < 3; ++v)
    for (int i = 0; i < 2; ++i) {
      dofs.push_back(off + 2 * nodes[v] + i);
      coeff(i, 2 * v + i) = phi[v];
    }
}

void Discretization::build_elements(const UnitCellMesh& mesh) {
  const int nc = sym_components(dim_);
  for (int bi = 0; bi < static_cast<int>(mesh.blocks.size()); ++bi) {
    const Block& b = mesh.blocks[bi];
    const int off = offsets_[bi];
    if (refinement_ == 0) {
      Element e;
      e.block = bi;
      e.area = b.measure;
      const int n = dim_ + dim_ * dim_;
      for (int k = 0; k < n; ++k) e.dofs.push_back(off + k);
      e.strain = Mat::Zero(nc, n);
      if (dim_ == 1) {
        e.strain(0, 1) = 1;
      } else {
        e.strain(0, 2) = 1;
        e.strain(1, 5) = 1;
        e.strain(2, 3) = e.strain(2, 4) = M_SQRT1_2;
      }
      elements_.push_back(std::move(e));
      continue;
    }
    const int m = per_axis_;
    const Vec h = (b.hi - b.lo) / m;
    if (dim_ == 1) {
      for (int c = 0; c < m; ++c) {
        Element e;
        e.block = bi;
        e.area = h(0);
        e.dofs = {off + c, off + c + 1};
        e.strain = Mat(1, 2);
        e.strain << -1 / h(0), 1 / h(0);
        elements_.push_back(std::move(e));
      }
      continue;
    }
    auto node = [&](int i, int j) { return i + (m + 1) * j; };
    auto coord = [&](int i, int j) { return Eigen::Vector2d(b.lo(0) + i * h(0), b.lo(1) + j * h(1)); };
    for (int cj = 0; cj < m; ++cj)
      for (int ci = 0; ci < m; ++ci) {
        const int tri[2][3][2] = {{{0, 0}, {1, 0}, {1, 1}}, {{0, 0}, {1, 1}, {0, 1}}};
        for (const auto& t : tri) {
          Eigen::Vector2d p[3];
          int ids[3];
          for (int v = 0; v < 3; ++v) {
            p[v] = coord(ci + t[v][0], cj + t[v][1]);
            ids[v] = node(ci + t[v][0], cj + t[v][1]);
          }
          Eigen::Matrix2d edge;
          edge.col(0) = p[1] - p[0];
          edge.col(1) = p[2] - p[0];
          const Eigen::Matrix2d inv = edge.inverse();  // rows: gradients of phi1, phi2
          Eigen::Matrix<double, 3, 2> grad;
          grad.row(1) = inv.row(0);
          grad.row(2) = inv.row(1);
          grad.row(0) = -grad.row(1) - grad.row(2);
          Element e;
          e.block = bi;
          e.area = 0.5 * std::abs(edge.determinant());
          e.strain = Mat::Zero(3, 6);
          for (int v = 0; v < 3; ++v) {
            e.dofs.push_back(off + 2 * ids[v]);
            e.dofs.push_back(off + 2 * ids[v] + 1);
            e.strain(0, 2 * v) = grad(v, 0);
            e.strain(1, 2 * v + 1) = grad(v, 1);
            e.strain(2, 2 * v) = M_SQRT1_2 * grad(v, 1);
            e.strain(2, 2 * v + 1) = M_SQRT1_2 * grad(v, 0);
          }
          elements_.push_back(std::move(e));
        }
      }
  }
}

void Discretization::build_quadrature(const UnitCellMesh& mesh) {
  std::vector<int> dl, dr;
  Mat cl, cr;
  for (int fi = 0; fi < static_cast<int>(mesh.facets.size()); ++fi) {
    const Facet& f = mesh.facets[fi];
    std::vector<std::pair<Vec, double>> pts;
    if (dim_ == 1) {
      pts.emplace_back(f.midpoint, f.measure);
    } else {
      // Trapezoid rule on every piece where both traces are affine: the jump
      // is affine there, so the cone constraint at the two ends holds on the
      // whole piece and the integral of jump (.) nu is exact.
      const int other = 1 - f.axis;
      const double s0 = f.a(other), s1 = f.b(other);
      std::vector<double> breaks = {s0, s1};
      auto add_lines = [&](int block, double shift) {
        if (block == Facet::kExterior || refinement_ == 0) return;
        const Block& b = mesh.blocks[block];
        const double h = (b.hi(other) - b.lo(other)) / per_axis_;
        for (int i = 0; i <= per_axis_; ++i) {
          const double s = b.lo(other) + shift + i * h;
          if (s > s0 + 1e-13 && s < s1 - 1e-13) breaks.push_back(s);
        }
      };
      add_lines(f.left, 0.0);
      add_lines(f.right, f.shift(other));
      std::sort(breaks.begin(), breaks.end());
      breaks.erase(std::unique(breaks.begin(), breaks.end(),
                               [](double x, double y) { return std::abs(x - y) <= 1e-13; }),
                   breaks.end());
      for (size_t k = 0; k < breaks.size(); ++k) {
        double w = 0;
        if (k > 0) w += 0.5 * (breaks[k] - breaks[k - 1]);
        if (k + 1 < breaks.size()) w += 0.5 * (breaks[k + 1] - breaks[k]);
        Vec p = f.a;
        p(other) = breaks[k];
        pts.emplace_back(p, w);
      }
    }
    for (const auto& [p, w] : pts) {
      QuadPoint q;
      q.facet = fi;
      q.point = p;
      q.weight = w;
      q.normal = f.normal;
      std::vector<std::pair<int, Vec>> cols;
      if (f.right != Facet::kExterior) {
        trace(f.right, p - f.shift.cast<double>(), dr, cr);
        for (size_t k = 0; k < dr.size(); ++k) cols.emplace_back(dr[k], cr.col(k));
      }
      if (f.left != Facet::kExterior) {
        trace(f.left, p, dl, cl);
        for (size_t k = 0; k < dl.size(); ++k) cols.emplace_back(dl[k], -cl.col(k));
      }
      q.jump = Mat::Zero(dim_, cols.size());
      for (size_t k = 0; k < cols.size(); ++k) {
        q.dofs.push_back(cols[k].first);
        q.jump.col(k) = cols[k].second;
      }
      quad_.push_back(std::move(q));
    }
  }
}

// ---------------------------------------------------------------------------
// Assembly

AssembledCell assemble(const Discretization& disc, const ElasticityOperatord& A) {
  if (A.dim() != disc.dim()) throw InputError("elasticity operator dimension does not match mesh");
  AssembledCell s;
  s.dim = disc.dim();
  s.ncomp = sym_components(s.dim);
  s.free_index.assign(disc.num_dofs(), 0);
  for (int p : disc.pinned()) s.free_index[p] = -1;
  int next = 0;
  for (auto& fi : s.free_index)
    if (fi >= 0) fi = next++;
  s.num_free = next;

  const Mat a = A.matrix();
  std::vector<Eigen::Triplet<double>> tq;
  s.R = Mat::Zero(s.num_free, s.ncomp);
  for (const auto& e : disc.elements()) {
    s.volume += e.area;
    const Mat local = e.area * e.strain.transpose() * a * e.strain;
    const Mat rloc = e.area * e.strain.transpose() * a;
    for (size_t i = 0; i < e.dofs.size(); ++i) {
      const int gi = s.free_index[e.dofs[i]];
      if (gi < 0) continue;
      s.R.row(gi) += rloc.row(i);
      for (size_t k = 0; k < e.dofs.size(); ++k) {
        const int gk = s.free_index[e.dofs[k]];
        if (gk >= 0 && local(i, k) != 0) tq.emplace_back(gi, gk, local(i, k));
      }
    }
  }
  s.Q.resize(s.num_free, s.num_free);
  s.Q.setFromTriplets(tq.begin(), tq.end());

  const auto& quad = disc.quadrature();
  std::vector<Eigen::Triplet<double>> tj;
  for (size_t q = 0; q < quad.size(); ++q) {
    const auto& qp = quad[q];
    const double sw = std::sqrt(qp.weight);
    s.weights.push_back(qp.weight);
    s.sqrt_weights.push_back(sw);
    s.normals.push_back(qp.normal);
    s.facet_of_point.push_back(qp.facet);
    s.points.push_back(qp.point);
    for (size_t k = 0; k < qp.dofs.size(); ++k) {
      const int gk = s.free_index[qp.dofs[k]];
      if (gk < 0) continue;
      for (int i = 0; i < s.dim; ++i)
        if (qp.jump(i, k) != 0) tj.emplace_back(static_cast<int>(q) * s.dim + i, gk, sw * qp.jump(i, k));
    }
  }
  s.J.resize(static_cast<int>(quad.size()) * s.dim, s.num_free);
  s.J.setFromTriplets(tj.begin(), tj.end());
  return s;
}

AssembledCell assemble(const CellProblem& problem) {
  return assemble(Discretization(problem.mesh, problem.refinement), problem.A);
}

// ---------------------------------------------------------------------------
// Solver

class CellSolver::Factor {
 public:
  Factor(const SpMat& k, bool dense) : dense_(dense) {
    Vec d;
    if (dense_) {
      dense_ldlt_.compute(Mat(k));
      if (dense_ldlt_.info() != Eigen::Success) throw GeometryError("factorization failed");
      d = dense_ldlt_.vectorD();
    } else {
      sparse_ldlt_.compute(k);
      if (sparse_ldlt_.info() != Eigen::Success) throw GeometryError("factorization failed");
      d = sparse_ldlt_.vectorD();
    }
    if (d.size() > 0) {
      const double hi = d.cwiseAbs().maxCoeff();
      if (!(d.minCoeff() > 1e-11 * hi))
        throw GeometryError("cell system is singular after pinning translations (floating block?)");
    }
  }
  Vec solve(const Vec& b) const { return dense_ ? Vec(dense_ldlt_.solve(b)) : Vec(sparse_ldlt_.solve(b)); }

 private:
  bool dense_;
  Eigen::LDLT<Mat> dense_ldlt_;
  Eigen::SimplicialLDLT<SpMat> sparse_ldlt_;
};

CellSolver::CellSolver(const UnitCellMesh& mesh, const ElasticityOperatord& A, const JumpCone& cone,
                       int refinement, SolverParams params, std::optional<JumpCone> exterior)
    : mesh_(mesh), A_(A), cone_(cone), exterior_(std::move(exterior)), disc_(mesh, refinement), params_(params) {
  if (cone.dim() != mesh.dim) throw InputError("jump cone dimension does not match mesh");
  if (exterior_ && exterior_->dim() != mesh.dim) throw InputError("exterior cone dimension does not match mesh");
  sys_ = assemble(disc_, A_);
  for (size_t q = 0; q < sys_.normals.size(); ++q) {
    const bool outer = mesh_.facets[sys_.facet_of_point[q]].exterior();
    sections_.push_back((outer && exterior_ ? *exterior_ : cone_).section(sys_.normals[q]));
  }
  const double tj = sys_.J.squaredNorm();
  double tq = 0;
  for (int i = 0; i < sys_.Q.outerSize(); ++i) tq += sys_.Q.coeff(i, i);
  rho0_ = params_.rho > 0 ? params_.rho : (tj > 0 ? std::max(tq, 1e-12) / tj : 1.0);
  factor(rho0_);  // detects floating blocks up front
}

std::shared_ptr<const CellSolver::Factor> CellSolver::factor(double rho) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = factors_.find(rho);
  if (it != factors_.end()) return it->second;
  SpMat k = sys_.Q + rho * SpMat(sys_.J.transpose() * sys_.J);
  auto f = std::make_shared<const Factor>(k, sys_.num_free <= 160);
  factors_.emplace(rho, f);
  return f;
}

double CellSolver::bulk_energy(const Vec& x, const SymTensord& xi) const {
  const Vec c = xi.components();
  const double quad = 0.5 * x.dot(sys_.Q * x) + x.dot(sys_.R * c) + 0.5 * sys_.volume * c.dot(A_.matrix() * c);
  return std::max(0.0, quad);
}

double CellSolver::objective(const Vec& x, const SymTensord& xi, bool include_surface, double tol) const {
  double value = bulk_energy(x, xi);
  const Vec jx = sys_.J * x;
  const int d = sys_.dim;
  for (size_t q = 0; q < sections_.size(); ++q) {
    const Vec j = jx.segment(q * d, d) / sys_.sqrt_weights[q];
    if (!sections_[q].admissible(j, tol)) return std::numeric_limits<double>::infinity();
    if (include_surface) value += sys_.weights[q] * j.norm();
  }
  return value;
}

namespace {

// Integral of |j(s)| for j affine on [0, 1], split where |j| is smallest.
double integrate_norm(const Vec& ja, const Vec& jb, double length) {
  static const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                               0.9061798459386640};
  static const double gw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                               0.4786286704993665, 0.2369268850561891};
  const Vec d = jb - ja;
  double split = 0.5;
  if (d.squaredNorm() > 0) split = std::clamp(-ja.dot(d) / d.squaredNorm(), 0.0, 1.0);
  double total = 0;
  for (auto [a, b] : {std::pair{0.0, split}, std::pair{split, 1.0}}) {
    if (b - a <= 0) continue;
    for (int k = 0; k < 5; ++k) {
      const double s = 0.5 * (a + b) + 0.5 * (b - a) * gx[k];
      total += 0.5 * (b - a) * gw[k] * (ja + s * d).norm();
    }
  }
  return total * length;
}

}  // namespace

CellSolution CellSolver::solve(const SymTensord& xi, bool include_surface) const {
  if (xi.dim() != mesh_.dim) throw InputError("macroscopic strain dimension does not match mesh");
  const int d = sys_.dim;
  const int nq = static_cast<int>(sections_.size());
  const Vec c = xi.components();
  const Vec r = sys_.R * c;

  double rho = rho0_;
  auto fac = factor(rho);
  Vec x = Vec::Zero(sys_.num_free);
  Vec z = Vec::Zero(nq * d);
  Vec u = Vec::Zero(nq * d);
  Vec jx = Vec::Zero(nq * d);
  Vec z_old;
  double prim = 0, dual = 0;
  int it = 0;
  bool converged = false;

  for (it = 1; it <= params_.max_iter; ++it) {
    x = fac->solve(-r + rho * (sys_.J.transpose() * (z - u)));
    jx = sys_.J * x;
    z_old = z;
    const Vec v = jx + u;
    for (int q = 0; q < nq; ++q) {
      const double w = include_surface ? sys_.sqrt_weights[q] / rho : 0.0;
      z.segment(q * d, d) = sections_[q].prox(v.segment(q * d, d), w);
    }
    u += jx - z;
    prim = (jx - z).norm();
    dual = rho * (sys_.J.transpose() * (z - z_old)).norm();
    if (!std::isfinite(prim) || !std::isfinite(dual))
      throw SolverError("cell solver produced a non-finite iterate", it);
    const double eps_p = params_.tol_primal + params_.tol_relative * std::max(jx.norm(), z.norm());
    const double eps_d = params_.tol_dual + params_.tol_relative * rho * (sys_.J.transpose() * u).norm();
    if (prim <= eps_p && dual <= eps_d) {
      converged = true;
      break;
    }
    if (params_.adapt_every > 0 && it % params_.adapt_every == 0) {
      double scale = 1;
      if (prim > 10 * dual)
        scale = 2;
      else if (dual > 10 * prim)
        scale = 0.5;
      if (scale != 1) {
        rho *= scale;
        u /= scale;
        fac = factor(rho);
      }
    }
  }
  it = std::min(it, params_.max_iter);

  CellSolution sol;
  sol.converged = converged;
  sol.iterations = it;
  sol.primal_residual = prim;
  sol.dual_residual = dual;
  sol.rho = rho;
  sol.bulk_part = bulk_energy(x, xi);
  double surface = 0;
  for (int q = 0; q < nq; ++q) {
    const Vec jq = z.segment(q * d, d) / sys_.sqrt_weights[q];
    if (include_surface) surface += sys_.weights[q] * jq.norm();
    sol.jumps.push_back({sys_.facet_of_point[q], sys_.points[q], sys_.weights[q], jq});
  }
  sol.surface_part = surface;
  sol.value = sol.bulk_part + sol.surface_part;

  // Stresses A(xi + E u) with the final multipliers are statically admissible,
  // which makes the complementary energy a lower bound on the minimum.
  double lower = 0;
  Vec full = Vec::Zero(disc_.num_dofs());
  for (int k = 0; k < disc_.num_dofs(); ++k)
    if (sys_.free_index[k] >= 0) full(k) = x(sys_.free_index[k]);
  for (const auto& e : disc_.elements()) {
    Vec xe(e.dofs.size());
    for (size_t k = 0; k < e.dofs.size(); ++k) xe(k) = full(e.dofs[k]);
    const Vec strain = c + e.strain * xe;
    const Vec stress = A_.matrix() * strain;
    lower += e.area * (stress.dot(c) - 0.5 * stress.dot(strain));
  }
  sol.certified_lower_bound = lower;

  for (int b = 0; b < static_cast<int>(mesh_.blocks.size()); ++b)
    sol.block_dofs.push_back(full.segment(disc_.block_offset(b), disc_.block_dofs(b)));

  if (include_surface) {
    std::vector<int> dofs;
    Mat coeff;
    auto jump_at = [&](const Facet& f, const Vec& p) {
      Vec j = Vec::Zero(d);
      if (f.right != Facet::kExterior) {
        disc_.trace(f.right, p - f.shift.cast<double>(), dofs, coeff);
        for (size_t k = 0; k < dofs.size(); ++k) j += coeff.col(k) * full(dofs[k]);
      }
      if (f.left != Facet::kExterior) {
        disc_.trace(f.left, p, dofs, coeff);
        for (size_t k = 0; k < dofs.size(); ++k) j -= coeff.col(k) * full(dofs[k]);
      }
      return j;
    };
    double resolved = 0;
    for (const auto& f : mesh_.facets) {
      if (d == 1) {
        resolved += f.measure * jump_at(f, f.midpoint).norm();
        continue;
      }
      const int pieces = disc_.refinement() == 0 ? 1 : (1 << disc_.refinement()) * 2;
      for (int k = 0; k < pieces; ++k) {
        const Vec a = f.a + (f.b - f.a) * (double(k) / pieces);
        const Vec b = f.a + (f.b - f.a) * (double(k + 1) / pieces);
        resolved += integrate_norm(jump_at(f, a), jump_at(f, b), f.measure / pieces);
      }
    }
    sol.surface_resolved = resolved;
  }
  return sol;
}

CellSolution solve_density(const CellProblem& problem) {
  CellSolver solver(problem.mesh, problem.A, problem.cone, problem.refinement, problem.params);
  return solver.solve(problem.xi, problem.include_surface);
}

CellSolution solve_dry(const CellProblem& problem) {
  CellSolver solver(problem.mesh, problem.A, problem.cone, problem.refinement, problem.params);
  return solver.solve(problem.xi, false);
}

// ---------------------------------------------------------------------------
// JSON

namespace {
std::vector<double> to_std(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }
Vec from_std(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), v.size()); }
}  // namespace

void to_json(nlohmann::json& j, const SolverParams& p) {
  j = {{"rho", p.rho},
       {"tol_primal", p.tol_primal},
       {"tol_dual", p.tol_dual},
       {"tol_relative", p.tol_relative},
       {"max_iter", p.max_iter},
       {"adapt_every", p.adapt_every}};
}

void from_json(const nlohmann::json& j, SolverParams& p) {
  p.rho = j.value("rho", p.rho);
  p.tol_primal = j.value("tol_primal", p.tol_primal);
  p.tol_dual = j.value("tol_dual", p.tol_dual);
  p.tol_relative = j.value("tol_relative", p.tol_relative);
  p.max_iter = j.value("max_iter", p.max_iter);
  p.adapt_every = j.value("adapt_every", p.adapt_every);
}

void to_json(nlohmann::json& j, const CellSolution& s) {
  j = nlohmann::json::object();
  j["format_version"] = 1;
  j["value"] = s.value;
  j["bulk_part"] = s.bulk_part;
  j["surface_part"] = s.surface_part;
  j["surface_resolved"] = s.surface_resolved;
  j["certified_lower_bound"] = s.certified_lower_bound;
  j["primal_residual"] = s.primal_residual;
  j["dual_residual"] = s.dual_residual;
  j["rho"] = s.rho;
  j["iterations"] = s.iterations;
  j["converged"] = s.converged;
  j["block_dofs"] = nlohmann::json::array();
  for (const auto& b : s.block_dofs) j["block_dofs"].push_back(to_std(b));
  j["jumps"] = nlohmann::json::array();
  for (const auto& q : s.jumps)
    j["jumps"].push_back({{"facet", q.facet}, {"point", to_std(q.point)}, {"weight", q.weight}, {"jump", to_std(q.jump)}});
}

void from_json(const nlohmann::json& j, CellSolution& s) {
  s.value = j.at("value").get<double>();
  s.bulk_part = j.at("bulk_part").get<double>();
  s.surface_part = j.at("surface_part").get<double>();
  s.surface_resolved = j.value("surface_resolved", 0.0);
  s.certified_lower_bound = j.at("certified_lower_bound").get<double>();
  s.primal_residual = j.at("primal_residual").get<double>();
  s.dual_residual = j.at("dual_residual").get<double>();
  s.rho = j.value("rho", 0.0);
  s.iterations = j.at("iterations").get<int>();
  s.converged = j.at("converged").get<bool>();
  s.block_dofs.clear();
  for (const auto& b : j.at("block_dofs")) s.block_dofs.push_back(from_std(b.get<std::vector<double>>()));
  s.jumps.clear();
  for (const auto& q : j.at("jumps"))
    s.jumps.push_back({q.at("facet").get<int>(), from_std(q.at("point").get<std::vector<double>>()),
                       q.at("weight").get<double>(), from_std(q.at("jump").get<std::vector<double>>())});
}

}  // namespace cohom
