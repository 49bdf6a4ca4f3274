#include "cohom/cones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cohom {

NnlsResult nnls(const Mat& g, const Vec& b, double tol, int max_iter) {
  const int n = static_cast<int>(g.cols());
  if (g.rows() != b.size()) throw InputError("nnls: dimension mismatch");
  if (max_iter <= 0) max_iter = 3 * n + 30;
  NnlsResult out;
  out.coefficients = Vec::Zero(n);
  Vec& x = out.coefficients;
  std::vector<bool> passive(n, false);
  const double scale = std::max(1.0, g.norm() * std::max(1.0, b.norm()));

  auto solve_passive = [&](Vec& s) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (passive[i]) idx.push_back(i);
    Mat sub(g.rows(), idx.size());
    for (size_t k = 0; k < idx.size(); ++k) sub.col(k) = g.col(idx[k]);
    Vec sol = sub.completeOrthogonalDecomposition().solve(b);
    s = Vec::Zero(n);
    for (size_t k = 0; k < idx.size(); ++k) s(idx[k]) = sol(k);
  };

  Vec w = g.transpose() * (b - g * x);
  int outer = 0;
  int forbid = -1;
  while (true) {
    int best = -1;
    double best_w = tol * scale;
    for (int i = 0; i < n; ++i)
      if (!passive[i] && i != forbid && w(i) > best_w) {
        best_w = w(i);
        best = i;
      }
    if (best < 0) break;
    if (++outer > max_iter)
      throw SolverError("nnls: active-set iteration limit reached", outer);
    passive[best] = true;

    Vec s;
    for (int inner = 0;; ++inner) {
      solve_passive(s);
      double alpha = std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i)
        if (passive[i] && s(i) <= 0) alpha = std::min(alpha, x(i) / (x(i) - s(i)));
      if (!std::isfinite(alpha)) break;
      if (inner > n + 5) throw SolverError("nnls: inner loop did not terminate", outer);
      x += alpha * (s - x);
      for (int i = 0; i < n; ++i)
        if (passive[i] && x(i) <= 1e-15 * scale) {
          passive[i] = false;
          x(i) = 0;
        }
    }
    x = s;
    w = g.transpose() * (b - g * x);
    // A column dropped right after entering is skipped once to avoid cycling.
    forbid = passive[best] ? -1 : best;
  }
  out.residual = (g * x - b).norm();
  out.iterations = outer;
  return out;
}

ConeSpec::ConeSpec(int dim, std::vector<SymTensord> generators, std::string label)
    : dim_(dim), label_(std::move(label)) {
  check_dim(dim);
  for (auto& g : generators) {
    if (g.dim() != dim) throw InputError("cone generator dimension mismatch");
    const double n = g.norm();
    if (n > 1e-14) generators_.push_back(g / n);
  }
  columns_ = Mat::Zero(sym_components(dim), generators_.size());
  for (size_t i = 0; i < generators_.size(); ++i) columns_.col(i) = generators_[i].components();
}

SymTensord project_cone(const ConeSpec& cone, const SymTensord& eta, double tol) {
  if (eta.dim() != cone.dim()) throw InputError("project_cone: dimension mismatch");
  if (cone.empty()) return SymTensord::zero(cone.dim());
  const Vec b = eta.components();
  const NnlsResult r = nnls(cone.generator_matrix(), b, tol);
  const Vec p = cone.generator_matrix() * r.coefficients;
  return SymTensord::from_components(cone.dim(), p);
}

SymTensord project_polar(const ConeSpec& cone, const SymTensord& eta, double tol) {
  return eta - project_cone(cone, eta, tol);
}

bool membership(const ConeSpec& cone, const SymTensord& eta, double tol) {
  const SymTensord p = project_cone(cone, eta);
  return (eta - p).norm() <= tol * std::max(1.0, eta.norm());
}

bool in_polar(const ConeSpec& cone, const SymTensord& eta, double tol) {
  for (const auto& g : cone.generators())
    if (eta.dot(g) > tol * std::max(1.0, eta.norm())) return false;
  return true;
}

bool polar_has_interior(const ConeSpec& cone, SymTensord* interior, double tol) {
  const int dim = cone.dim();
  const int m = sym_components(dim);
  if (cone.empty()) {
    if (interior) *interior = -SymTensord::identity(dim) / SymTensord::identity(dim).norm();
    return true;
  }
  // Least-distance program: min |eta| s.t. <g_i, eta> <= -1, via NNLS on the
  // stacked system [-G; 1^T] u ~ e_last.
  const Mat& g = cone.generator_matrix();
  Mat e(m + 1, g.cols());
  e.topRows(m) = -g;
  e.row(m).setOnes();
  Vec rhs = Vec::Zero(m + 1);
  rhs(m) = 1;
  const NnlsResult r = nnls(e, rhs);
  const Vec res = e * r.coefficients - rhs;
  if (res.norm() <= tol || std::abs(res(m)) <= tol) return false;
  Vec eta = -res.head(m) / res(m);
  if (eta.norm() <= tol) return false;
  if (interior) *interior = SymTensord::from_components(dim, eta / eta.norm());
  return true;
}

nlohmann::json tensor_entries(const SymTensord& t) {
  if (t.dim() == 1) return nlohmann::json::array({t(0, 0)});
  return nlohmann::json::array({t(0, 0), t(1, 1), t(0, 1)});
}

SymTensord tensor_from_entries(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() == 1) return SymTensord::make(v[0]);
  if (v.size() == 3) return SymTensord::make(v[0], v[1], v[2]);
  throw InputError("symmetric matrix entries must have length 1 or 3");
}

namespace {

Vec shrink(const Vec& v, double weight) {
  const double n = v.norm();
  if (n <= weight || n == 0) return Vec::Zero(v.size());
  return (1 - weight / n) * v;
}

double prox_objective(const Vec& j, const Vec& z, double weight) {
  return 0.5 * (j - z).squaredNorm() + weight * j.norm();
}

Vec check_normal(const Vec& normal, int dim) {
  if (normal.size() != dim) throw InputError("jump cone: normal dimension mismatch");
  const double n = normal.norm();
  if (std::abs(n - 1) > 1e-9) throw InputError("jump cone: normal must be a unit vector");
  return normal / n;
}

}  // namespace

void to_json(nlohmann::json& j, const ConeSpec& cone) {
  j = nlohmann::json::object();
  j["format_version"] = 1;
  j["label"] = cone.label();
  j["dim"] = cone.dim();
  j["generators"] = nlohmann::json::array();
  for (const auto& g : cone.generators()) j["generators"].push_back(tensor_entries(g));
}

void from_json(const nlohmann::json& j, ConeSpec& cone) {
  std::vector<SymTensord> gens;
  for (const auto& g : j.at("generators")) gens.push_back(tensor_from_entries(g));
  int dim = j.contains("dim") ? j.at("dim").get<int>() : (gens.empty() ? 1 : gens.front().dim());
  cone = ConeSpec(dim, std::move(gens), j.value("label", std::string{}));
}

JumpCone::JumpCone(Kind kind, int dim) : kind_(kind), dim_(dim) {
  check_dim(dim);
  if (kind == Kind::Generic) throw InputError("generic jump cones are built from a matrix cone");
}

JumpCone JumpCone::generic(ConeSpec k0) {
  JumpCone c;
  c.kind_ = Kind::Generic;
  c.dim_ = k0.dim();
  c.k0_ = std::move(k0);
  return c;
}

JumpCone::Section JumpCone::section(const Vec& normal) const {
  Section s;
  s.kind_ = kind_;
  s.normal_ = check_normal(normal, dim_);
  if (kind_ != Kind::Generic) return s;

  // Admissible jumps j satisfy j (.) nu = m with m in K0 and m in the range V
  // of j -> j (.) nu. Extreme rays of K0 intersected with V come from
  // generators lying in V or from pairs of generators straddling V.
  const int m = sym_components(dim_);
  Mat lift(m, dim_);
  for (int k = 0; k < dim_; ++k) lift.col(k) = sym_dyad(Vec::Unit(dim_, k), s.normal_).components();
  const auto pinv = lift.completeOrthogonalDecomposition();
  Vec off = Vec::Zero(m);
  if (dim_ == 2) {
    const Eigen::Vector3d a = lift.col(0), b = lift.col(1);
    off = a.cross(b).normalized();
  }
  const Mat& g = k0_.generator_matrix();
  std::vector<Vec> rays;
  auto add = [&](const Vec& mm) {
    Vec j = pinv.solve(mm);
    if (j.norm() > 1e-12) rays.push_back(j.normalized());
  };
  std::vector<double> side(g.cols());
  for (int i = 0; i < g.cols(); ++i) {
    side[i] = off.dot(g.col(i));
    if (std::abs(side[i]) <= 1e-12) add(g.col(i));
  }
  for (int i = 0; i < g.cols(); ++i)
    for (int k = i + 1; k < g.cols(); ++k)
      if (side[i] * side[k] < 0 && std::abs(side[i]) > 1e-12 && std::abs(side[k]) > 1e-12)
        add(std::abs(side[k]) * g.col(i) + std::abs(side[i]) * g.col(k));
  s.rays_ = Mat::Zero(dim_, rays.size());
  for (size_t i = 0; i < rays.size(); ++i) s.rays_.col(i) = rays[i];
  return s;
}

bool JumpCone::Section::admissible(const Vec& j, double tol) const {
  const double scale = tol * std::max(1.0, j.norm());
  switch (kind_) {
    case Kind::Opening: {
      const double jn = j.dot(normal_);
      return jn >= -scale && (j - jn * normal_).norm() <= scale;
    }
    case Kind::NonInterpenetration:
      return j.dot(normal_) >= -scale;
    case Kind::Generic:
      return (project(j) - j).norm() <= scale;
  }
  return false;
}

Vec JumpCone::Section::project(const Vec& z) const {
  switch (kind_) {
    case Kind::Opening:
      return std::max(0.0, z.dot(normal_)) * normal_;
    case Kind::NonInterpenetration: {
      const double zn = z.dot(normal_);
      return zn >= 0 ? Vec(z) : Vec(z - zn * normal_);
    }
    case Kind::Generic:
      if (rays_.cols() == 0) return Vec::Zero(z.size());
      return rays_ * nnls(rays_, z).coefficients;
  }
  return z;
}

Vec JumpCone::Section::prox(const Vec& z, double weight) const {
  if (weight < 0) throw InputError("jump_prox: weight must be nonnegative");
  switch (kind_) {
    case Kind::Opening:
      return std::max(0.0, z.dot(normal_) - weight) * normal_;
    case Kind::NonInterpenetration: {
      const double zn = z.dot(normal_);
      const Vec free = shrink(z, weight);
      if (free.dot(normal_) >= 0) return free;
      // Otherwise the minimizer lies on the boundary <j, nu> = 0.
      const Vec boundary = shrink(z - zn * normal_, weight);
      const Vec apex = Vec::Zero(z.size());
      return prox_objective(boundary, z, weight) <= prox_objective(apex, z, weight) ? boundary : apex;
    }
    case Kind::Generic:
      // For a closed convex cone the prox of the norm factors through the projection.
      return shrink(project(z), weight);
  }
  return z;
}

ConeSpec JumpCone::matrix_cone(const std::vector<Vec>& normals) const {
  if (kind_ == Kind::Generic) return k0_;
  std::vector<SymTensord> gens;
  auto push = [&](const SymTensord& t) {
    for (const auto& g : gens)
      if ((g / g.norm() - t / t.norm()).norm() < 1e-12) return;
    gens.push_back(t);
  };
  for (const auto& raw : normals) {
    const Vec nu = check_normal(raw, dim_);
    push(sym_dyad(nu, nu));
    if (kind_ == Kind::NonInterpenetration && dim_ == 2) {
      const Vec t = Eigen::Vector2d(-nu(1), nu(0));
      push(sym_dyad(t, nu));
      push(sym_dyad(Vec(-t), nu));
    }
  }
  return ConeSpec(dim_, std::move(gens), "K0:" + to_string(kind_));
}

std::string to_string(JumpCone::Kind kind) {
  switch (kind) {
    case JumpCone::Kind::Opening:
      return "opening";
    case JumpCone::Kind::NonInterpenetration:
      return "noninterpenetration";
    case JumpCone::Kind::Generic:
      return "generic";
  }
  return "unknown";
}

JumpCone::Kind jump_cone_kind(const std::string& name) {
  if (name == "opening") return JumpCone::Kind::Opening;
  if (name == "noninterpenetration" || name == "non-interpenetration")
    return JumpCone::Kind::NonInterpenetration;
  if (name == "generic") return JumpCone::Kind::Generic;
  throw InputError("unknown cone kind '" + name + "'");
}

Vec jump_prox(const JumpCone& cone, const Vec& normal, const Vec& z, double weight) {
  if (z.size() != cone.dim()) throw InputError("jump_prox: dimension mismatch");
  return cone.section(normal).prox(z, weight);
}

}  // namespace cohom
