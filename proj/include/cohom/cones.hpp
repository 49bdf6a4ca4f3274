#ifndef COHOM_CONES_HPP
#define COHOM_CONES_HPP

#include <string>
#include <vector>

#include "json.hpp"

#include "cohom/tensors.hpp"

namespace cohom {

/// Matrix entries [x11] or [x11, x22, x12] (no Voigt scaling).
nlohmann::json tensor_entries(const SymTensord& t);
SymTensord tensor_from_entries(const nlohmann::json& j);

struct NnlsResult {
  Vec coefficients;
  double residual = 0;
  int iterations = 0;
};

/// Lawson-Hanson active-set solver for min |G c - b| subject to c >= 0.
NnlsResult nnls(const Mat& g, const Vec& b, double tol = 1e-13, int max_iter = 0);

/// Polyhedral cone of symmetric matrices { sum_i c_i g_i : c_i >= 0 }.
///
/// Generators are normalized to unit Frobenius norm on construction; zero
/// generators are dropped.
class ConeSpec {
 public:
  ConeSpec() = default;
  ConeSpec(int dim, std::vector<SymTensord> generators, std::string label = {});

  int dim() const { return dim_; }
  const std::vector<SymTensord>& generators() const { return generators_; }
  const std::string& label() const { return label_; }
  bool empty() const { return generators_.empty(); }

  /// Generators as columns in component coordinates.
  const Mat& generator_matrix() const { return columns_; }

 private:
  int dim_ = 1;
  std::vector<SymTensord> generators_;
  std::string label_;
  Mat columns_;
};

/// Nearest point of the cone (the apex when the cone has no generators).
SymTensord project_cone(const ConeSpec& cone, const SymTensord& eta, double tol = 1e-12);

/// Nearest point of the polar cone {eta : <eta, g> <= 0 for all generators}.
SymTensord project_polar(const ConeSpec& cone, const SymTensord& eta, double tol = 1e-12);

/// |eta - P(eta)| <= tol * max(1, |eta|).
bool membership(const ConeSpec& cone, const SymTensord& eta, double tol);

/// <eta, g> <= tol * |eta| for every generator.
bool in_polar(const ConeSpec& cone, const SymTensord& eta, double tol);

/// Whether the polar cone has nonempty interior, i.e. the cone is pointed.
/// On success `interior` receives a unit-norm point strictly inside the polar.
bool polar_has_interior(const ConeSpec& cone, SymTensord* interior = nullptr, double tol = 1e-9);

void to_json(nlohmann::json& j, const ConeSpec& cone);
void from_json(const nlohmann::json& j, ConeSpec& cone);

/// Constraint on the displacement jump across an interface of normal nu.
class JumpCone {
 public:
  enum class Kind {
    Opening,              // j = lambda nu, lambda >= 0
    NonInterpenetration,  // <j, nu> >= 0
    Generic,              // j (.) nu in a user-supplied matrix cone
  };

  /// The admissible jumps at one fixed normal: a closed convex cone in R^dim.
  class Section {
   public:
    Kind kind() const { return kind_; }
    const Vec& normal() const { return normal_; }
    bool admissible(const Vec& j, double tol) const;
    Vec project(const Vec& z) const;
    /// argmin 1/2 |j - z|^2 + weight |j| over admissible j.
    Vec prox(const Vec& z, double weight) const;

   private:
    friend class JumpCone;
    Kind kind_ = Kind::Opening;
    Vec normal_;
    Mat rays_;  // Generic: columns generate the section
  };

  JumpCone() = default;
  JumpCone(Kind kind, int dim);
  static JumpCone generic(ConeSpec k0);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  const ConeSpec& matrix_cone() const { return k0_; }

  Section section(const Vec& normal) const;

  /// Cone generated by the matrix jumps a (.) nu admissible at the given normals.
  ConeSpec matrix_cone(const std::vector<Vec>& normals) const;

 private:
  Kind kind_ = Kind::Opening;
  int dim_ = 1;
  ConeSpec k0_;
};

std::string to_string(JumpCone::Kind kind);
JumpCone::Kind jump_cone_kind(const std::string& name);

/// Proximal map of weight |.| + indicator(admissible jumps at nu).
/// weight == 0 reduces to the projection onto the admissible jumps.
Vec jump_prox(const JumpCone& cone, const Vec& normal, const Vec& z, double weight);

}  // namespace cohom

#endif  // COHOM_CONES_HPP
