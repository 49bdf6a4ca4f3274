#ifndef COHOM_MACROEVAL_HPP
#define COHOM_MACROEVAL_HPP

#include <memory>
#include <mutex>
#include <vector>

#include "json.hpp"

#include "cohom/density.hpp"

namespace cohom {

/// Affine displacement u(x) = offset + gradient * x on an interval (two
/// vertices) or a triangle (three vertices).
struct MacroElement {
  std::vector<Vec> vertices;
  Vec offset;
  Mat gradient;

  double measure() const;
  SymTensord strain() const;
  Vec displacement(const Vec& x) const { return offset + gradient * x; }
};

/// Crack along the segment [a, b] (a single point in 1D) with unit normal
/// pointing from element `minus` to element `plus`; jump = u_plus - u_minus.
/// Element indices may be -1 when the crack lies on the domain boundary.
struct CrackSegment {
  Vec a;
  Vec b;
  Vec normal;
  Vec jump;
  int minus = -1;
  int plus = -1;

  double measure() const { return a.size() == 1 ? 1.0 : (b - a).norm(); }
  /// Matrix jump jump (.) normal.
  SymTensord matrix_jump() const { return sym_dyad(jump, normal); }
};

struct MacroField {
  int dim = 1;
  std::vector<MacroElement> elements;
  std::vector<CrackSegment> cracks;

  /// Throws InputError unless every interface without a crack has matching
  /// traces and every crack jump equals the trace difference of its elements.
  void validate(double tol = 1e-10) const;

  /// 1D field on the partition nodes[0] < ... < nodes[n] with u = values[i] +
  /// slopes[i] (x - nodes[i]) on interval i; jumps at interior nodes become
  /// crack points.
  static MacroField piecewise_1d(const std::vector<double>& nodes, const std::vector<double>& values,
                                 const std::vector<double>& slopes);
};

struct SegmentReport {
  int index = 0;
  double distance = 0;  // distance of jump (.) normal to K_hom
  bool admissible = true;
};

struct AdmissibilityReport {
  bool admissible = true;
  std::vector<SegmentReport> segments;
};

AdmissibilityReport admissible(const MacroField& field, const ConeSpec& k_hom, double tol = 1e-9);

/// Homogenized density and its recession function.
class DensitySource {
 public:
  virtual ~DensitySource() = default;
  virtual int dim() const = 0;
  virtual double f(const SymTensord& xi) const = 0;
  /// Recession at a unit direction; +inf outside the tensile cone.
  virtual double recession(const SymTensord& direction) const = 0;
  virtual const ConeSpec& tensile_cone() const = 0;
};

class Analytic1DSource : public DensitySource {
 public:
  Analytic1DSource();
  int dim() const override { return 1; }
  double f(const SymTensord& xi) const override;
  double recession(const SymTensord& direction) const override;
  const ConeSpec& tensile_cone() const override { return cone_; }

 private:
  ConeSpec cone_;
};

/// Exact cell solves for every query. The tensile cone is supplied (usually
/// from detect_cones).
class CellDensitySource : public DensitySource {
 public:
  CellDensitySource(std::shared_ptr<const DensityModel> model, ConeSpec k_hom, DensityOptions options = {});
  int dim() const override { return model_->dim(); }
  double f(const SymTensord& xi) const override { return model_->f(xi); }
  double recession(const SymTensord& direction) const override;
  const ConeSpec& tensile_cone() const override { return cone_; }
  const DensityModel& model() const { return *model_; }

 private:
  std::shared_ptr<const DensityModel> model_;
  ConeSpec cone_;
  DensityOptions options_;
};

/// f tabulated on a regular grid over the strain components in [-radius,
/// radius]^m and interpolated linearly on the Kuhn simplices of each grid
/// cell. Queries outside the box, or farther than trust_radius from the
/// nearest node, fall back to an exact cell solve.
class TabulatedDensitySource : public DensitySource {
 public:
  TabulatedDensitySource(std::shared_ptr<const CellDensitySource> exact, double radius, int nodes_per_axis,
                         double trust_radius, int jobs = 1);
  int dim() const override { return exact_->dim(); }
  double f(const SymTensord& xi) const override;
  double recession(const SymTensord& direction) const override { return exact_->recession(direction); }
  const ConeSpec& tensile_cone() const override { return exact_->tensile_cone(); }

  double spacing() const { return h_; }
  std::size_t fallbacks() const;

 private:
  std::shared_ptr<const CellDensitySource> exact_;
  int m_;
  int n_;
  double radius_;
  double h_;
  double trust_;
  std::vector<double> table_;
  mutable std::mutex mutex_;
  mutable std::size_t fallbacks_ = 0;
};

struct MacroEnergy {
  double total = 0;  // +inf when the field is inadmissible
  double bulk = 0;
  double singular = 0;
  std::vector<double> element_energy;
  std::vector<double> segment_energy;
  AdmissibilityReport report;
};

/// Sum over elements of |T| f(Eu_T) plus, over cracks, the measure times
/// |jump (.) normal| times the recession at the unit matrix jump.
MacroEnergy evaluate(const MacroField& field, const DensitySource& source, int jobs = 1, double tol = 1e-9);

void to_json(nlohmann::json& j, const MacroEnergy& e);
void from_json(const nlohmann::json& j, MacroField& field);
void to_json(nlohmann::json& j, const MacroField& field);

}  // namespace cohom

#endif  // COHOM_MACROEVAL_HPP
