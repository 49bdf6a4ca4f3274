#include "cohom/macroeval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cohom/parallel.hpp"

namespace cohom {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool same_point(const Vec& a, const Vec& b) { return (a - b).norm() <= 1e-12 * std::max(1.0, a.norm()); }

std::vector<Vec> shared_vertices(const MacroElement& e, const MacroElement& f) {
  std::vector<Vec> out;
  for (const auto& v : e.vertices)
    for (const auto& w : f.vertices)
      if (same_point(v, w)) out.push_back(v);
  return out;
}

Vec read_vec(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(v.data(), v.size());
}

std::vector<double> to_std(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

double MacroElement::measure() const {
  if (vertices.size() == 2) return std::abs(vertices[1](0) - vertices[0](0));
  const Vec a = vertices[1] - vertices[0];
  const Vec b = vertices[2] - vertices[0];
  return 0.5 * std::abs(a(0) * b(1) - a(1) * b(0));
}

SymTensord MacroElement::strain() const { return SymTensord::from_matrix(0.5 * (gradient + gradient.transpose())); }

void MacroField::validate(double tol) const {
  check_dim(dim);
  const size_t nv = dim == 1 ? 2 : 3;
  for (size_t i = 0; i < elements.size(); ++i) {
    const auto& e = elements[i];
    if (e.vertices.size() != nv) throw InputError("element " + std::to_string(i) + " has the wrong vertex count");
    for (const auto& v : e.vertices)
      if (v.size() != dim) throw InputError("element " + std::to_string(i) + " vertex dimension mismatch");
    if (e.offset.size() != dim || e.gradient.rows() != dim || e.gradient.cols() != dim)
      throw InputError("element " + std::to_string(i) + " displacement dimension mismatch");
    if (e.measure() <= 0) throw InputError("element " + std::to_string(i) + " is degenerate");
  }
  const int ne = static_cast<int>(elements.size());
  auto check_index = [&](int k) {
    if (k < -1 || k >= ne) throw InputError("crack refers to a missing element");
  };
  for (size_t c = 0; c < cracks.size(); ++c) {
    const auto& s = cracks[c];
    if (s.a.size() != dim || s.b.size() != dim || s.normal.size() != dim || s.jump.size() != dim)
      throw InputError("crack " + std::to_string(c) + " dimension mismatch");
    if (std::abs(s.normal.norm() - 1) > 1e-9) throw InputError("crack " + std::to_string(c) + " normal is not unit");
    check_index(s.minus);
    check_index(s.plus);
    if (s.minus < 0 || s.plus < 0) continue;
    for (const Vec& p : {s.a, s.b}) {
      const Vec diff = elements[s.plus].displacement(p) - elements[s.minus].displacement(p);
      if ((diff - s.jump).norm() > tol * std::max(1.0, s.jump.norm()))
        throw InputError("crack " + std::to_string(c) + " jump disagrees with the element traces");
    }
  }
  const size_t face = dim == 1 ? 1 : 2;
  for (int i = 0; i < ne; ++i)
    for (int k = i + 1; k < ne; ++k) {
      const auto shared = shared_vertices(elements[i], elements[k]);
      if (shared.size() < face) continue;
      const bool cracked = std::any_of(cracks.begin(), cracks.end(), [&](const CrackSegment& s) {
        return (s.minus == i && s.plus == k) || (s.minus == k && s.plus == i);
      });
      if (cracked) continue;
      for (const auto& p : shared)
        if ((elements[i].displacement(p) - elements[k].displacement(p)).norm() > tol)
          throw InputError("elements " + std::to_string(i) + " and " + std::to_string(k) +
                           " jump across an interface without a crack");
    }
}

MacroField MacroField::piecewise_1d(const std::vector<double>& nodes, const std::vector<double>& values,
                                    const std::vector<double>& slopes) {
  if (nodes.size() < 2 || values.size() != nodes.size() - 1 || slopes.size() != nodes.size() - 1)
    throw InputError("piecewise_1d needs n+1 nodes and n values and slopes");
  MacroField field;
  field.dim = 1;
  for (size_t i = 0; i + 1 < nodes.size(); ++i) {
    if (!(nodes[i + 1] > nodes[i])) throw InputError("piecewise_1d nodes must increase");
    MacroElement e;
    e.vertices = {Vec::Constant(1, nodes[i]), Vec::Constant(1, nodes[i + 1])};
    e.gradient = Mat::Constant(1, 1, slopes[i]);
    e.offset = Vec::Constant(1, values[i] - slopes[i] * nodes[i]);
    field.elements.push_back(e);
  }
  for (size_t i = 1; i + 1 < nodes.size(); ++i) {
    const Vec x = Vec::Constant(1, nodes[i]);
    const Vec jump = field.elements[i].displacement(x) - field.elements[i - 1].displacement(x);
    if (jump.norm() == 0) continue;
    field.cracks.push_back({x, x, Vec::Ones(1), jump, int(i - 1), int(i)});
  }
  return field;
}

AdmissibilityReport admissible(const MacroField& field, const ConeSpec& k_hom, double tol) {
  if (k_hom.empty()) throw InputError("admissibility needs a nonempty tensile cone");
  AdmissibilityReport report;
  for (size_t c = 0; c < field.cracks.size(); ++c) {
    const SymTensord eta = field.cracks[c].matrix_jump();
    SegmentReport s;
    s.index = static_cast<int>(c);
    s.distance = (eta - project_cone(k_hom, eta)).norm();
    s.admissible = s.distance <= tol * std::max(1.0, eta.norm());
    report.admissible = report.admissible && s.admissible;
    report.segments.push_back(s);
  }
  return report;
}

Analytic1DSource::Analytic1DSource() : cone_(1, {SymTensord::make(1.0)}, "K_hom") {}

double Analytic1DSource::f(const SymTensord& xi) const { return analytic_1d(xi.components()(0)).f; }

double Analytic1DSource::recession(const SymTensord& direction) const {
  return analytic_1d(direction.components()(0)).f_inf;
}

CellDensitySource::CellDensitySource(std::shared_ptr<const DensityModel> model, ConeSpec k_hom,
                                     DensityOptions options)
    : model_(std::move(model)), cone_(std::move(k_hom)), options_(std::move(options)) {
  if (!model_) throw InputError("cell density source needs a model");
}

double CellDensitySource::recession(const SymTensord& direction) const {
  return estimate_recession(*model_, direction, options_).value;
}

TabulatedDensitySource::TabulatedDensitySource(std::shared_ptr<const CellDensitySource> exact, double radius,
                                               int nodes_per_axis, double trust_radius, int jobs)
    : exact_(std::move(exact)), radius_(radius), trust_(trust_radius) {
  if (!exact_) throw InputError("tabulated source needs an exact source");
  if (nodes_per_axis < 2 || !(radius > 0)) throw InputError("table needs radius > 0 and at least 2 nodes per axis");
  m_ = sym_components(exact_->dim());
  n_ = nodes_per_axis;
  h_ = 2 * radius_ / (n_ - 1);
  std::size_t total = 1;
  for (int k = 0; k < m_; ++k) total *= n_;
  table_.resize(total);
  parallel_for(total, jobs, [&](std::size_t idx) {
    Vec c(m_);
    std::size_t rest = idx;
    for (int k = 0; k < m_; ++k) {
      c(k) = -radius_ + h_ * double(rest % n_);
      rest /= n_;
    }
    table_[idx] = exact_->f(SymTensord::from_components(exact_->dim(), c));
  });
}

std::size_t TabulatedDensitySource::fallbacks() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return fallbacks_;
}

double TabulatedDensitySource::f(const SymTensord& xi) const {
  const Vec& c = xi.components();
  Vec s(m_);
  std::vector<int> base(m_);
  double nearest = 0;
  bool inside = true;
  for (int k = 0; k < m_; ++k) {
    const double u = (c(k) + radius_) / h_;
    inside = inside && u >= -1e-12 && u <= n_ - 1 + 1e-12;
    base[k] = std::clamp(static_cast<int>(std::floor(u)), 0, n_ - 2);
    s(k) = std::clamp(u - base[k], 0.0, 1.0);
    const double d = std::min(s(k), 1 - s(k)) * h_;
    nearest += d * d;
  }
  if (!inside || std::sqrt(nearest) > trust_) {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      ++fallbacks_;
    }
    return exact_->f(xi);
  }
  auto at = [&](const std::vector<int>& idx) {
    std::size_t flat = 0, stride = 1;
    for (int k = 0; k < m_; ++k) {
      flat += stride * idx[k];
      stride *= n_;
    }
    return table_[flat];
  };
  std::vector<int> order(m_);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return s(a) > s(b); });
  std::vector<int> vertex = base;
  double value = (1 - s(order[0])) * at(vertex);
  for (int j = 0; j < m_; ++j) {
    vertex[order[j]] += 1;
    const double next = j + 1 < m_ ? s(order[j + 1]) : 0.0;
    value += (s(order[j]) - next) * at(vertex);
  }
  return value;
}

MacroEnergy evaluate(const MacroField& field, const DensitySource& source, int jobs, double tol) {
  if (field.dim != source.dim()) throw InputError("field and density dimensions differ");
  field.validate();
  MacroEnergy out;
  out.report = admissible(field, source.tensile_cone(), tol);
  if (!out.report.admissible) {
    out.total = out.bulk = out.singular = kInf;
    return out;
  }
  out.element_energy.resize(field.elements.size());
  out.segment_energy.resize(field.cracks.size());
  parallel_for(field.elements.size(), jobs, [&](std::size_t i) {
    const auto& e = field.elements[i];
    out.element_energy[i] = e.measure() * source.f(e.strain());
  });
  parallel_for(field.cracks.size(), jobs, [&](std::size_t i) {
    const auto& s = field.cracks[i];
    const SymTensord eta = s.matrix_jump();
    const double size = eta.norm();
    out.segment_energy[i] = size == 0 ? 0.0 : s.measure() * size * source.recession(eta / size);
  });
  out.bulk = pairwise_sum(out.element_energy);
  out.singular = pairwise_sum(out.segment_energy);
  out.total = out.bulk + out.singular;
  return out;
}

void to_json(nlohmann::json& j, const MacroEnergy& e) {
  auto number = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json("inf"); };
  j = {{"format_version", 1},
       {"energy", number(e.total)},
       {"bulk", number(e.bulk)},
       {"singular", number(e.singular)},
       {"admissible", e.report.admissible}};
  j["elements"] = nlohmann::json::array();
  for (double v : e.element_energy) j["elements"].push_back(number(v));
  j["segments"] = nlohmann::json::array();
  for (size_t i = 0; i < e.report.segments.size(); ++i) {
    const auto& s = e.report.segments[i];
    nlohmann::json seg = {{"index", s.index}, {"distance_to_cone", s.distance}, {"admissible", s.admissible}};
    if (i < e.segment_energy.size()) seg["energy"] = number(e.segment_energy[i]);
    j["segments"].push_back(seg);
  }
}

void from_json(const nlohmann::json& j, MacroField& field) {
  field = MacroField();
  field.dim = j.at("dim").get<int>();
  check_dim(field.dim);
  for (const auto& je : j.at("elements")) {
    MacroElement e;
    for (const auto& v : je.at("vertices")) e.vertices.push_back(read_vec(v));
    e.offset = je.contains("offset") ? read_vec(je["offset"]) : Vec::Zero(field.dim);
    const auto rows = je.at("gradient").get<std::vector<std::vector<double>>>();
    e.gradient = Mat(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != size_t(e.gradient.cols())) throw InputError("ragged gradient matrix");
      for (size_t c = 0; c < rows[r].size(); ++c) e.gradient(r, c) = rows[r][c];
    }
    field.elements.push_back(e);
  }
  if (j.contains("cracks"))
    for (const auto& jc : j["cracks"]) {
      CrackSegment s;
      s.a = read_vec(jc.at("a"));
      s.b = jc.contains("b") ? read_vec(jc["b"]) : s.a;
      s.normal = read_vec(jc.at("normal"));
      s.jump = read_vec(jc.at("jump"));
      s.minus = jc.value("minus", -1);
      s.plus = jc.value("plus", -1);
      field.cracks.push_back(s);
    }
}

void to_json(nlohmann::json& j, const MacroField& field) {
  j = {{"format_version", 1}, {"dim", field.dim}};
  j["elements"] = nlohmann::json::array();
  for (const auto& e : field.elements) {
    nlohmann::json je;
    je["vertices"] = nlohmann::json::array();
    for (const auto& v : e.vertices) je["vertices"].push_back(to_std(v));
    je["offset"] = to_std(e.offset);
    je["gradient"] = nlohmann::json::array();
    for (int r = 0; r < e.gradient.rows(); ++r) je["gradient"].push_back(to_std(e.gradient.row(r).transpose()));
    j["elements"].push_back(je);
  }
  j["cracks"] = nlohmann::json::array();
  for (const auto& s : field.cracks)
    j["cracks"].push_back({{"a", to_std(s.a)},
                           {"b", to_std(s.b)},
                           {"normal", to_std(s.normal)},
                           {"jump", to_std(s.jump)},
                           {"minus", s.minus},
                           {"plus", s.plus}});
}

}  // namespace cohom
