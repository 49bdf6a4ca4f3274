#include "cohom/microgeometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cohom {

namespace {

constexpr double kTol = 1e-12;

Block make_block(const Vec& lo, const Vec& hi) {
  Block b;
  b.lo = lo;
  b.hi = hi;
  b.centroid = 0.5 * (lo + hi);
  b.measure = (hi - lo).prod();
  return b;
}

std::vector<Eigen::VectorXi> lattice_shifts(int dim, int lo, int hi) {
  std::vector<Eigen::VectorXi> out;
  for (int i = lo; i <= hi; ++i) {
    if (dim == 1) {
      out.push_back(Eigen::VectorXi::Constant(1, i));
      continue;
    }
    for (int j = lo; j <= hi; ++j) out.push_back(Eigen::Vector2i(i, j));
  }
  return out;
}

// Shared faces between blocks[i] and blocks[j] + k, normal along +axis.
void detect_facets(UnitCellMesh& mesh, const std::vector<Eigen::VectorXi>& shifts) {
  const int dim = mesh.dim;
  const int n = static_cast<int>(mesh.blocks.size());
  for (int axis = 0; axis < dim; ++axis) {
    for (int i = 0; i < n; ++i) {
      const Block& bi = mesh.blocks[i];
      for (int j = 0; j < n; ++j) {
        const Block& bj = mesh.blocks[j];
        for (const auto& k : shifts) {
          const Vec kd = k.cast<double>();
          if (std::abs(bi.hi(axis) - (bj.lo(axis) + kd(axis))) > kTol) continue;
          Facet f;
          f.left = i;
          f.right = j;
          f.shift = k;
          f.axis = axis;
          f.normal = Vec::Unit(dim, axis);
          if (dim == 1) {
            f.a = f.b = bi.hi;
            f.measure = 1;
          } else {
            const int other = 1 - axis;
            const double s0 = std::max(bi.lo(other), bj.lo(other) + kd(other));
            const double s1 = std::min(bi.hi(other), bj.hi(other) + kd(other));
            if (s1 - s0 <= kTol) continue;
            f.a = Vec(2);
            f.b = Vec(2);
            f.a(axis) = f.b(axis) = bi.hi(axis);
            f.a(other) = s0;
            f.b(other) = s1;
            f.measure = s1 - s0;
          }
          f.midpoint = 0.5 * (f.a + f.b);
          mesh.facets.push_back(f);
        }
      }
    }
  }
}

void detect_exterior_facets(UnitCellMesh& mesh) {
  const int dim = mesh.dim;
  for (int i = 0; i < static_cast<int>(mesh.blocks.size()); ++i) {
    const Block& b = mesh.blocks[i];
    for (int axis = 0; axis < dim; ++axis) {
      for (int side = 0; side < 2; ++side) {
        const double x = side == 0 ? b.lo(axis) : b.hi(axis);
        if (std::abs(x - side) > kTol) continue;
        Facet f;
        f.left = side == 0 ? Facet::kExterior : i;
        f.right = side == 0 ? i : Facet::kExterior;
        f.shift = Eigen::VectorXi::Zero(dim);
        f.axis = axis;
        f.normal = Vec::Unit(dim, axis);
        if (dim == 1) {
          f.a = f.b = Vec::Constant(1, x);
          f.measure = 1;
        } else {
          const int other = 1 - axis;
          f.a = Vec(2);
          f.b = Vec(2);
          f.a(axis) = f.b(axis) = x;
          f.a(other) = b.lo(other);
          f.b(other) = b.hi(other);
          f.measure = b.hi(other) - b.lo(other);
        }
        f.midpoint = 0.5 * (f.a + f.b);
        mesh.facets.push_back(f);
      }
    }
  }
}

void pair_boundary_images(UnitCellMesh& mesh) {
  mesh.boundary_images.clear();
  mesh.periodic_partner.clear();
  for (int f = 0; f < static_cast<int>(mesh.facets.size()); ++f) {
    const Facet& fc = mesh.facets[f];
    if (!fc.periodic()) continue;
    const Vec k = fc.shift.cast<double>();
    mesh.boundary_images.push_back({f, fc.left, fc.midpoint, fc.normal, fc.measure});
    mesh.boundary_images.push_back({f, fc.right, fc.midpoint - k, -fc.normal, fc.measure});
    const int n = static_cast<int>(mesh.boundary_images.size());
    mesh.periodic_partner.push_back(n - 1);
    mesh.periodic_partner.push_back(n - 2);
  }
}

}  // namespace

double UnitCellMesh::block_measure() const {
  double s = 0;
  for (const auto& b : blocks) s += b.measure;
  return s;
}

double UnitCellMesh::facet_measure() const {
  double s = 0;
  for (const auto& f : facets) s += f.measure;
  return s;
}

std::vector<Vec> UnitCellMesh::normals() const {
  std::vector<Vec> out;
  for (const auto& f : facets) {
    bool seen = false;
    for (const auto& n : out) seen = seen || (n - f.normal).norm() < kTol;
    if (!seen) out.push_back(f.normal);
  }
  return out;
}

UnitCellMesh build_periodic(int dim, const std::vector<std::pair<Vec, Vec>>& boxes, std::string label) {
  check_dim(dim);
  UnitCellMesh mesh;
  mesh.dim = dim;
  mesh.periodic = true;
  mesh.label = std::move(label);
  for (const auto& [lo, hi] : boxes) {
    if (lo.size() != dim || hi.size() != dim) throw InputError("block box dimension mismatch");
    if (((hi - lo).array() <= kTol).any()) throw InputError("degenerate block box");
    mesh.blocks.push_back(make_block(lo, hi));
  }
  if (std::abs(mesh.block_measure() - 1) > 1e-12)
    throw InputError("blocks do not tile the unit cell (total measure " +
                     std::to_string(mesh.block_measure()) + ")");
  detect_facets(mesh, lattice_shifts(dim, -1, 1));
  pair_boundary_images(mesh);
  return mesh;
}

UnitCellMesh build_chain_1d() {
  return build_periodic(1, {{Vec::Zero(1), Vec::Ones(1)}}, "chain");
}

UnitCellMesh build_stack_bond(int nx, int ny) { return build_running_bond(nx, ny, 0.0); }

UnitCellMesh build_running_bond(int nx, int ny, double offset) {
  if (nx < 1 || ny < 1) throw InputError("bond pattern needs nx, ny >= 1");
  if (!(offset >= 0 && offset < 1)) throw InputError("running bond offset must lie in [0, 1)");
  std::vector<std::pair<Vec, Vec>> boxes;
  for (int r = 0; r < ny; ++r) {
    const double s = (r % 2 == 1) ? offset : 0.0;
    for (int c = 0; c < nx; ++c) {
      Vec lo(2), hi(2);
      lo << (c + s) / nx, double(r) / ny;
      hi << (c + 1 + s) / nx, double(r + 1) / ny;
      boxes.emplace_back(lo, hi);
    }
  }
  std::ostringstream label;
  if (offset == 0)
    label << "stack:" << nx << "x" << ny;
  else
    label << "running:" << nx << "x" << ny << ":" << offset;
  return build_periodic(2, boxes, label.str());
}

UnitCellMesh build_assembly(const UnitCellMesh& cell, int copies) {
  if (copies < 1) throw InputError("assembly needs at least one copy per direction");
  if (!cell.periodic) throw InputError("assembly is built from a periodic cell");
  UnitCellMesh mesh;
  mesh.dim = cell.dim;
  mesh.periodic = false;
  mesh.label = cell.label + "@N=" + std::to_string(copies);
  const double h = 1.0 / copies;
  for (const auto& k : lattice_shifts(cell.dim, -1, copies)) {
    const Vec kd = k.cast<double>();
    for (const auto& b : cell.blocks) {
      const Vec lo = ((b.lo + kd) * h).cwiseMax(0.0);
      const Vec hi = ((b.hi + kd) * h).cwiseMin(1.0);
      if (((hi - lo).array() <= kTol).any()) continue;
      mesh.blocks.push_back(make_block(lo, hi));
    }
  }
  detect_facets(mesh, {Eigen::VectorXi::Zero(cell.dim)});
  detect_exterior_facets(mesh);
  return mesh;
}

UnitCellMesh build_from_string(const std::string& geometry) {
  if (geometry == "chain" || geometry == "chain1d") return build_chain_1d();
  auto fail = [&]() -> UnitCellMesh {
    throw InputError("unrecognized geometry '" + geometry +
                     "' (expected chain, stack:NXxNY or running:NXxNY:OFFSET)");
  };
  const auto colon = geometry.find(':');
  if (colon == std::string::npos) return fail();
  const std::string kind = geometry.substr(0, colon);
  std::string rest = geometry.substr(colon + 1);
  double offset = 0;
  const auto colon2 = rest.find(':');
  if (colon2 != std::string::npos) {
    try {
      offset = std::stod(rest.substr(colon2 + 1));
    } catch (const std::exception&) {
      return fail();
    }
    rest = rest.substr(0, colon2);
  }
  const auto x = rest.find('x');
  if (x == std::string::npos) return fail();
  int nx = 0, ny = 0;
  try {
    nx = std::stoi(rest.substr(0, x));
    ny = std::stoi(rest.substr(x + 1));
  } catch (const std::exception&) {
    return fail();
  }
  if (kind == "stack") return build_stack_bond(nx, ny);
  if (kind == "running") return build_running_bond(nx, ny, offset);
  return fail();
}

void to_json(nlohmann::json& j, const UnitCellMesh& mesh) {
  using nlohmann::json;
  auto vec = [](const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  j = json::object();
  j["format_version"] = 1;
  j["label"] = mesh.label;
  j["dim"] = mesh.dim;
  j["periodic"] = mesh.periodic;
  j["blocks"] = json::array();
  for (const auto& b : mesh.blocks)
    j["blocks"].push_back({{"lo", vec(b.lo)}, {"hi", vec(b.hi)}, {"centroid", vec(b.centroid)}, {"measure", b.measure}});
  j["facets"] = json::array();
  for (const auto& f : mesh.facets) {
    std::vector<int> shift(f.shift.data(), f.shift.data() + f.shift.size());
    j["facets"].push_back({{"left", f.left},
                           {"right", f.right},
                           {"shift", shift},
                           {"normal", vec(f.normal)},
                           {"a", vec(f.a)},
                           {"b", vec(f.b)},
                           {"measure", f.measure}});
  }
  j["boundary_images"] = json::array();
  for (size_t i = 0; i < mesh.boundary_images.size(); ++i) {
    const auto& im = mesh.boundary_images[i];
    j["boundary_images"].push_back({{"facet", im.facet},
                                    {"block", im.block},
                                    {"midpoint", vec(im.midpoint)},
                                    {"outward_normal", vec(im.outward_normal)},
                                    {"measure", im.measure},
                                    {"partner", mesh.periodic_partner[i]}});
  }
}

}  // namespace cohom
