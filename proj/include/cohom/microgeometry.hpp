#ifndef COHOM_MICROGEOMETRY_HPP
#define COHOM_MICROGEOMETRY_HPP

#include <string>
#include <vector>

#include "json.hpp"

#include "cohom/tensors.hpp"

namespace cohom {

/// Axis-aligned block. In 1D only the first coordinate is used.
struct Block {
  Vec lo;
  Vec hi;
  Vec centroid;
  double measure = 0;
};

/// Interface between two blocks (or a block and the exterior of a finite
/// assembly). The normal points from `left` to `right`. Points on the facet
/// are expressed in the coordinates of the left block; the right block is
/// the translate `blocks[right] + shift`, so a point p of the facet lies at
/// p - shift in the right block's own coordinates.
struct Facet {
  static constexpr int kExterior = -1;

  int left = 0;
  int right = 0;
  Eigen::VectorXi shift;
  int axis = 0;
  Vec normal;
  Vec a;  // endpoints; equal in 1D
  Vec b;
  Vec midpoint;
  double measure = 0;

  bool periodic() const { return shift.size() > 0 && shift.any(); }
  bool exterior() const { return left == kExterior || right == kExterior; }
};

/// One appearance of a periodic facet on the boundary of the fundamental cell,
/// seen from the block on one of its sides.
struct BoundaryImage {
  int facet = 0;
  int block = 0;
  Vec midpoint;
  Vec outward_normal;
  double measure = 0;
};

/// Periodic block tiling of Y = (0,1)^dim, or (with periodic == false) a
/// finite block assembly of the same square whose outer faces border the
/// exterior.
struct UnitCellMesh {
  int dim = 1;
  bool periodic = true;
  std::string label;
  std::vector<Block> blocks;
  std::vector<Facet> facets;
  std::vector<BoundaryImage> boundary_images;
  /// Involution on boundary_images pairing the two appearances of a facet.
  std::vector<int> periodic_partner;

  double block_measure() const;
  double facet_measure() const;
  std::vector<Vec> normals() const;
};

UnitCellMesh build_chain_1d();
UnitCellMesh build_stack_bond(int nx, int ny);
/// Odd rows are shifted by `offset` brick lengths, offset in [0, 1).
UnitCellMesh build_running_bond(int nx, int ny, double offset);

/// Periodic mesh from boxes tiling a fundamental domain of the unit lattice.
UnitCellMesh build_periodic(int dim, const std::vector<std::pair<Vec, Vec>>& boxes, std::string label = {});

/// N^dim scaled copies of a periodic cell filling (0,1)^dim; blocks cut by the
/// boundary are clipped, outer faces become exterior facets.
UnitCellMesh build_assembly(const UnitCellMesh& cell, int copies);

/// Parses "chain", "stack:NXxNY", "running:NXxNY:OFFSET".
UnitCellMesh build_from_string(const std::string& geometry);

void to_json(nlohmann::json& j, const UnitCellMesh& mesh);

}  // namespace cohom

#endif  // COHOM_MICROGEOMETRY_HPP
