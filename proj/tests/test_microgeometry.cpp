#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"

#include "cohom/cellsolver.hpp"
#include "cohom/microgeometry.hpp"

using namespace cohom;

namespace {

std::vector<UnitCellMesh> sample_meshes() {
  return {build_chain_1d(),          build_stack_bond(1, 1),         build_stack_bond(2, 2),
          build_stack_bond(3, 2),    build_running_bond(2, 2, 0.5),  build_running_bond(3, 4, 0.25),
          build_running_bond(1, 2, 0.5)};
}

int fixture_value(const std::string& key) {
  std::ifstream in(std::string(COHOM_FIXTURE_DIR) + "/running_2x2_half.txt");
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + ":", 0) == 0) return std::stoi(line.substr(key.size() + 1));
  throw std::runtime_error("fixture key missing: " + key);
}

}  // namespace

TEST_SUITE("microgeometry") {
  TEST_CASE("chain") {
    const auto m = build_chain_1d();
    REQUIRE(m.blocks.size() == 1);
    REQUIRE(m.facets.size() == 1);
    CHECK(m.blocks[0].measure == 1);
    CHECK(m.facets[0].measure == 1);
    CHECK(m.facets[0].normal(0) == 1);
    CHECK(m.facets[0].left == 0);
    CHECK(m.facets[0].right == 0);
    REQUIRE(m.boundary_images.size() == 2);
    CHECK(m.boundary_images[0].facet == m.boundary_images[1].facet);
  }

  TEST_CASE("stack bond counts") {
    const auto one = build_stack_bond(1, 1);
    CHECK(one.blocks.size() == 1);
    CHECK(one.facets.size() == 2);
    CHECK(one.normals().size() == 2);

    const auto four = build_stack_bond(2, 2);
    CHECK(four.blocks.size() == 4);
    CHECK(four.facets.size() == 8);
    int periodic = 0;
    for (const auto& f : four.facets) periodic += f.periodic();
    CHECK(periodic == 4);
    CHECK(four.facet_measure() == doctest::Approx(4).epsilon(1e-14));
  }

  TEST_CASE("running bond against the hand-drawn fixture") {
    const auto m = build_running_bond(2, 2, 0.5);
    CHECK(m.blocks.size() == 4);
    CHECK(int(m.facets.size()) == fixture_value("facets"));
    CHECK(m.facet_measure() == doctest::Approx(fixture_value("facet_measure")).epsilon(1e-14));
    for (const auto& b : m.blocks) CHECK(b.measure == doctest::Approx(0.25).epsilon(1e-14));
  }

  TEST_CASE("zero offset matches the stack bond topology") {
    const auto a = build_running_bond(3, 2, 0.0);
    const auto b = build_stack_bond(3, 2);
    REQUIRE(a.facets.size() == b.facets.size());
    for (size_t i = 0; i < a.facets.size(); ++i) {
      CHECK(a.facets[i].left == b.facets[i].left);
      CHECK(a.facets[i].right == b.facets[i].right);
      CHECK(a.facets[i].measure == b.facets[i].measure);
    }
  }

  TEST_CASE("invalid parameters") {
    CHECK_THROWS_AS(build_stack_bond(0, 1), InputError);
    CHECK_THROWS_AS(build_running_bond(2, 2, 1.0), InputError);
    CHECK_THROWS_AS(build_running_bond(2, 2, -0.1), InputError);
    CHECK_THROWS_AS(build_from_string("hexagon:3"), InputError);
    CHECK_THROWS_AS(build_from_string("stack:2y2"), InputError);
    CHECK_THROWS_AS(build_periodic(2, {{Vec::Zero(2), Vec::Constant(2, 0.5)}}), InputError);
    CHECK(build_from_string("running:2x2:0.5").facets.size() == 12);
  }

  TEST_CASE("measure closure, unit normals and pairing involution") {
    for (const auto& m : sample_meshes()) {
      CAPTURE(m.label);
      CHECK(std::abs(m.block_measure() - 1) <= 1e-12);
      for (const auto& f : m.facets) CHECK(std::abs(f.normal.norm() - 1) <= 1e-15);
      REQUIRE(m.periodic_partner.size() == m.boundary_images.size());
      for (size_t i = 0; i < m.boundary_images.size(); ++i) {
        const int p = m.periodic_partner[i];
        CHECK(p != int(i));
        CHECK(m.periodic_partner[p] == int(i));
        const auto& a = m.boundary_images[i];
        const auto& b = m.boundary_images[p];
        CHECK(a.measure == b.measure);
        CHECK((a.outward_normal + b.outward_normal).norm() <= 1e-15);
        // The two appearances differ by a lattice vector.
        const Vec d = a.midpoint - b.midpoint;
        CHECK((d.array() - d.array().round()).abs().maxCoeff() <= 1e-12);
      }
    }
  }

  TEST_CASE("discrete divergence identity") {
    // For a periodic perturbation the block strains and the interface jumps
    // integrate to zero, so the mean strain of u_xi + u~ is xi.
    std::mt19937_64 gen(41);
    std::normal_distribution<double> n(0, 1);
    for (const auto& m : sample_meshes())
      for (int r : {0, 1}) {
        CAPTURE(m.label);
        CAPTURE(r);
        const Discretization disc(m, r);
        Vec x(disc.num_dofs());
        for (int i = 0; i < x.size(); ++i) x(i) = n(gen);
        Vec total = Vec::Zero(sym_components(m.dim));
        for (const auto& e : disc.elements()) {
          Vec xe(e.dofs.size());
          for (size_t k = 0; k < e.dofs.size(); ++k) xe(k) = x(e.dofs[k]);
          total += e.area * e.strain * xe;
        }
        for (const auto& q : disc.quadrature()) {
          Vec xq(q.dofs.size());
          for (size_t k = 0; k < q.dofs.size(); ++k) xq(k) = x(q.dofs[k]);
          total += q.weight * sym_dyad(Vec(q.jump * xq), q.normal).components();
        }
        CHECK(total.norm() <= 1e-12);
      }
  }

  TEST_CASE("assemblies tile the square") {
    for (int n : {1, 2, 3}) {
      const auto a = build_assembly(build_running_bond(2, 2, 0.5), n);
      CHECK(!a.periodic);
      CHECK(std::abs(a.block_measure() - 1) <= 1e-12);
      double exterior = 0;
      for (const auto& f : a.facets)
        if (f.exterior()) exterior += f.measure;
      CHECK(exterior == doctest::Approx(4).epsilon(1e-12));
    }
    CHECK(build_assembly(build_chain_1d(), 4).blocks.size() == 4);
    CHECK(build_assembly(build_stack_bond(1, 1), 3).blocks.size() == 9);
  }

  TEST_CASE("mesh JSON") {
    const nlohmann::json j = build_stack_bond(2, 2);
    CHECK(j["format_version"] == 1);
    CHECK(j["blocks"].size() == 4);
    CHECK(j["facets"].size() == 8);
    CHECK(j["boundary_images"].size() == 8);
  }
}
