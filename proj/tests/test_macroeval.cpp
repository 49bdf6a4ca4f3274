#include <limits>
#include <random>

#include "doctest.h"

#include "cohom/macroeval.hpp"

using namespace cohom;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

// Two triangles covering the unit square, split along the diagonal x = y,
// each with its own affine field; a crack along the diagonal carries the jump.
MacroField square_with_diagonal_crack(const Mat& g_lower, const Mat& g_upper, const Vec& offset_jump) {
  MacroField f;
  f.dim = 2;
  MacroElement lower, upper;
  lower.vertices = {Vec::Zero(2), Eigen::Vector2d(1, 0), Eigen::Vector2d(1, 1)};
  upper.vertices = {Vec::Zero(2), Eigen::Vector2d(1, 1), Eigen::Vector2d(0, 1)};
  lower.gradient = g_lower;
  upper.gradient = g_upper;
  lower.offset = Vec::Zero(2);
  upper.offset = offset_jump;
  f.elements = {lower, upper};
  CrackSegment c;
  c.a = Vec::Zero(2);
  c.b = Eigen::Vector2d(1, 1);
  c.normal = Eigen::Vector2d(-1, 1) / std::sqrt(2.0);
  c.jump = offset_jump;
  c.minus = 0;
  c.plus = 1;
  f.cracks = {c};
  return f;
}

}  // namespace

TEST_SUITE("macroeval") {
  const Analytic1DSource analytic;

  TEST_CASE("admissibility") {
    const auto smooth = MacroField::piecewise_1d({0, 1}, {0}, {0.5});
    CHECK(admissible(smooth, analytic.tensile_cone()).admissible);
    const auto open = MacroField::piecewise_1d({0, 0.5, 1}, {0, 0.3}, {0, 0});
    CHECK(admissible(open, analytic.tensile_cone()).admissible);
    const auto closed = MacroField::piecewise_1d({0, 0.5, 1}, {0, -0.3}, {0, 0});
    const auto report = admissible(closed, analytic.tensile_cone());
    CHECK_FALSE(report.admissible);
    REQUIRE(report.segments.size() == 1);
    CHECK(report.segments[0].distance == doctest::Approx(0.3));
    CHECK_THROWS_AS(admissible(open, ConeSpec()), InputError);
  }

  TEST_CASE("1D fixtures") {
    const auto bulk = evaluate(MacroField::piecewise_1d({0, 1}, {0}, {0.5}), analytic);
    CHECK(std::abs(bulk.total - 0.125) <= 1e-9);
    const auto jump = evaluate(MacroField::piecewise_1d({0, 0.5, 1}, {0, 0.2}, {0, 0}), analytic);
    CHECK(std::abs(jump.total - 0.2) <= 1e-9);
    CHECK(jump.bulk == 0);
    const auto bad = evaluate(MacroField::piecewise_1d({0, 0.5, 1}, {0, -0.2}, {0, 0}), analytic);
    CHECK(bad.total == kInf);
    CHECK_FALSE(bad.report.admissible);
  }

  TEST_CASE("mixed 1D field") {
    // Slopes 2 and -1 on halves, jump 0.4 at x = 1/2.
    const auto f = MacroField::piecewise_1d({0, 0.5, 1}, {0, 1.4}, {2, -1});
    const auto e = evaluate(f, analytic);
    CHECK(e.total == doctest::Approx(0.5 * analytic_1d(2).f + 0.5 * analytic_1d(-1).f + 0.4).epsilon(1e-14));
  }

  TEST_CASE("inconsistent fields are rejected") {
    auto f = MacroField::piecewise_1d({0, 0.5, 1}, {0, 0.2}, {0, 0});
    f.cracks[0].jump(0) = 0.25;
    CHECK_THROWS_AS(evaluate(f, analytic), InputError);
    f.cracks.clear();
    CHECK_THROWS_AS(evaluate(f, analytic), InputError);
    auto g = MacroField::piecewise_1d({0, 1}, {0}, {1});
    g.elements[0].vertices[1](0) = 0;
    CHECK_THROWS_AS(g.validate(), InputError);
    CHECK_THROWS_AS(MacroField::piecewise_1d({0, 1}, {0, 1}, {1}), InputError);
  }

  TEST_CASE("purely singular fields are 1-homogeneous") {
    std::mt19937_64 gen(61);
    std::uniform_real_distribution<double> u(0, 2);
    for (int i = 0; i < 50; ++i) {
      const double a = u(gen), b = u(gen), t = 0.1 + u(gen);
      const auto f = MacroField::piecewise_1d({0, 0.3, 0.7, 1}, {0, a, a + b}, {0, 0, 0});
      const auto ft = MacroField::piecewise_1d({0, 0.3, 0.7, 1}, {0, t * a, t * (a + b)}, {0, 0, 0});
      CHECK(evaluate(ft, analytic).total == doctest::Approx(t * evaluate(f, analytic).total).epsilon(1e-12));
    }
  }

  TEST_CASE("evaluate is convex along admissible segments") {
    std::mt19937_64 gen(67);
    std::normal_distribution<double> n(0, 1.5);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 200; ++i) {
      const std::vector<double> s1 = {n(gen), n(gen)}, s2 = {n(gen), n(gen)};
      const double j1 = u(gen), j2 = u(gen);
      auto field = [&](const std::vector<double>& s, double j) {
        return MacroField::piecewise_1d({0, 0.4, 1}, {0, 0.4 * s[0] + j}, s);
      };
      const double mid = evaluate(field({0.5 * (s1[0] + s2[0]), 0.5 * (s1[1] + s2[1])}, 0.5 * (j1 + j2)), analytic).total;
      CHECK(mid <= 0.5 * (evaluate(field(s1, j1), analytic).total + evaluate(field(s2, j2), analytic).total) + 1e-12);
    }
  }

  TEST_CASE("singular term vanishes linearly with the jump") {
    double prev = 1;
    for (double j : {1e-1, 1e-2, 1e-3, 1e-4}) {
      const double e = evaluate(MacroField::piecewise_1d({0, 0.5, 1}, {0, j}, {0, 0}), analytic).singular;
      CHECK(e == doctest::Approx(j).epsilon(1e-12));
      CHECK(e < prev);
      prev = e;
    }
  }

  TEST_CASE("2D field with the cell density") {
    auto model = std::make_shared<const DensityModel>(build_stack_bond(1, 1), ElasticityOperatord::identity(2),
                                                      JumpCone(JumpCone::Kind::Opening, 2));
    const ConeSpec k_hom(2, {SymTensord::make(1, 0, 0), SymTensord::make(0, 1, 0)}, "K_hom");
    const CellDensitySource source(model, k_hom);
    // A crack along x = 1/2 opening by 0.3 in the e1 direction: jump (.) nu = 0.3 e1 (.) e1.
    MacroField f;
    f.dim = 2;
    MacroElement left, right;
    left.vertices = {Vec::Zero(2), Eigen::Vector2d(0.5, 0), Eigen::Vector2d(0.5, 1)};
    right.vertices = {Eigen::Vector2d(0.5, 0), Eigen::Vector2d(1, 0), Eigen::Vector2d(0.5, 1)};
    left.gradient = right.gradient = Mat::Zero(2, 2);
    left.offset = Vec::Zero(2);
    right.offset = Eigen::Vector2d(0.3, 0);
    f.elements = {left, right};
    f.cracks = {{Eigen::Vector2d(0.5, 0), Eigen::Vector2d(0.5, 1), Eigen::Vector2d(1, 0), Eigen::Vector2d(0.3, 0), 0, 1}};
    const auto e = evaluate(f, source);
    REQUIRE(e.report.admissible);
    // Recession of the stack bond at e1 (.) e1 is 1: energy = length * 0.3 * 1.
    CHECK(e.total == doctest::Approx(0.3).epsilon(1e-3));

    // Sliding along the crack is not in K_hom.
    f.elements[1].offset = Eigen::Vector2d(0, 0.3);
    f.cracks[0].jump = Eigen::Vector2d(0, 0.3);
    CHECK(evaluate(f, source).total == kInf);
  }

  TEST_CASE("diagonal crack consistency") {
    const Mat g = Mat::Zero(2, 2);
    const auto f = square_with_diagonal_crack(g, g, Eigen::Vector2d(-0.2, 0.2));
    CHECK_NOTHROW(f.validate());
    const auto bad = square_with_diagonal_crack(g, Mat::Identity(2, 2) * 0.1, Eigen::Vector2d(-0.2, 0.2));
    CHECK_THROWS_AS(bad.validate(), InputError);
    CHECK(f.cracks[0].measure() == doctest::Approx(std::sqrt(2.0)));
  }

  TEST_CASE("tabulated density interpolates and falls back") {
    auto model = std::make_shared<const DensityModel>(build_stack_bond(1, 1), ElasticityOperatord::identity(2),
                                                      JumpCone(JumpCone::Kind::Opening, 2));
    const ConeSpec k_hom(2, {SymTensord::make(1, 0, 0), SymTensord::make(0, 1, 0)});
    auto exact = std::make_shared<const CellDensitySource>(model, k_hom);
    const TabulatedDensitySource table(exact, 1.0, 9, 1.0);
    // Table nodes are exact.
    const SymTensord node = SymTensord::from_components(2, Eigen::Vector3d(0.25, -0.5, 0.75));
    CHECK(table.f(node) == doctest::Approx(exact->f(node)).epsilon(1e-12));
    // Interpolation error is controlled by the grid spacing.
    std::mt19937_64 gen(71);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    for (int i = 0; i < 50; ++i) {
      const SymTensord x = SymTensord::from_components(2, Eigen::Vector3d(u(gen), u(gen), u(gen)));
      CHECK(std::abs(table.f(x) - exact->f(x)) <= 3 * table.spacing() * table.spacing());
    }
    CHECK(table.fallbacks() == 0);
    const SymTensord far = SymTensord::make(3, 0, 0);
    CHECK(table.f(far) == doctest::Approx(exact->f(far)).epsilon(1e-12));
    CHECK(table.fallbacks() == 1);
    // A tight trust radius sends off-node queries to the exact solver.
    const TabulatedDensitySource strict(exact, 1.0, 3, 1e-3);
    const SymTensord off = SymTensord::from_components(2, Eigen::Vector3d(0.3, 0.1, 0.2));
    CHECK(strict.f(off) == doctest::Approx(exact->f(off)).epsilon(1e-12));
    CHECK(strict.fallbacks() == 1);
  }

  TEST_CASE("field JSON round trip") {
    const auto f = MacroField::piecewise_1d({0, 0.5, 1}, {0, 0.2}, {0.1, 0});
    const nlohmann::json j = f;
    const MacroField back = j.get<MacroField>();
    CHECK(evaluate(back, analytic).total == evaluate(f, analytic).total);
    const nlohmann::json e = evaluate(MacroField::piecewise_1d({0, 0.5, 1}, {0, -0.2}, {0, 0}), analytic);
    CHECK(e["energy"] == "inf");
  }
}
