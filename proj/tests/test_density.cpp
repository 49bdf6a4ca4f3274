#include <filesystem>
#include <limits>

#include "doctest.h"

#include "cohom/density.hpp"
#include "cohom/parallel.hpp"
#include "oracles.hpp"

using namespace cohom;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

DensityModel chain_model(std::shared_ptr<SolveCache> cache = nullptr) {
  return DensityModel(build_chain_1d(), ElasticityOperatord::identity(1), JumpCone(JumpCone::Kind::Opening, 1), 0,
                      {}, std::move(cache));
}

DensityModel stack_model(int n = 1) {
  return DensityModel(build_stack_bond(n, n), ElasticityOperatord::identity(2),
                      JumpCone(JumpCone::Kind::Opening, 2));
}

}  // namespace

TEST_SUITE("density") {
  TEST_CASE("analytic_1d examples") {
    CHECK(analytic_1d(1).f == 0.5);
    CHECK(analytic_1d(2).f == 1.5);
    CHECK(analytic_1d(2).f_inf == 2);
    CHECK(analytic_1d(-1).f == 0.5);
    CHECK(analytic_1d(-1).f_inf == kInf);
    CHECK(analytic_1d(0).f_inf == 0);
  }

  TEST_CASE("chain solver reproduces the closed form on the grid") {
    const auto m = chain_model();
    double worst = 0;
    for (int k = -30; k <= 30; ++k) {
      const double xi = 0.1 * k;
      worst = std::max(worst, std::abs(m.f(SymTensord::make(xi)) - analytic_1d(xi).f));
    }
    CHECK(worst <= 1e-6);
  }

  TEST_CASE("recession in 1D") {
    const auto m = chain_model();
    const auto up = estimate_recession(m, SymTensord::make(1.0));
    CHECK(up.status == RecessionStatus::Finite);
    CHECK(up.value == doctest::Approx(1.0).epsilon(1e-3));
    const auto down = estimate_recession(m, SymTensord::make(-1.0));
    CHECK(down.status == RecessionStatus::Infinite);
    CHECK(down.value == kInf);
    CHECK_THROWS_AS(estimate_recession(m, SymTensord::make(0.0)), InputError);
    DensityOptions bad;
    bad.ladder = {8, 4};
    CHECK_THROWS_AS(estimate_recession(m, SymTensord::make(1.0), bad), InputError);
  }

  TEST_CASE("recession of the stack bond matches the opening competitor") {
    const auto m = stack_model(1);
    const SymTensord e11 = SymTensord::make(1, 0, 0);
    const auto r = estimate_recession(m, e11);
    REQUIRE(r.finite());
    // Explicit field: zero bulk strain, vertical interface opens by t.
    const double t = 512;
    const double competitor = m.solver().objective(oracle::strain_free_field(m.solver(), t * e11), t * e11, true) / t;
    CHECK(std::abs(r.value - competitor) <= 0.05 * competitor);
  }

  TEST_CASE("recession estimate is 1-homogeneous") {
    const auto m = stack_model(2);
    for (const auto& xi : {SymTensord::make(1, 0, 0), SymTensord::make(0.6, 0.8, 0), SymTensord::make(0.3, 1.1, 0)}) {
      const double base = estimate_recession(m, xi).value;
      for (double t : {2.0, 4.0}) CHECK(estimate_recession(m, t * xi).value / t == doctest::Approx(base).epsilon(1e-4));
    }
    const auto chain = chain_model();
    for (double t : {2.0, 4.0})
      CHECK(estimate_recession(chain, SymTensord::make(t)).value / t ==
            doctest::Approx(estimate_recession(chain, SymTensord::make(1.0)).value).epsilon(1e-4));
  }

  TEST_CASE("direction sampling") {
    const auto d1 = sample_directions(1, 64);
    REQUIRE(d1.size() == 2);
    CHECK(d1[0](0, 0) == 1);
    CHECK(d1[1](0, 0) == -1);
    const auto d2 = sample_directions(2, 64);
    REQUIRE(d2.size() == 64);
    for (const auto& d : d2) CHECK(d.norm() == doctest::Approx(1).epsilon(1e-14));
    CHECK((d2[0] - SymTensord::make(1, 0, 0)).norm() <= 1e-15);
    // The set spans the symmetric matrices.
    Mat cols(3, d2.size());
    for (size_t i = 0; i < d2.size(); ++i) cols.col(i) = d2[i].components();
    CHECK(Eigen::FullPivLU<Mat>(cols).rank() == 3);
    // Deterministic for a seed, different across seeds.
    const auto again = sample_directions(2, 64, 5), other = sample_directions(2, 64, 6);
    CHECK((again[3] - sample_directions(2, 64, 5)[3]).norm() == 0);
    CHECK((again[3] - other[3]).norm() > 1e-6);
    CHECK(sample_directions(2, 10).size() == 10);
  }

  TEST_CASE("cone detection in 1D") {
    const auto det = detect_cones(chain_model(), sample_directions(1, 2));
    CHECK(det.mismatches.empty());
    CHECK(det.in_H == std::vector<bool>{true, false});
    CHECK(det.in_K == std::vector<bool>{true, false});
    CHECK(membership(det.H, SymTensord::make(3.0), 1e-12));
    CHECK_FALSE(membership(det.K, SymTensord::make(-1.0), 1e-8));
  }

  TEST_CASE("cone detection on the stack bond") {
    const auto dirs = sample_directions(2, 64);
    const auto det = detect_cones(stack_model(2), dirs);
    CHECK(det.mismatches.empty());
    CHECK(membership(det.H, SymTensord::zero(2), 1e-12));
    // Closed under the hull: nonnegative combinations of members are members.
    for (size_t i = 0; i < dirs.size(); ++i)
      for (size_t k = 0; k < dirs.size(); ++k)
        if (det.in_H[i] && det.in_H[k]) CHECK(membership(det.H, dirs[i] + 2.0 * dirs[k], 1e-9));
    // Tensile directions are the nonnegative diagonal strains.
    for (size_t i = 0; i < dirs.size(); ++i) {
      const bool diag_nonneg = dirs[i](0, 0) > -1e-12 && dirs[i](1, 1) > -1e-12 && std::abs(dirs[i](0, 1)) < 1e-12;
      CHECK(det.in_H[i] == diag_nonneg);
    }
  }

  TEST_CASE("sample invariants and classification") {
    const auto m = stack_model(2);
    const auto s = sweep(m, {SymTensord::make(1, 1, 0), SymTensord::make(-1, 0, 0.5), SymTensord::make(0, 0, 1)});
    for (const auto& x : s) CHECK(x.g_value <= x.f_value + 1e-9);
    CHECK(s[0].classification == Classification::TensileCone);
    CHECK(s[1].classification == Classification::Elsewhere);
    CHECK(s[2].classification == Classification::Elsewhere);
    // Linear and quadratic growth classes are exclusive.
    for (const auto& x : s) CHECK((x.classification == Classification::TensileCone) == x.recession.finite());
    CHECK(kernel_tolerance(SymTensord::make(0.1, 0, 0), 1e-6) == 1e-6);
    CHECK(kernel_tolerance(SymTensord::make(10, 0, 0), 1e-6) == doctest::Approx(1e-4));
  }

  TEST_CASE("growth audit examples") {
    const auto m = chain_model();
    DensityOptions o;
    const auto s = sweep(m, {SymTensord::make(2.0), SymTensord::make(-3.0), SymTensord::make(0.0)}, o);
    const ConeSpec k0 = JumpCone(JumpCone::Kind::Opening, 1).matrix_cone({Vec::Ones(1)});
    const auto audit = audit_growth(s, ElasticityOperatord::identity(1), &k0);
    CHECK(audit.passed);
    // xi = 2 meets the lower bound, xi = -3 the upper bound.
    CHECK(std::abs(s[0].f_value - (2 - 0.5)) <= 1e-8);
    CHECK(std::abs(s[1].f_value - 4.5) <= 1e-8);
    CHECK(audit.perp_samples == 1);
    CHECK(audit.sublinear_checked);
    CHECK(audit.sublinear_constant == doctest::Approx(1).epsilon(1e-3));
    CHECK_THROWS_AS(audit_growth({}, ElasticityOperatord::identity(1)), InputError);
  }

  TEST_CASE("growth audit reports violations") {
    DensitySample bad;
    bad.xi = SymTensord::make(3.0);
    bad.f_value = 0.1;  // below 3 - 1/2
    bad.g_value = 0.2;  // above f
    const auto audit = audit_growth({bad}, ElasticityOperatord::identity(1));
    CHECK_FALSE(audit.passed);
    CHECK(audit.violations.size() == 2);
    CHECK(audit.g_violations == 1);
  }

  TEST_CASE("sublinearity audit is skipped when the polar has empty interior") {
    const std::vector<Vec> normals = {Vec::Unit(2, 0), Vec::Unit(2, 1)};
    const ConeSpec k0 = JumpCone(JumpCone::Kind::NonInterpenetration, 2).matrix_cone(normals);
    DensitySample s;
    s.xi = SymTensord::make(1, 0, 0);
    s.f_value = 0.5;
    const auto audit = audit_growth({s}, ElasticityOperatord::identity(2), &k0);
    CHECK_FALSE(audit.sublinear_checked);
    CHECK(audit.notes.size() == 1);
  }

  TEST_CASE("cached solves return identical values") {
    const auto dir = std::filesystem::temp_directory_path() / "cohom_density_cache_test";
    std::filesystem::remove_all(dir);
    auto cache = std::make_shared<SolveCache>(dir);
    const auto m = chain_model(cache);
    const double first = m.f(SymTensord::make(2.5));
    CHECK(cache->misses() == 1);
    CHECK(m.f(SymTensord::make(2.5)) == first);
    CHECK(cache->hits() == 1);
    // A fresh cache over the same directory reads the stored entry.
    auto reopened = std::make_shared<SolveCache>(dir);
    CHECK(chain_model(reopened).f(SymTensord::make(2.5)) == first);
    CHECK(reopened->hits() == 1);
    CHECK(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator()) == 1);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("parallel sweeps equal serial sweeps") {
    const auto m = stack_model(2);
    DensityOptions serial, parallel;
    serial.with_recession = parallel.with_recession = false;
    parallel.jobs = 4;
    const auto dirs = sample_directions(2, 16, 3);
    const auto a = sweep(m, dirs, serial), b = sweep(m, dirs, parallel);
    for (size_t i = 0; i < dirs.size(); ++i) {
      CHECK(a[i].f_value == b[i].f_value);
      CHECK(a[i].g_value == b[i].g_value);
    }
  }
}

TEST_SUITE("infrastructure") {
  TEST_CASE("sha256 of known strings") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }

  TEST_CASE("cache keys ignore key order") {
    const nlohmann::json a = {{"x", 1}, {"y", {1, 2}}};
    const nlohmann::json b = nlohmann::json::parse(R"({"y":[1,2],"x":1})");
    CHECK(SolveCache::key(a) == SolveCache::key(b));
    CHECK(SolveCache::key(a) != SolveCache::key({{"x", 2}, {"y", {1, 2}}}));
  }

  TEST_CASE("concurrent writers of one key") {
    const auto dir = std::filesystem::temp_directory_path() / "cohom_cache_race_test";
    std::filesystem::remove_all(dir);
    std::vector<std::unique_ptr<SolveCache>> caches;
    for (int i = 0; i < 4; ++i) caches.push_back(std::make_unique<SolveCache>(dir));
    parallel_for(64, 8, [&](std::size_t i) { caches[i % 4]->put("k", {{"value", 42}}); });
    SolveCache fresh(dir);
    REQUIRE(fresh.get("k"));
    CHECK((*fresh.get("k"))["value"] == 42);
    CHECK(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator()) == 1);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("parallel_for keeps order and rethrows") {
    std::vector<int> out(100);
    parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = int(i * i); });
    for (int i = 0; i < 100; ++i) CHECK(out[i] == i * i);
    CHECK_THROWS_AS(parallel_for(10, 3,
                                 [](std::size_t i) {
                                   if (i == 7) throw InputError("boom");
                                 }),
                    InputError);
  }

  TEST_CASE("pairwise sum is order-fixed") {
    std::vector<double> v;
    for (int i = 0; i < 1000; ++i) v.push_back(1.0 / (i + 1));
    CHECK(pairwise_sum(v) == pairwise_sum(v));
    double naive = 0;
    for (double x : v) naive += x;
    CHECK(pairwise_sum(v) == doctest::Approx(naive).epsilon(1e-14));
    CHECK(pairwise_sum({}) == 0);
  }
}
