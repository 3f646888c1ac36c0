#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "rvelab/packing.hpp"

using namespace rvelab;
using namespace rvelab::test;

namespace {

double min_pair_gap(const Configuration& c) {
  double best = 1e300;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) best = std::min(best, pair_gap(c.particle(i), c.particle(j), c.cell));
  return best;
}

double brute_energy(const Configuration& c, double r_eff) {
  double w = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      const double d = std::max(0.0, 2.0 * r_eff - pair_gap(c.particle(i), c.particle(j), c.cell));
      w += 0.5 * d * d;
    }
  return w;
}

PackingParams params_for(double phi, std::uint64_t seed) {
  PackingParams p;
  p.target_phi = phi;
  p.isolation_factor = 1.2;
  p.seed = seed;
  return p;
}

}  // namespace

TEST_SUITE("packing") {

TEST_CASE("overlap energy examples") {
  Configuration c;
  c.cell = {3, 10.0, true};
  c.species = {ShapeKind::Sphere, 0.5};
  c.centers = {{1, 1, 1}, {1.9, 1, 1}};
  CHECK(overlap_energy(c, 0.5) == doctest::Approx(0.005).epsilon(1e-12));
  c.centers = {{1, 1, 1}, {3, 1, 1}};
  CHECK(overlap_energy(c, 0.5) == 0.0);
  const double side = 0.9;
  c.centers = {{1, 1, 1}, {1 + side, 1, 1}, {1 + side / 2, 1 + side * std::sqrt(3.0) / 2, 1}};
  CHECK(overlap_energy(c, 0.5) == doctest::Approx(0.015).epsilon(1e-12));
}

TEST_CASE("overlap energy matches the all-pairs sum") {
  for (auto kind : {ShapeKind::Disk, ShapeKind::Sphere, ShapeKind::Spherocylinder}) {
    const bool fiber = kind == ShapeKind::Spherocylinder;
    Configuration c = random_configuration(kind, 60, 4.0, fiber ? 0.05 : 0.3, 17, fiber ? 1.0 : 0.0);
    const double r_eff = 1.2 * c.species.radius;
    CHECK(overlap_energy(c, r_eff) == doctest::Approx(brute_energy(c, r_eff)).epsilon(1e-12));
  }
}

TEST_CASE("overlap gradient matches central finite differences") {
  Configuration c = random_configuration(ShapeKind::Sphere, 20, 2.0, 0.3, 23);
  const double r_eff = 0.36;
  REQUIRE(overlap_energy(c, r_eff) > 0.0);
  const auto g = overlap_gradient(c, r_eff);
  const double h = 1e-6;
  double max_abs = 0.0;
  for (const auto& v : g) max_abs = std::max({max_abs, std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
  for (std::size_t i = 0; i < c.size(); ++i)
    for (int k = 0; k < 3; ++k) {
      Configuration plus = c, minus = c;
      plus.centers[i][k] += h;
      minus.centers[i][k] -= h;
      const double fd = (brute_energy(plus, r_eff) - brute_energy(minus, r_eff)) / (2.0 * h);
      CHECK(std::abs(fd - g[i][k]) <= 1e-5 * std::max(std::abs(g[i][k]), max_abs * 1e-3));
    }
}

TEST_CASE("overlap gradient sums to zero and vanishes without overlap") {
  Configuration c = random_configuration(ShapeKind::Disk, 80, 5.0, 0.3, 29);
  const auto g = overlap_gradient(c, 0.36);
  Vec sum{};
  double scale = 0.0;
  for (const auto& v : g) {
    sum = sum + v;
    scale += norm(v);
  }
  CHECK(norm(sum) <= 1e-12 * scale);

  Configuration pair;
  pair.cell = {3, 10.0, true};
  pair.species = {ShapeKind::Sphere, 0.5};
  pair.centers = {{1, 1, 1}, {1.8, 1, 1}};
  const auto gp = overlap_gradient(pair, 0.5);
  CHECK(gp[0][0] == doctest::Approx(-gp[1][0]));
  CHECK(gp[0][0] > 0.0);
  CHECK(gp[0][1] == 0.0);
  pair.centers[1] = {3, 1, 1};
  for (const auto& v : overlap_gradient(pair, 0.5)) CHECK(norm(v) == 0.0);
}

TEST_CASE("overlap energy is invariant under translation and permutation") {
  Configuration c = random_configuration(ShapeKind::Sphere, 40, 3.0, 0.3, 31);
  const double w = overlap_energy(c, 0.36);
  Configuration moved = c;
  for (auto& x : moved.centers) x = wrap_point(x + Vec{0.77, 1.31, -2.05}, moved.cell);
  CHECK(overlap_energy(moved, 0.36) == doctest::Approx(w).epsilon(1e-12));
  Configuration perm = c;
  std::reverse(perm.centers.begin(), perm.centers.end());
  CHECK(overlap_energy(perm, 0.36) == doctest::Approx(w).epsilon(1e-12));
}

TEST_CASE("remove overlaps") {
  SUBCASE("non-overlapping input is returned unchanged") {
    Configuration c;
    c.cell = {2, 4.0, true};
    c.species = {ShapeKind::Disk, 0.2};
    c.centers = {{0.5, 0.5, 0}, {2.0, 2.0, 0}};
    PackingParams p = params_for(0.1, 1);
    auto [out, report] = remove_overlaps(c, p);
    CHECK(report.success);
    CHECK(report.iterations.at(0) == 0);
    CHECK(out.centers == c.centers);
    CHECK(out.non_overlapping);
  }
  SUBCASE("symmetric pair separates symmetrically") {
    Configuration c;
    c.cell = {3, 10.0, true};
    c.species = {ShapeKind::Sphere, 0.5};
    c.centers = {{4.6, 5, 5}, {5.4, 5, 5}};
    PackingParams p = params_for(0.1, 1);
    p.isolation_factor = 1.0;
    auto [out, report] = remove_overlaps(c, p);
    REQUIRE(report.success);
    CHECK(out.centers[0][0] + out.centers[1][0] == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(out.centers[0][1] == 5.0);
    CHECK(pair_gap(out.particle(0), out.particle(1), out.cell) >= 1.0 - 1e-12);
  }
  SUBCASE("25 disks at 80% area fraction") {
    const double edge = 1.0;
    const double r = std::sqrt(0.8 * edge * edge / (25.0 * std::numbers::pi));
    Configuration c = random_configuration(ShapeKind::Disk, 25, edge, r, 4);
    PackingParams p = params_for(0.8, 4);
    p.isolation_factor = 1.0;
    auto [out, report] = remove_overlaps(c, p);
    CHECK(report.success);
    CHECK(report.final_energy <= p.energy_tol_for(r));
    CHECK(report.iterations.at(0) > 0);
  }
  SUBCASE("disks without overlap do not move") {
    Configuration c;
    c.cell = {2, 10.0, true};
    c.species = {ShapeKind::Disk, 0.5};
    c.centers = {{1.0, 1.0, 0}, {1.6, 1.0, 0}, {6.0, 6.0, 0}};
    auto [out, report] = remove_overlaps(c, params_for(0.1, 2));
    REQUIRE(report.success);
    CHECK(out.centers[2] == c.centers[2]);
  }
  SUBCASE("iteration cap yields a failure report") {
    Configuration c = random_configuration(ShapeKind::Disk, 25, 1.0, 0.1, 5);
    PackingParams p = params_for(0.8, 5);
    p.descent.max_iters = 2;
    auto [out, report] = remove_overlaps(c, p);
    CHECK_FALSE(report.success);
    CHECK_FALSE(out.non_overlapping);
    CHECK_FALSE(report.failure_reason.empty());
  }
}

TEST_CASE("mechanical contraction of spheres to 30% with isolation") {
  const Cell cell{3, 4.0, true};
  auto [c, report] = mcm_pack(cell, ShapeKind::Sphere, 64, params_for(0.3, 42));
  REQUIRE(report.success);
  CHECK(c.size() == 64);
  CHECK(c.non_overlapping);
  CHECK(c.cell.edge == 4.0);
  CHECK(report.iterations.size() == 3);
  CHECK(analytic_volume_fraction(c) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(std::abs(analytic_volume_fraction(c) - 0.3) <= 1e-12);
  CHECK(min_pair_gap(c) >= 2.0 * 1.2 * c.species.radius);
  CHECK(overlap_energy(c, 1.2 * c.species.radius) == 0.0);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("mechanical contraction of spheres to 40% with isolation fails") {
  const Cell cell{3, 4.0, true};
  PackingParams p = params_for(0.4, 42);
  p.phi_schedule = {0.1, 0.2, 0.3, 0.4};
  auto [c, report] = mcm_pack(cell, ShapeKind::Sphere, 64, p);
  CHECK_FALSE(report.success);
  CHECK(report.failure_reason.find("0.4") != std::string::npos);
}

TEST_CASE("mechanical contraction of disks to 55%") {
  const Cell cell{2, 8.0, true};
  PackingParams p = params_for(0.55, 3);
  p.phi_schedule = {0.1, 0.2, 0.3, 0.4, 0.5, 0.55};
  auto [c, report] = mcm_pack(cell, ShapeKind::Disk, 64, p);
  REQUIRE(report.success);
  CHECK(analytic_volume_fraction(c) == doctest::Approx(0.55).epsilon(1e-12));
  CHECK(min_pair_gap(c) >= 2.0 * 1.2 * c.species.radius);
}

TEST_CASE("packing is deterministic in the seed") {
  const Cell cell{3, 3.0, true};
  auto [a, ra] = mcm_pack(cell, ShapeKind::Sphere, 27, params_for(0.3, 99));
  auto [b, rb] = mcm_pack(cell, ShapeKind::Sphere, 27, params_for(0.3, 99));
  auto [c, rc] = mcm_pack(cell, ShapeKind::Sphere, 27, params_for(0.3, 100));
  REQUIRE(ra.success);
  CHECK(a.centers == b.centers);
  CHECK(ra.iterations == rb.iterations);
  CHECK(a.centers != c.centers);

  Species fiber{ShapeKind::Spherocylinder, 0.025, 1.0, false};
  PackingParams fp = params_for(0.1, 5);
  auto [f1, r1] = sam_pack(Cell{3, 1.0, true}, fiber, fp);
  auto [f2, r2] = sam_pack(Cell{3, 1.0, true}, fiber, fp);
  CHECK(f1.centers == f2.centers);
  CHECK(f1.axes == f2.axes);
}

TEST_CASE("packing parameters are validated") {
  PackingParams p = params_for(0.3, 0);
  p.phi_schedule = {0.2, 0.1, 0.3};
  CHECK_THROWS(p.validate());
  p.phi_schedule = {0.1, 0.2};
  CHECK_THROWS(p.validate());
  p = params_for(0.3, 0);
  p.isolation_factor = 0.9;
  CHECK_THROWS(p.validate());
  p = params_for(1.2, 0);
  CHECK_THROWS(p.validate());
  CHECK(params_for(0.3, 0).schedule_for(ShapeKind::Sphere) == std::vector<double>{0.1, 0.2, 0.3});
  CHECK(params_for(0.15, 0).schedule_for(ShapeKind::Spherocylinder) == std::vector<double>{0.05, 0.1, 0.15});
}

TEST_CASE("sequential addition and migration of fibers") {
  Species fiber{ShapeKind::Spherocylinder, 0.025, 1.0, false};  // aspect ratio 20
  SUBCASE("L = l") {
    auto [c, report] = sam_pack(Cell{3, 1.0, true}, fiber, params_for(0.15, 7));
    REQUIRE(report.success);
    CHECK(c.size() == 77);
    CHECK(report.iterations.size() == 3);
    CHECK(orientation_deviation(c) <= 0.02);
    CHECK(overlap_energy(c, 1.2 * fiber.radius) == 0.0);
    CHECK(min_pair_gap(c) >= 2.0 * 1.2 * fiber.radius);
    CHECK(analytic_volume_fraction(c) == doctest::Approx(77 * std::numbers::pi * 0.025 * 0.025));
  }
  SUBCASE("L = 2l") {
    auto [c, report] = sam_pack(Cell{3, 2.0, true}, fiber, params_for(0.15, 8));
    REQUIRE(report.success);
    CHECK(c.size() == 612);
    CHECK(orientation_deviation(c) <= 0.02);
    CHECK(overlap_energy(c, 1.2 * fiber.radius) == 0.0);
  }
  SUBCASE("zero volume fraction") {
    PackingParams p = params_for(0.15, 1);
    p.target_phi = 0.0;
    p.phi_schedule = {};
    auto [c, report] = sam_pack(Cell{3, 1.0, true}, fiber, p);
    CHECK(report.success);
    CHECK(c.size() == 0);
  }
}

TEST_CASE("orientation tensor has unit trace") {
  Configuration c = random_configuration(ShapeKind::Spherocylinder, 500, 2.0, 0.02, 13, 1.0);
  const auto m = orientation_tensor(c);
  CHECK(m[0] + m[4] + m[8] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m[1] == doctest::Approx(m[3]).epsilon(1e-15));
  CHECK(orientation_deviation(c) < 0.1);
}

TEST_CASE("random sequential adsorption") {
  SUBCASE("disks at 30%") {
    auto [c, report] = rsa_pack(Cell{2, 10.0, true}, Species{ShapeKind::Disk, 0.3}, params_for(0.3, 1));
    REQUIRE(report.success);
    CHECK(c.non_overlapping);
    CHECK(min_pair_gap(c) >= 2.0 * 1.2 * 0.3);
    CHECK(analytic_volume_fraction(c) == doctest::Approx(0.3).epsilon(0.02));
  }
  SUBCASE("spheres at 45% jam") {
    PackingParams p = params_for(0.45, 2);
    p.isolation_factor = 1.0;
    p.rsa_budget_per_particle = 200.0;
    auto [c, report] = rsa_pack(Cell{3, 5.0, true}, Species{ShapeKind::Sphere, 0.5}, p);
    CHECK_FALSE(report.success);
    CHECK(c.size() < 108);
  }
  SUBCASE("empty target") {
    PackingParams p = params_for(0.3, 1);
    p.target_phi = 0.0;
    auto [c, report] = rsa_pack(Cell{2, 3.0, true}, Species{ShapeKind::Disk, 0.3}, p);
    CHECK(report.success);
    CHECK(c.size() == 0);
  }
}

}  // TEST_SUITE
