#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "helpers.hpp"
#include "rvelab/geometry.hpp"

using namespace rvelab;
using namespace rvelab::test;

TEST_SUITE("geometry") {

TEST_CASE("periodic distance examples") {
  const Cell unit3{3, 1.0, true};
  CHECK(periodic_distance(Vec{0.05, 0, 0}, Vec{0.95, 0, 0}, unit3) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(periodic_distance(Vec{0.3, 0.2, 0.1}, Vec{0.3, 0.2, 0.1}, unit3) == 0.0);
  const Cell unit2{2, 1.0, true};
  CHECK(periodic_distance(Vec{0.25, 0.25, 0}, Vec{0.75, 0.75, 0}, unit2) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  const Cell open3{3, 1.0, false};
  CHECK(periodic_distance(Vec{0.05, 0, 0}, Vec{0.95, 0, 0}, open3) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("periodic distance is a torus metric") {
  CounterRng rng(7);
  for (int dim : {2, 3}) {
    const Cell cell{dim, 2.5, true};
    for (int trial = 0; trial < 2000; ++trial) {
      const Vec a = random_point(rng, dim, cell.edge), b = random_point(rng, dim, cell.edge),
                c = random_point(rng, dim, cell.edge);
      const double ab = periodic_distance(a, b, cell), ba = periodic_distance(b, a, cell);
      CHECK(ab == ba);
      CHECK(ab <= norm(b - a) + 1e-15);
      CHECK(ab <= cell.edge * std::sqrt(double(dim)) / 2.0 + 1e-12);
      CHECK(periodic_distance(a, c, cell) <= ab + periodic_distance(b, c, cell) + 1e-12);
      const Vec d = min_image_delta(a, b, cell);
      for (int k = 0; k < dim; ++k) CHECK(std::abs(d[k]) <= cell.edge / 2.0 + 1e-12);
    }
  }
}

TEST_CASE("pair gap for round particles and spherocylinders") {
  const Cell cell{3, 10.0, true};
  Particle a{ShapeKind::Sphere, 0.2, 0.0, {1, 1, 1}, {1, 0, 0}};
  Particle b = a;
  b.center = {1.5, 1, 1};
  CHECK(pair_gap(a, b, cell) == doctest::Approx(0.5).epsilon(1e-12));

  Particle f{ShapeKind::Spherocylinder, 0.05, 1.0, {2, 2, 2}, {1, 0, 0}};
  Particle g = f;
  g.center = {2, 2.3, 2};  // parallel, coaxial offset 0.3
  CHECK(pair_gap(f, g, cell) == doctest::Approx(0.3).epsilon(1e-12));
  g.center = {2, 2, 2.1};
  g.axis = {0, 1, 0};  // perpendicular crossing
  CHECK(pair_gap(f, g, cell) == doctest::Approx(0.1).epsilon(1e-12));
  Particle s = a;
  CHECK_THROWS(pair_gap(s, g, cell));
}

TEST_CASE("segment contact matches brute-force sampling") {
  CounterRng rng(11);
  const int samples = 100;  // 10^4 parameter pairs
  for (int trial = 0; trial < 200; ++trial) {
    const Vec p = random_point(rng, 3, 2.0), q = random_point(rng, 3, 2.0);
    const Vec u = random_unit(rng), v = random_unit(rng);
    const double hp = 0.2 + rng.uniform(), hq = 0.2 + rng.uniform();
    const SegmentContact c = segment_contact(p, u, hp, q, v, hq);
    double brute = 1e300;
    for (int i = 0; i <= samples; ++i)
      for (int j = 0; j <= samples; ++j) {
        const double s = -hp + 2.0 * hp * i / samples, t = -hq + 2.0 * hq * j / samples;
        brute = std::min(brute, norm((p + s * u) - (q + t * v)));
      }
    // The sampled minimum is an upper bound; the sampling step bounds the gap.
    const double step = 2.0 * std::max(hp, hq) / samples;
    CHECK(c.distance <= brute + 1e-12);
    CHECK(c.distance >= brute - step);
    CHECK(std::abs(c.s) <= hp + 1e-12);
    CHECK(std::abs(c.t) <= hq + 1e-12);
    CHECK(norm((p + c.s * u) - (q + c.t * v)) == doctest::Approx(c.distance).epsilon(1e-9));
  }
}

TEST_CASE("periodic segment contact picks the nearest image") {
  const Cell cell{3, 2.0, true};
  const Vec p{0.05, 1.0, 1.0}, q{1.95, 1.0, 1.1};
  const Vec u{0, 1, 0}, v{0, 0, 1};
  const SegmentContact c = periodic_segment_contact(p, u, 0.3, q, v, 0.3, cell);
  CHECK(c.distance == doctest::Approx(0.1).epsilon(1e-12));
  CounterRng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const Vec a = random_point(rng, 3, 2.0), b = random_point(rng, 3, 2.0);
    const Vec ua = random_unit(rng), ub = random_unit(rng);
    double brute = 1e300;
    for (int x = -1; x <= 1; ++x)
      for (int y = -1; y <= 1; ++y)
        for (int z = -1; z <= 1; ++z) {
          const Vec shift{2.0 * x, 2.0 * y, 2.0 * z};
          brute = std::min(brute, segment_contact(a, ua, 0.5, b + shift, ub, 0.5).distance);
        }
    CHECK(periodic_segment_contact(a, ua, 0.5, b, ub, 0.5, cell).distance ==
          doctest::Approx(brute).epsilon(1e-12));
  }
}

TEST_CASE("overlap indicator examples") {
  const Cell cell{3, 10.0, true};
  Particle a{ShapeKind::Sphere, 0.3, 0.0, {1, 1, 1}, {1, 0, 0}};
  Particle b = a;
  b.center = {1.5, 1, 1};
  CHECK(overlap_indicator(a, b, cell, 0.3) == doctest::Approx(0.1).epsilon(1e-12));
  b.center = {1.7, 1, 1};
  CHECK(overlap_indicator(a, b, cell, 0.3) == 0.0);
  CHECK(overlap_indicator(a, b, cell, 0.36) == doctest::Approx(0.02).epsilon(1e-9));
  CHECK_THROWS(overlap_indicator(a, b, cell, 0.2));
}

TEST_CASE("overlap indicator vanishes exactly when the gap clears the inflated diameter") {
  CounterRng rng(3);
  const Cell cell{3, 3.0, true};
  for (int trial = 0; trial < 2000; ++trial) {
    Particle a{ShapeKind::Sphere, 0.2, 0.0, random_point(rng, 3, 3.0), {1, 0, 0}};
    Particle b = a;
    b.center = random_point(rng, 3, 3.0);
    const double r_eff = 0.2 + rng.uniform();
    CHECK((overlap_indicator(a, b, cell, r_eff) == 0.0) == (pair_gap(a, b, cell) >= 2.0 * r_eff));
  }
}

TEST_CASE("neighbor index examples") {
  const Cell cell{3, 1.0, true};
  std::vector<Vec> two{{0.1, 0.5, 0.5}, {0.2, 0.5, 0.5}};
  NeighborIndex near(cell, two, 0.2);
  CHECK(near.neighbors(0) == std::vector<std::size_t>{1});
  std::vector<Vec> wrap{{0.05, 0.5, 0.5}, {0.95, 0.5, 0.5}};
  NeighborIndex wrapped(cell, wrap, 0.2);
  CHECK(wrapped.neighbors(0) == std::vector<std::size_t>{1});
}

TEST_CASE("neighbor index equals the all-pairs filter") {
  for (int dim : {2, 3}) {
    for (bool periodic : {true, false}) {
      const double edge = 10.0;
      const Cell cell{dim, edge, periodic};
      CounterRng rng(dim * 10 + periodic);
      const int count = dim == 2 ? 10000 : 4000;
      std::vector<Vec> pts;
      for (int i = 0; i < count; ++i) pts.push_back(random_point(rng, dim, edge));
      const double range = dim == 2 ? 0.15 : 0.6;
      NeighborIndex index(cell, pts, range);
      CHECK_FALSE(index.brute_force());
      std::set<std::pair<std::size_t, std::size_t>> from_index, from_brute;
      index.for_each_pair([&](std::size_t i, std::size_t j) { from_index.insert({i, j}); });
      for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
          if (periodic_distance(pts[i], pts[j], cell) <= range) from_brute.insert({i, j});
      CHECK(from_index == from_brute);
      for (std::size_t i = 0; i < 50; ++i) {
        std::vector<std::size_t> expect;
        for (std::size_t j = 0; j < pts.size(); ++j)
          if (j != i && periodic_distance(pts[i], pts[j], cell) <= range) expect.push_back(j);
        auto got = index.neighbors(i);
        std::sort(got.begin(), got.end());
        CHECK(got == expect);
      }
    }
  }
}

TEST_CASE("neighbor index falls back to all pairs for long ranges") {
  const Cell cell{2, 1.0, true};
  std::vector<Vec> pts{{0.1, 0.1, 0}, {0.6, 0.6, 0}, {0.9, 0.2, 0}};
  NeighborIndex index(cell, pts, 0.8);
  CHECK(index.brute_force());
  CHECK(index.neighbors(0).size() == 2);
}

TEST_CASE("analytic volume fraction") {
  Configuration c;
  c.cell = {3, 1.0, true};
  c.species = {ShapeKind::Sphere, 0.25};
  c.centers = {{0.5, 0.5, 0.5}};
  c.non_overlapping = true;
  CHECK(analytic_volume_fraction(c) == doctest::Approx(4.0 / 3.0 * std::numbers::pi * 0.25 * 0.25 * 0.25));
  CHECK(analytic_volume_fraction(c) == doctest::Approx(0.065450).epsilon(1e-5));

  Configuration d;
  d.cell = {2, 1.0, true};
  d.species = {ShapeKind::Disk, 0.25};
  d.centers = {{0.5, 0.5, 0}};
  d.non_overlapping = true;
  CHECK(analytic_volume_fraction(d) == doctest::Approx(0.19635).epsilon(1e-5));

  d.centers.clear();
  CHECK(analytic_volume_fraction(d) == 0.0);

  Configuration f;
  f.cell = {3, 2.0, true};
  f.species = {ShapeKind::Spherocylinder, 0.05, 1.0, false};
  f.centers = {{1, 1, 1}};
  f.axes = {{0, 0, 1}};
  f.non_overlapping = true;
  CHECK(analytic_volume_fraction(f) == doctest::Approx(std::numbers::pi * 0.0025 / 8.0).epsilon(1e-12));
  f.species.caps_included = true;
  CHECK(analytic_volume_fraction(f) ==
        doctest::Approx((std::numbers::pi * 0.0025 + 4.0 / 3.0 * std::numbers::pi * 0.000125) / 8.0).epsilon(1e-12));

  c.non_overlapping = false;
  CHECK_THROWS(analytic_volume_fraction(c));
  c.non_overlapping = true;
  c.cell.periodic = false;
  CHECK_THROWS(analytic_volume_fraction(c));
}

TEST_CASE("analytic volume fraction is translation invariant") {
  Configuration c = random_configuration(ShapeKind::Sphere, 10, 5.0, 0.3, 9);
  c.non_overlapping = true;
  const double base = analytic_volume_fraction(c);
  for (auto& x : c.centers) x = wrap_point(x + Vec{1.7, -3.2, 4.9}, c.cell);
  CHECK(analytic_volume_fraction(c) == doctest::Approx(base).epsilon(1e-15));
}

TEST_CASE("configuration validation") {
  Configuration c = random_configuration(ShapeKind::Sphere, 3, 2.0, 0.1, 1);
  CHECK_NOTHROW(c.validate());
  c.centers[0][0] = 2.5;
  CHECK_THROWS(c.validate());
  Configuration f = random_configuration(ShapeKind::Spherocylinder, 3, 2.0, 0.05, 1, 1.0);
  CHECK_NOTHROW(f.validate());
  f.axes[1] = {1.0, 1.0, 0.0};
  CHECK_THROWS(f.validate());
  CHECK_THROWS(Cell{4, 1.0, true}.validate());
  CHECK_THROWS(Cell{3, -1.0, true}.validate());
  CHECK(shape_from_string(to_string(ShapeKind::Spherocylinder)) == ShapeKind::Spherocylinder);
}

}  // TEST_SUITE
